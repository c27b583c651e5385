"""Closed-form oracles: Green functions, conformal maps, kernels and quadratures."""

from . import conformal, green, kernels, quadrature
from .conformal import ConformalMap, disk_map, ellipse_map
from .green import GreenFunction, green_eval
from .kernels import (
    bergman_disk_kernel,
    bergman_disk_max,
    bergman_predictors,
    chebyshev_tensor_corner,
    chebyshev_tensor_kernel,
    complex_ball_kernel,
    polydisk_kernel,
)
from .quadrature import chebyshev_tensor_quadrature, disk_quadrature, ellipse_quadrature
