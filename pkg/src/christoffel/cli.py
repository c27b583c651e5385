"""Command-line interface: ``christoffel <command> [options]``.

Exit codes: 0 success, 2 invalid input, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import io
import json
import logging
import sys
from pathlib import Path

import numpy as np

from . import perturb, svg
from .cdkernel import (
    Grid,
    KernelEngine,
    auto_level_threshold,
    level_field,
    leverage_scores,
)
from .measures import (
    DiscreteMeasure,
    MonomialOrdering,
    cloud_to_csv,
    cloud_to_json,
    load_cloud,
    parse_points,
)
from .orthopoly import DEFAULT_RANK_TOL, arnoldi_univariate, orthonormalize
from .reference import conformal, green, kernels
from .sampling import GENERATORS
from .verify import format_table, run_checks

EXIT_OK, EXIT_INVALID, EXIT_NUMERIC = 0, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # one line, exit code 2
        raise UsageError(message)


def _float_or_auto(text: str):
    if text == "auto":
        return "auto"
    try:
        return float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a number or 'auto', got {text!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _json(obj) -> str:
    return json.dumps(obj, indent=2, sort_keys=True) + "\n"


def _ordering(args, d: int) -> MonomialOrdering:
    try:
        return MonomialOrdering.parse(args.ordering, d)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _cplx(v: complex) -> list[float]:
    return [float(v.real), float(v.imag)]


def _fit_engine(args, measure: DiscreteMeasure) -> KernelEngine:
    if args.n is None:
        raise UsageError("--n is required")
    basis = orthonormalize(measure, _ordering(args, measure.d), args.n, args.rank_tol)
    if not basis.complete:
        print(
            f"warning: rank exhausted, built {basis.size} of {args.n + 1} polynomials",
            file=sys.stderr,
        )
    return KernelEngine(basis)


# -- commands ----------------------------------------------------------------


def cmd_fit(args) -> int:
    measure = load_cloud(args.input)
    if args.n is None:
        raise UsageError("--n is required")
    if args.method == "arnoldi":
        basis, hess = arnoldi_univariate(measure, args.n, args.rank_tol)
    else:
        basis = orthonormalize(measure, _ordering(args, measure.d), args.n, args.rank_tol)
        hess = None
    print(f"defect {basis.defect:.3e}")
    print("degree indices " + " ".join(str(k) for k in basis.degree_indices))
    for rec in basis.null_records:
        print(f"null record at monomial index {rec.index} exponent {rec.exponent}")
    if not basis.complete:
        print(
            f"warning: rank exhausted, built {basis.size} of {args.n + 1} polynomials",
            file=sys.stderr,
        )
    if args.out:
        data = basis.to_dict()
        if hess is not None:
            data["hessenberg"] = [[_cplx(v) for v in row] for row in hess.H]
        Path(args.out).write_text(_json(data), encoding="utf-8")
    return EXIT_OK


def cmd_leverage(args) -> int:
    measure = load_cloud(args.input)
    eng = _fit_engine(args, measure)
    rep = leverage_scores(eng, args.threshold)
    buf = io.StringIO()
    buf.write(f"# n={eng.n} defect={eng.basis.defect:.3e} ordering={args.ordering} threshold={rep.threshold!r}\n")
    head = ["index"]
    for k in range(1, measure.d + 1):
        head += [f"re{k}", f"im{k}"]
    buf.write(",".join(head + ["weight", "score", "flag"]) + "\n")
    flagged = set(rep.flagged.tolist())
    for i, (z, t, s) in enumerate(zip(measure.atoms, measure.weights, rep.scores)):
        cells = [str(i)]
        for v in z:
            cells += [repr(float(v.real)), repr(float(v.imag))]
        cells += [repr(float(t)), repr(float(s)), "1" if i in flagged else "0"]
        buf.write(",".join(cells) + "\n")
    _emit(buf.getvalue(), args.out)
    if args.svg:
        Path(args.svg).write_text(svg.scatter(measure.atoms[:, 0], rep.scores), encoding="utf-8")
    return EXIT_OK


def cmd_levelset(args) -> int:
    measure = load_cloud(args.input)
    eng = _fit_engine(args, measure)
    base = parse_points(args.base, measure.d)[0] if args.base else None
    try:
        grid = Grid.parse(args.grid, measure.d, args.axis, base)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    thr = auto_level_threshold(eng) if args.threshold == "auto" else args.threshold
    field = level_field(eng, grid, thr)
    buf = io.StringIO()
    buf.write(f"# n={eng.n} threshold={thr!r}\n")
    buf.write("x,y,kernel,inside\n")
    for i, y in enumerate(grid.ys):
        for j, x in enumerate(grid.xs):
            buf.write(f"{float(x)!r},{float(y)!r},{float(field.values[i, j])!r},{int(field.mask[i, j])}\n")
    _emit(buf.getvalue(), args.out)
    if args.svg:
        pts = measure.atoms[:, grid.axis]
        Path(args.svg).write_text(
            svg.heatmap(grid.xs, grid.ys, field.values, [thr] if np.isfinite(thr) else [], pts),
            encoding="utf-8",
        )
    return EXIT_OK


def _ratio_function(name: str | None):
    if name in (None, "none"):
        return None
    if name == "disk":
        return lambda z: 1.0 / complex(z)
    if name.startswith("ellipse:"):
        a, b = (float(v) for v in name.split(":", 1)[1].split(","))
        return conformal.ellipse_map(a, b).g
    raise UsageError(f"unknown ratio function {name!r}")


def cmd_perturb(args) -> int:
    measure = load_cloud(args.input)
    masses = load_cloud(args.masses)
    zs = load_cloud(args.z_list).atoms
    eng = _fit_engine(args, measure)
    pert = perturb.MassPerturbation.build(eng, masses)
    g = _ratio_function(args.g)
    reports = [perturb.exact_mass_ratio(eng, pert, z, args.chain_depth, g).to_dict() for z in zs]
    for r in reports:
        print(
            f"z={r['z']} ratio={r['exact_ratio']:.12g} chain="
            + " ".join(f"{s:.6g}" for s in r["sigma_chain"]),
            file=sys.stderr,
        )
    _emit(_json({"n": eng.n, "chain_depth": args.chain_depth, "reports": reports}), args.out)
    return EXIT_OK


def cmd_closeness(args) -> int:
    mu = load_cloud(args.mu)
    nu = load_cloud(args.nu)
    eng = _fit_engine(args, mu)
    rep = perturb.closeness(perturb.modified_moments(eng.basis, nu))
    _emit(
        _json({"n": eng.n, "epsilon": rep.epsilon, "epsilon_frobenius": rep.epsilon_frobenius, "satisfied": rep.satisfied}),
        args.out,
    )
    return EXIT_OK


def cmd_green(args) -> int:
    try:
        gf = green.by_name(args.kind, args.d)
        pts = parse_points(args.z, gf.dims)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    vals = np.atleast_1d(green.green_eval(gf, pts))
    _emit(_json({"kind": args.kind, "d": gf.dims, "values": [float(v) for v in vals]}), args.out)
    return EXIT_OK


def cmd_oracle(args) -> int:
    if args.n is None:
        raise UsageError("--n is required")
    d = 1 if args.kind == "bergman-disk" else args.d
    if args.kind == "chebyshev-tensor":
        d = args.d if args.d > 1 else 2
    try:
        z = parse_points(args.z, d)
        w = parse_points(args.w, d) if args.w else z
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if z.shape != w.shape:
        raise UsageError("--z and --w hold different numbers of points")
    vals = []
    for a, b in zip(z, w):
        if args.kind == "bergman-disk":
            v = kernels.bergman_disk_kernel(args.n, a[0], b[0])
        elif args.kind == "chebyshev-tensor":
            v = kernels.chebyshev_tensor_kernel(args.n, a, b)
        elif args.kind == "complex-ball":
            v = kernels.complex_ball_kernel(d, args.n, a, b)
        else:
            v = kernels.polydisk_kernel(d, args.n, a, b)
        vals.append(_cplx(complex(v)))
    _emit(_json({"kind": args.kind, "n": args.n, "d": d, "values": vals}), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    results = run_checks()
    _emit(format_table(results) + "\n", args.out)
    return EXIT_OK if all(r.passed for r in results) else EXIT_NUMERIC


def cmd_sample(args) -> int:
    seed = 0 if args.seed is None else args.seed
    measure = GENERATORS[args.kind](seed)
    if args.out and args.out.endswith(".json"):
        _emit(json.dumps(cloud_to_json(measure)) + "\n", args.out)
    else:
        _emit(cloud_to_csv(measure), args.out)
    return EXIT_OK


# -- parser ------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    common = _Parser(add_help=False)
    common.add_argument("--ordering", default="graded-lex", help="graded-lex or tensor:<n>")
    common.add_argument("--n", type=int, default=None, help="index of the last polynomial")
    common.add_argument("--rank-tol", type=float, default=DEFAULT_RANK_TOL)
    common.add_argument("--seed", type=int, default=None)
    common.add_argument("--out", default=None, help="output path (stdout when omitted)")
    common.add_argument("-v", "--verbose", action="store_true")

    parser = _Parser(prog="christoffel", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("fit", parents=[common], help="build an orthonormal basis")
    p.add_argument("--input", required=True)
    p.add_argument("--method", choices=["gram-schmidt", "arnoldi"], default="gram-schmidt")
    p.set_defaults(func=cmd_fit)

    p = sub.add_parser("leverage", parents=[common], help="leverage scores of a cloud")
    p.add_argument("--input", required=True)
    p.add_argument("--threshold", type=_float_or_auto, default="auto")
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_leverage)

    p = sub.add_parser("levelset", parents=[common], help="K_n(z,z) on a grid")
    p.add_argument("--input", required=True)
    p.add_argument("--grid", required=True, help="x0,x1,y0,y1,nx,ny")
    p.add_argument("--threshold", type=_float_or_auto, default="auto")
    p.add_argument("--axis", type=int, default=0, help="complex coordinate varied (d > 1)")
    p.add_argument("--base", default=None, help="fixed point for the other coordinates")
    p.add_argument("--svg", default=None)
    p.set_defaults(func=cmd_levelset)

    p = sub.add_parser("perturb", parents=[common], help="exact ratio for added point masses")
    p.add_argument("--input", required=True)
    p.add_argument("--masses", required=True)
    p.add_argument("--z-list", required=True)
    p.add_argument("--chain-depth", type=int, default=3)
    p.add_argument("--g", default=None, help="ratio function: disk or ellipse:a,b")
    p.set_defaults(func=cmd_perturb)

    p = sub.add_parser("closeness", parents=[common], help="epsilon between two measures")
    p.add_argument("--mu", required=True)
    p.add_argument("--nu", required=True)
    p.set_defaults(func=cmd_closeness)

    p = sub.add_parser("green", parents=[common], help="closed-form Green functions")
    p.add_argument("--kind", required=True, choices=sorted(green.KINDS))
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--z", required=True, help="points: coordinates split by ',', points by ';'")
    p.set_defaults(func=cmd_green)

    p = sub.add_parser("oracle", parents=[common], help="closed-form kernels")
    p.add_argument("--kind", required=True, choices=["bergman-disk", "chebyshev-tensor", "complex-ball", "polydisk"])
    p.add_argument("--d", type=int, default=1)
    p.add_argument("--z", required=True)
    p.add_argument("--w", default=None)
    p.set_defaults(func=cmd_oracle)

    p = sub.add_parser("verify", parents=[common], help="run the oracle cross-checks")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("sample", parents=[common], help="write a seeded test cloud")
    p.add_argument("--kind", required=True, choices=sorted(GENERATORS))
    p.set_defaults(func=cmd_sample)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        logging.basicConfig(level=logging.INFO if args.verbose else logging.ERROR)
        if args.n is not None and args.n < 0:
            raise UsageError("--n must be >= 0")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    except (np.linalg.LinAlgError, ArithmeticError, FloatingPointError) as exc:
        print(f"numerical failure: {str(exc).splitlines()[0] if str(exc) else type(exc).__name__}", file=sys.stderr)
        return EXIT_NUMERIC
    except (ValueError, OSError, KeyError) as exc:
        msg = str(exc).splitlines()[0] if str(exc) else type(exc).__name__
        print(f"error: {msg}", file=sys.stderr)
        return EXIT_INVALID


if __name__ == "__main__":
    sys.exit(main())
