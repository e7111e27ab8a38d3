"""Command-line front end.

Three verbs: ``verify`` runs a named law suite and reports residuals,
``example1`` reproduces the boundary-term dichotomy between the direct
and the manifold integral for the 1|2 shear family, and ``integrate``
evaluates the problem described by a TOML file. Reports are canonical
JSON: a fixed input and seed produce byte-identical bytes.

Exit codes: 0 success, 1 residual failure, 2 usage or parse error,
3 precondition failure.
"""

from __future__ import annotations

import argparse
import sys

from . import KERNEL_IMPLEMENTATION, __version__
from .algebra import DEFAULT_LEVEL, render
from .berezin import naive_integral
from .contour import path_integral
from .errors import ProblemFormatError, SuperintError, ToleranceError
from .problems import ProblemSpec, dump_report, parse_poly_expr
from .quadrature import QuadratureSpec
from .suites import SUITES, run_suite
from .supersmooth import SuperDomain, SuperMap, SupersmoothFn
from .vvintegral import (
    FoliatedManifold,
    cvf_residual,
    naive_cvf_discrepancy,
    vv_integral,
)

USAGE_EXIT = 2
PRECONDITION_EXIT = 3


def _write_json(path: str | None, report: dict) -> None:
    if path:
        with open(path, "w") as fh:
            fh.write(dump_report(report))


def cmd_verify(args) -> int:
    results = run_suite(args.suite, args.seed, args.cases)
    for check in results:
        status = "PASS" if check.passed else "FAIL"
        print(f"{status} {check.law} (cases={check.cases}, "
              f"max_residual={check.max_residual})")
    all_pass = all(c.passed for c in results)
    report = {
        "suite": args.suite,
        "seed": args.seed,
        "cases": args.cases,
        "level": args.level,
        "checks": [c.as_json() for c in results],
        "pass": all_pass,
    }
    _write_json(args.json, report)
    return 0 if all_pass else 1


def cmd_example1(args) -> int:
    level = args.level
    u0 = parse_poly_expr(args.u0, level)
    u1 = parse_poly_expr(args.u1, level)
    p = parse_poly_expr(args.phi, level)
    lo, hi = (v.strip() for v in args.omega.split(","))
    dom = SuperDomain.from_box([(_num(lo), _num(hi))], 2)

    u = SupersmoothFn.from_odd_coeffs(1, 2, level, {(0, 0): u0, (1, 1): u1})
    p2 = SupersmoothFn(1, 2, level, terms=dict(p._terms))
    t1 = SupersmoothFn.odd_coordinate(1, 1, 2, level)
    t2 = SupersmoothFn.odd_coordinate(2, 1, 2, level)
    y = SupersmoothFn.coordinate(1, 1, 2, level)
    phi = SuperMap(even=(y + t1 * t2 * p2,), odd=(t1, t2))
    phi_inv = SuperMap(even=(y - t1 * t2 * p2,), odd=(t1, t2))

    from .supermatrix import sdet
    from .supersmooth import compose, jacobian

    direct = naive_integral(u, dom)
    transformed = naive_integral(sdet(jacobian(phi)) * compose(u, phi), dom)
    discrepancy = naive_cvf_discrepancy(phi, dom, u)
    mani = FoliatedManifold.trivial(dom.box, 2, level)
    residual = cvf_residual(phi, phi_inv, mani, u)

    print(f"direct integral:        {render(direct)}")
    print(f"transformed integral:   {render(transformed)}")
    print(f"discrepancy (boundary): {render(discrepancy)}")
    print(f"manifold-integral residual: {render(residual)}")
    report = {
        "direct": direct.json_terms(),
        "transformed": transformed.json_terms(),
        "discrepancy": discrepancy.json_terms(),
        "manifold_residual": residual.json_terms(),
        "inputs": {"u0": args.u0, "u1": args.u1, "phi": args.phi,
                   "omega": args.omega, "level": level},
    }
    _write_json(args.json, report)
    return 0 if residual.is_zero() else 1


def _num(text: str):
    from fractions import Fraction

    if "/" in text:
        n, d = text.split("/")
        return Fraction(int(n), int(d))
    return float(text) if "." in text else int(text)


def cmd_integrate(args) -> int:
    spec = ProblemSpec.from_file(args.problem)
    quad = spec.quad
    if args.quad_order or args.quad_panels or args.tol:
        base = quad or QuadratureSpec()
        quad = QuadratureSpec(
            order=args.quad_order or base.order,
            panels=args.quad_panels or base.panels,
            tol=args.tol or base.tol,
        )
    if spec.mode == "naive":
        value = naive_integral(spec.function, spec.domain, quad)
    elif spec.mode == "contour":
        value = path_integral(spec.path, spec.function, quad)
    elif spec.mode == "cvf":
        value = cvf_residual(spec.map, spec.map_inverse, spec.manifold,
                             spec.function, quad, seed=spec.seed)
    else:
        value = vv_integral(spec.manifold, spec.function, quad, seed=spec.seed)
    print(render(value))
    report = {
        "mode": spec.mode,
        "level": spec.level,
        "seed": spec.seed,
        "value": value.json_terms(),
        "text": render(value),
    }
    _write_json(args.json, report)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="superint",
        description="Grassmann-algebra integral calculus: law verification, "
                    "the shear-family diagnostic, and problem evaluation.",
    )
    parser.add_argument("--version", action="version",
                        version=f"superint {__version__} (kernel: {KERNEL_IMPLEMENTATION})")
    sub = parser.add_subparsers(dest="command", required=True)

    p_verify = sub.add_parser("verify", help="run a verification suite")
    p_verify.add_argument("suite", choices=sorted(SUITES) + ["all"])
    p_verify.add_argument("--cases", type=int, default=50)
    p_verify.add_argument("--seed", type=int, default=0)
    p_verify.add_argument("--level", type=int, default=DEFAULT_LEVEL)
    p_verify.add_argument("--json", metavar="PATH", help="write the JSON report here")
    p_verify.set_defaults(fn=cmd_verify)

    p_ex = sub.add_parser("example1", help="direct vs manifold integral dichotomy")
    p_ex.add_argument("--u0", default="q", help="even coefficient (polynomial in q)")
    p_ex.add_argument("--u1", default="1", help="top coefficient (polynomial in q)")
    p_ex.add_argument("--phi", default="q", help="shear profile (polynomial in q)")
    p_ex.add_argument("--omega", default="0,1", help="body interval lo,hi")
    p_ex.add_argument("--level", type=int, default=DEFAULT_LEVEL)
    p_ex.add_argument("--json", metavar="PATH")
    p_ex.set_defaults(fn=cmd_example1)

    p_int = sub.add_parser("integrate", help="evaluate a problem file")
    p_int.add_argument("problem", help="TOML problem file")
    p_int.add_argument("--quad-order", type=int, default=None)
    p_int.add_argument("--quad-panels", type=int, default=None)
    p_int.add_argument("--tol", type=float, default=None)
    p_int.add_argument("--json", metavar="PATH")
    p_int.set_defaults(fn=cmd_integrate)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ProblemFormatError, FileNotFoundError) as e:
        print(f"error: {e}", file=sys.stderr)
        return USAGE_EXIT
    except ToleranceError as e:
        print(f"error: {e}", file=sys.stderr)
        return 1
    except SuperintError as e:
        print(f"error: {e}", file=sys.stderr)
        return PRECONDITION_EXIT


if __name__ == "__main__":
    sys.exit(main())
