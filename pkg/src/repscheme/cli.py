"""Command-line interface: ``repscheme <command> ...``; prints a JSON run report."""

from __future__ import annotations

import argparse
import random
import sys
import time

from .checks import run_suite, von_dyck_dimensions
from .errors import ParseError, ReprSchemeError, ValidationError
from .instances import load_instance_file
from .lifting import enumerate_lifts, extend_over_free, verify_etale_at
from .matrix_groups import (FiniteGroup, centralizer_dimension, default_cap,
                            density_certificate, group_closure)
from .polynomials import PolynomialSystem
from .presentations import (build_coxeter, build_extended_coxeter, free_product_with_free,
                            parse_graph, parse_presentation)
from .rep_scheme import scheme_equations, tangent_report
from .report import RunReport
from .universality import (algebraize, arrangement_to_coxeter, conjugate_point, geometrize,
                           invert_algebraization, nonreduced_certificate, random_rotation)

EXIT_PARSE = 2
EXIT_VALIDATION = 3


def _read(path):
    try:
        with open(path, encoding="utf-8") as f:
            return f.read()
    except OSError as e:
        raise ParseError(f"cannot read {path}: {e.strerror}", source=str(path)) from None


def cmd_coxeter(args, report):
    graph = parse_graph(_read(args.graph), args.graph)
    report.add_input(args.graph)
    pres = build_extended_coxeter(graph)[0] if args.extended else build_coxeter(graph)
    report.results = {
        "extended": args.extended,
        "generators": list(pres.generators),
        "relators": [str(r) for r in pres.relators],
        "rank": len(graph.vertices),
        "presentation": pres.to_text(),
    }


def cmd_equations(args, report):
    pres = parse_presentation(_read(args.presentation), args.presentation)
    report.add_input(args.presentation)
    if args.free:
        pres = free_product_with_free(pres, args.free)[0]
    system = scheme_equations(pres, args.target)
    report.results = {
        "target": args.target,
        "generators": list(pres.generators),
        "variable_count": len(system.variables),
        "equation_count": len(system.polynomials),
        "system": system.to_json(),
    }


def cmd_tangent(args, report):
    inst = load_instance_file(args.instance)
    report.add_input(args.instance)
    tr = tangent_report(inst.rho)
    cent = centralizer_dimension(inst.rho.elements(), args.cap)
    report.results = {
        "instance": inst.name,
        "target": inst.rho.target,
        **tr.to_json(),
        "centralizer": {"lie_dim": cent.lie_dim, "is_center_only": cent.is_center_only,
                        "certified": cent.certified},
    }


def cmd_lift(args, report):
    inst = load_instance_file(args.instance)
    report.add_input(args.instance)
    family = enumerate_lifts(inst.rho)
    report.results = {
        "instance": inst.name,
        "family": family.to_json(),
        "etale": verify_etale_at(family),
    }


def cmd_universality(args, report):
    system = PolynomialSystem.loads(_read(args.system), args.system)
    report.add_input(args.system)
    geo = geometrize(system)
    data = arrangement_to_coxeter(geo.arrangement)
    rho = algebraize(geo.base_realization, data)
    tr = tangent_report(rho)
    tx = system.tangent_dimension()
    sigma = group_closure([rho.images[v] for v in data.sigma], args.cap)
    density = density_certificate(rho.elements(), args.cap)
    rng = random.Random(args.seed)
    g = random_rotation(rng)
    psi, g2 = invert_algebraization(conjugate_point(rho, g), geo.arrangement, data)
    results = {
        "arrangement": {
            "points": len(geo.arrangement.points),
            "lines": len(geo.arrangement.lines),
            "incidences": len(geo.arrangement.incidences),
            "text": geo.arrangement.to_text(),
        },
        "coxeter_graph": {
            "vertices": len(data.graph.vertices),
            "edges": len(data.graph.edges),
            "label4_edges": sum(1 for e in data.graph.edges if e[2] == 4),
            "text": data.graph.to_text(),
            "t_prime": data.t_prime,
            "sigma": data.sigma,
        },
        "rho_c": rho.to_json(),
        "tangent_match": {"dim_Z1": tr.dim_Z1, "dim_TxX_plus_3": tx + 3,
                          "dim_B1": tr.dim_B1, "matches": tr.dim_Z1 == tx + 3},
        "sigma_order": sigma.order if isinstance(sigma, FiniteGroup) else None,
        "density": density.kind,
        "density_certificate": density.to_json(),
        "round_trip": {"conjugator_recovered": g2 == g,
                       "realization_recovered": psi == geo.base_realization},
        "nonreduced": nonreduced_certificate(geo),
    }
    if args.free:
        big, _ = extend_over_free(rho, [random_rotation(rng) for _ in range(args.free)])
        results["free_extension"] = {"k": args.free, "dim_Z1": tangent_report(big).dim_Z1,
                                     "expected": tr.dim_Z1 + 3 * args.free}
    report.results = results


def cmd_verify(args, report):
    checks = run_suite(args.seed, args.cap)
    report.results = {
        "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in checks],
        "passed": sum(c.passed for c in checks),
        "failed": sum(not c.passed for c in checks),
        "von_dyck_tangent": von_dyck_dimensions(),
    }
    return 0 if all(c.passed for c in checks) else 1


def _common_options(default):
    """Flags accepted both before and after the subcommand."""
    p = argparse.ArgumentParser(add_help=False)
    d = (lambda v: v) if default else (lambda v: argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=d(0), help="seed for randomized sampling")
    p.add_argument("--cap", type=int, default=d(None),
                   help="closure cap (default: $REPSCHEME_CAP or 10000)")
    p.add_argument("--markdown", action="store_true", default=d(False),
                   help="print a markdown summary instead of JSON")
    p.add_argument("--output", "-o", default=d(None),
                   help="write the report here instead of stdout")
    p.add_argument("--timing", action="store_true", default=d(False),
                   help="include wall-clock timing (makes reports run-dependent)")
    return p


def build_parser():
    p = argparse.ArgumentParser(prog="repscheme", description=__doc__,
                                parents=[_common_options(True)])
    common = [_common_options(False)]
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("coxeter", parents=common, help="labeled graph -> Coxeter presentation")
    s.add_argument("graph")
    s.add_argument("--extended", action="store_true", help="canonical central extension")
    s.set_defaults(func=cmd_coxeter)

    s = sub.add_parser("equations", parents=common, help="presentation -> representation scheme equations")
    s.add_argument("presentation")
    s.add_argument("--target", choices=("SL2", "SO3"), default="SO3")
    s.add_argument("--free", type=int, default=0, help="add k free generators first")
    s.set_defaults(func=cmd_equations)

    s = sub.add_parser("tangent", parents=common, help="instance -> Z1, B1, H1")
    s.add_argument("instance")
    s.set_defaults(func=cmd_tangent)

    s = sub.add_parser("lift", parents=common, help="Coxeter SO3 instance -> spin lift family")
    s.add_argument("instance")
    s.set_defaults(func=cmd_lift)

    s = sub.add_parser("universality", parents=common, help="polynomial system -> arrangement -> rho_c")
    s.add_argument("system")
    s.add_argument("--free", type=int, default=0, help="also extend over k free factors")
    s.set_defaults(func=cmd_universality)

    s = sub.add_parser("verify", parents=common, help="run the shipped invariant suite")
    s.set_defaults(func=cmd_verify)
    return p


def _emit(report, args):
    text = report.markdown() if args.markdown else report.dumps()
    if args.output:
        with open(args.output, "w", encoding="utf-8") as f:
            f.write(text)
    else:
        sys.stdout.write(text)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.cap is None:
        args.cap = default_cap()
    report = RunReport(args.command, seed=args.seed)
    start = time.perf_counter()
    try:
        code = args.func(args, report) or 0
    except ParseError as e:
        report.results = {"error": {"kind": "parse", "message": e.message, "line": e.line,
                                    "column": e.column, "source": e.source}}
        print(f"parse error: {e}", file=sys.stderr)
        code = EXIT_PARSE
    except (ValidationError, ReprSchemeError) as e:
        report.results = {"error": {"kind": "validation", "message": str(e),
                                    "object": getattr(e, "obj", None)}}
        print(f"validation error: {e}", file=sys.stderr)
        code = EXIT_VALIDATION
    if args.timing:
        report.timing = {"seconds": round(time.perf_counter() - start, 3)}
    _emit(report, args)
    return code


if __name__ == "__main__":
    sys.exit(main())
