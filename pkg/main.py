#!/usr/bin/env python3
"""
VPD Workbench - Main Entry Point
"""

import argparse
import logging
import sys
from typing import List, Optional

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_USAGE = 2
EXIT_NON_CONVERGENCE = 3

METHOD_NAMES = {"closed": "closed", "oracle": "oracle2d", "mc": "montecarlo"}

logger = logging.getLogger("vpd_workbench")


def parse_ks(text: str) -> List[int]:
    """'0..4', '1,3' or '2'"""
    try:
        if ".." in text:
            low, high = text.split("..", 1)
            ks = list(range(int(low), int(high) + 1))
        else:
            ks = [int(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"invalid k range '{text}'")
    if not ks or min(ks) < 0:
        raise argparse.ArgumentTypeError(f"k range '{text}' must name non-negative integers")
    return ks


def load_settings(args):
    """Config file (or VPD_CONFIG) with command-line overrides, validated by pydantic"""
    from config.config_loader import ConfigLoader, WorkbenchConfig

    data = ConfigLoader(args.config).settings.model_dump()
    overrides = {
        ("regulator", "rel_tol"): args.tol,
        ("regulator", "oracle_tol"): args.tol,
        ("regulator", "seed"): args.seed,
        ("regulator", "mc_samples"): args.samples,
        ("ibp", "depth"): args.depth,
        ("feynman", "projector"): args.projector,
        ("report", "output"): args.output,
        ("report", "format"): args.format,
    }
    for (section, key), value in overrides.items():
        if value is not None:
            data[section][key] = value
    settings = WorkbenchConfig.model_validate(data)
    logger.debug("Effective settings: %s", settings.model_dump())
    return settings


def finish(report, settings) -> int:
    """Emit the report and turn its verdicts into an exit code"""
    from reports import emit_report

    output = settings.report.output
    emit_report(report, settings.report.format, path=output, stream=None if output else sys.stdout)
    failures = report.failures
    status = sys.stderr if output is None else sys.stdout
    if failures:
        print(f"{len(failures)} of {len(report.verdicts)} checks failed: "
              f"{', '.join(v.check_id for v in failures)}", file=status)
    else:
        print(f"All {len(report.verdicts)} checks passed", file=status)
    return report.exit_code


def run_verify(args, settings) -> int:
    """Run a named check suite"""
    from reports import run_check_suite
    print(f"Running suite {args.suite}...", file=sys.stderr)
    return finish(run_check_suite(args.suite, settings, command=args.argv), settings)


def run_basis(args, settings) -> int:
    """Operator enumeration, counterterm solve and bare matching"""
    from reports import basis_report
    return finish(basis_report(settings, args.action, args.sector, args.max_dim, command=args.argv), settings)


def run_feynman(args, settings) -> int:
    """Vertex and propagator rules, diagram contraction"""
    from reports import feynman_report
    report = feynman_report(settings, args.action, kind=args.kind, species=args.species,
                            diagram=args.diagram, variant=args.variant, command=args.argv)
    return finish(report, settings)


def run_omega(args, settings) -> int:
    """Shell integrals Omega_k, optionally regenerating the golden file"""
    from reports import omega_report
    if args.bless:
        print("Regenerating golden Omega values...", file=sys.stderr)
    report = omega_report(settings, args.k, METHOD_NAMES[args.method], bless=args.bless, command=args.argv)
    return finish(report, settings)


def run_beta(args, settings) -> int:
    """One-loop beta function"""
    from reports import beta_report
    return finish(beta_report(settings, args.model, args.g, command=args.argv), settings)


def run_report(args, settings) -> int:
    """Validate an existing report against the schema and render it again"""
    from reports import load_report
    report = load_report(args.path)
    print(f"{args.path}: valid report of suite {report.suite}", file=sys.stderr)
    return finish(report, settings)


def run_serve(args, settings) -> int:
    """Run the FastAPI report backend"""
    import uvicorn
    from ui.backend_api import app, get_settings
    app.dependency_overrides[get_settings] = lambda: settings
    print(f"Serving reports on http://{settings.api.host}:{settings.api.port}")
    uvicorn.run(app, host=settings.api.host, port=settings.api.port)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    from reports.suites import SUITE_NAMES

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="YAML config file (default: $VPD_CONFIG or config.yaml)")
    common.add_argument("--log-level", default="WARNING",
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"], help="Logging level")
    common.add_argument("--output", help="Write the report to this file instead of stdout")
    common.add_argument("--format", choices=["json", "text"], help="Report format")
    common.add_argument("--projector", choices=["simplified", "full"], help="Inner projector mode")
    common.add_argument("--depth", type=int, help="IBP search depth bound")
    common.add_argument("--tol", type=float, help="Relative quadrature tolerance")
    common.add_argument("--seed", type=int, help="Monte Carlo seed")
    common.add_argument("--samples", type=int, help="Monte Carlo sample count")

    parser = argparse.ArgumentParser(description="VPD Workbench")
    sub = parser.add_subparsers(dest="mode", required=True)

    verify = sub.add_parser("verify", parents=[common], help="Run a check suite")
    verify.add_argument("suite", choices=SUITE_NAMES, help="Suite name")
    verify.set_defaults(handler=run_verify)

    basis = sub.add_parser("basis", parents=[common], help="Counterterm operator basis")
    basis.add_argument("action", choices=["enumerate", "solve", "match"])
    basis.add_argument("--sector", default="ghost", choices=["ghost", "NL", "gauge-matter"])
    basis.add_argument("--max-dim", type=int, default=4)
    basis.set_defaults(handler=run_basis)

    feynman = sub.add_parser("feynman", parents=[common], help="Feynman rules and diagrams")
    feynman.add_argument("action", choices=["vertex", "propagator", "contract"])
    feynman.add_argument("--kind", default="AAA", choices=["AAA", "AAAA", "ghost-A"])
    feynman.add_argument("--species", default="gauge", choices=["gauge", "ghost"])
    feynman.add_argument("--diagram", help="Diagram description (JSON)")
    feynman.add_argument("--variant", choices=["consistent", "printed"], help="Ghost-gauge vertex variant")
    feynman.set_defaults(handler=run_feynman)

    omega = sub.add_parser("omega", parents=[common], help="Regularized shell integrals")
    omega.add_argument("--k", type=parse_ks, help="k values, e.g. 0..4 (default: 0..k_max)")
    omega.add_argument("--method", default="closed", choices=sorted(METHOD_NAMES))
    omega.add_argument("--bless", action="store_true", help="Regenerate golden/omega.json")
    omega.set_defaults(handler=run_omega)

    beta = sub.add_parser("beta", parents=[common], help="One-loop beta function")
    beta.add_argument("--model", default="pure", choices=["pure", "sm"])
    beta.add_argument("--g", type=float, nargs="+", default=[0.1], help="Coupling values")
    beta.set_defaults(handler=run_beta)

    report = sub.add_parser("report", parents=[common], help="Validate and re-render a report file")
    report.add_argument("path")
    report.set_defaults(handler=run_report)

    serve = sub.add_parser("serve", parents=[common], help="Run the report API")
    serve.set_defaults(handler=run_serve)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    import jsonschema
    from pydantic import ValidationError
    from symbolic import NonConvergenceError, WorkbenchError

    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE
    args.argv = argv
    logging.basicConfig(level=getattr(logging, args.log_level),
                        format="%(asctime)s %(levelname)s %(name)s: %(message)s", stream=sys.stderr)

    try:
        settings = load_settings(args)
        return args.handler(args, settings)
    except NonConvergenceError as e:
        print(f"Numerical integration did not converge: {e}", file=sys.stderr)
        return EXIT_NON_CONVERGENCE
    except ValidationError as e:
        print(f"Invalid configuration: {e}", file=sys.stderr)
        return EXIT_USAGE
    except jsonschema.ValidationError as e:
        print(f"Invalid report: {e.message}", file=sys.stderr)
        return EXIT_USAGE
    except (WorkbenchError, OSError, ValueError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
