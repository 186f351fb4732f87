#!/usr/bin/env python3
"""
Command line for the W-algebra / Frobenius manifold pipeline
"""
import argparse
import json
import logging
import sys
from typing import Dict, List, Optional, Sequence, Tuple

from walgebra import __version__
from walgebra.config import settings
from walgebra.exceptions import ConfigError, WAlgebraError
from walgebra.models.schemas import STAGES, PipelineConfig, RunReport
from walgebra.services.catalog import catalog, catalog_json, describe, lookup, parse_orbit
from walgebra.services.pipeline import run

logger = logging.getLogger("walgebra")

# (command, action) -> (last stage, report fields, certificate names); None shows everything
VIEWS: Dict[Tuple[str, Optional[str]], Tuple[str, Optional[List[str]], Optional[List[str]]]] = {
    ("slice", "invariants"): ("slice", ["special_coordinates"], ["casimirs", "normal_coordinates", "involutivity"]),
    ("slice", "brackets"): ("slice", [], ["finite_antisymmetry", "finite_jacobi", "finite_quasihomogeneity", "rank"]),
    ("slice", "N"): ("slice", ["equations", "minimal_polynomials"], ["N_presentations", "restricted_pencil"]),
    ("ds", "gauge"): ("ds", [], ["gauge_normal_form", "gauge_spot", "gauge_linearization"]),
    ("ds", "brackets"): ("ds", ["central_charge"], ["skew_symmetry", "exactness", "w_jacobi"]),
    ("ds", "leading"): ("ds", ["det_omega1"], ["leading_terms", "det_omega1"]),
    ("ds", "reduceN"): ("ds", ["equations", "minimal_polynomials"], ["reduction_to_N"]),
    ("ds", None): ("ds", ["det_omega1", "central_charge"], None),
    ("frobenius", "build"): ("frobenius", ["flat_coordinates", "potential", "charge", "degrees", "euler_field"], []),
    ("frobenius", "verify"): ("frobenius", ["charge", "degrees", "euler_field"], None),
}


def orbit_text(words: Sequence[str]) -> Tuple[str, int, str]:
    series, rank, label = parse_orbit(" ".join(words))
    lookup(series, rank, label)
    return series, rank, label


def orbit_of(args) -> Tuple[str, int, str]:
    """The orbit from the positional words or from ``--algebra`` and ``--orbit``."""
    words = list(args.orbit)
    if args.algebra:
        if words:
            raise ConfigError("give the orbit either positionally or with --algebra/--orbit, not both")
        words = [args.algebra, args.orbit_label]
    elif args.orbit_label != "a0":
        raise ConfigError("--orbit needs --algebra")
    if not words:
        raise ConfigError("no orbit given; e.g. F4 a2 or --algebra F4 --orbit a2")
    return orbit_text(words)


class ArgumentParser(argparse.ArgumentParser):
    """Usage errors exit with the configuration error code."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(ConfigError.exit_code, f"{self.prog}: error: {message}\n")


def build_config(args, through: str) -> PipelineConfig:
    series, rank, label = orbit_of(args)
    return PipelineConfig(
        series=series,
        rank=rank,
        label=label,
        stages=list(STAGES[:STAGES.index(through) + 1]),
        cache_dir=str(args.cache_dir),
        use_cache=not args.no_cache,
        full_checks=args.full_checks,
        jet_order=args.jet_order,
        label_table=args.label_table,
        output_format=args.format,
        seed=args.seed,
    )


def select(report: RunReport, fields: Optional[List[str]], names: Optional[List[str]]) -> Dict:
    data = report.model_dump()
    if fields is not None:
        keep = {"orbit", "exponents", "extra_weights", "stages", "recomputed", "certificates", *fields}
        data = {k: v for k, v in data.items() if k in keep}
    if names is not None:
        data["certificates"] = [c for c in data["certificates"] if c["name"] in names]
    return data


def render(data: Dict) -> str:
    """Plain-text report."""
    lines = [f"Orbit {data['orbit']}: exponents {data['exponents']}, extra weights {data.get('extra_weights') or '-'}"]
    lines.append(f"Stages: {', '.join(data['stages'])} (recomputed: {', '.join(data['recomputed']) or 'none'})")
    for key in ("det_omega1", "central_charge", "charge", "euler_field"):
        if data.get(key) is not None:
            lines.append(f"{key}: {data[key]}")
    if data.get("degrees"):
        lines.append(f"degrees: {', '.join(data['degrees'])}")
    for key in ("special_coordinates", "equations", "minimal_polynomials", "flat_coordinates", "notes"):
        if data.get(key):
            lines.append(f"{key}:")
            lines.extend(f"  {item}" for item in data[key])
    if data.get("potential") is not None:
        lines.append(f"potential: F = {data['potential']}")
    certificates = data.get("certificates", [])
    if certificates:
        lines.append("Certificates:")
        for c in certificates:
            status = "PASS" if c["passed"] else "FAIL"
            detail = f" ({c['detail']})" if c["detail"] else ""
            lines.append(f"  [{status}] {c['name']}{detail}")
            for failure in c["failures"][:5]:
                lines.append(f"      {failure}")
            if len(c["failures"]) > 5:
                lines.append(f"      ... {len(c['failures']) - 5} more")
    return "\n".join(lines)


def emit(data, output_format: str):
    if output_format == "json":
        print(json.dumps(data, indent=2))
    elif isinstance(data, str):
        print(data)
    else:
        print(render(data))


def cmd_catalog(args) -> int:
    if args.format == "json":
        emit(catalog_json(), "json")
    else:
        for row in catalog():
            marker = "*" if row.realized else " "
            print(f"{marker} {row.name:<10} exponents {row.exponents}  extra {row.extra_weights}")
    return 0


def cmd_describe(args) -> int:
    row = lookup(*orbit_of(args))
    emit(row.model_dump() | {"name": row.name} if args.format == "json" else describe(row), args.format)
    return 0


def cmd_pipeline(args) -> int:
    action = getattr(args, "action", None)
    if args.command in ("run", "verify"):
        through = args.through if args.command == "run" else "verify"
        fields, names = None, None
    else:
        through, fields, names = VIEWS[(args.command, action)]
    config = build_config(args, through)
    report = run(config)
    emit(select(report, fields, names), args.format)
    if not report.passed:
        failed = [c.name for c in report.certificates if not c.passed]
        logger.error("Failed certificates: %s", ", ".join(failed))
        return 2
    return 0


def add_target(p: argparse.ArgumentParser) -> None:
    p.add_argument("orbit", nargs="*", help="e.g. F4 a2, E8(a7), B 4 a2")
    p.add_argument("--algebra", help="Lie algebra, e.g. F4; combine with --orbit")
    p.add_argument("--orbit", dest="orbit_label", default="a0", help="Orbit label for --algebra (default a0)")


def build_parser() -> argparse.ArgumentParser:
    common = ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=settings.DEFAULT_SEED, help="Seed for sample points")
    common.add_argument("--full-checks", "--budget", dest="full_checks", action="store_true", default=settings.FULL_CHECKS,
                        help="Run full symbolic Jacobi / curvature / WDVV sweeps")
    common.add_argument("--jet-order", type=int, default=settings.JET_ORDER, help="Jet order of the W brackets (default 2(eta_r + 1) + 2)")
    common.add_argument("--no-cache", action="store_true", help="Recompute every stage and write nothing")
    common.add_argument("--cache-dir", default=settings.CACHE_DIR, help="Stage artifact directory")
    common.add_argument("--format", choices=["json", "text"], default=settings.OUTPUT_FORMAT, help="Output format")
    common.add_argument("--label-table", choices=["corrected", "raw"], default=settings.F4_LABEL_TABLE,
                        help="F4 label table for the explicit subregular bases")

    parser = ArgumentParser(prog="walgebra", description="Classical W-algebras and algebraic Frobenius manifolds")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("catalog", parents=[common], help="List the orbit catalog")
    p.set_defaults(handler=cmd_catalog)

    p = sub.add_parser("describe", parents=[common], help="Show one catalog row")
    add_target(p)
    p.set_defaults(handler=cmd_describe)

    p = sub.add_parser("run", parents=[common], help="Run the pipeline")
    add_target(p)
    p.add_argument("--through", choices=STAGES, default="verify", help="Last stage to run")
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("slice", parents=[common], help="Slice invariants, finite brackets or N")
    p.add_argument("action", choices=["invariants", "brackets", "N"])
    add_target(p)
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("ds", parents=[common], help="Drinfeld-Sokolov reduction")
    p.add_argument("reduce", choices=["reduce"])
    add_target(p)
    p.add_argument("--stage", dest="action", choices=["gauge", "brackets", "leading", "reduceN"], default=None)
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("frobenius", parents=[common], help="Flat coordinates and the potential")
    p.add_argument("action", choices=["build", "verify"])
    add_target(p)
    p.set_defaults(handler=cmd_pipeline)

    p = sub.add_parser("verify", parents=[common], help="Run every stage and all certificates")
    add_target(p)
    p.set_defaults(handler=cmd_pipeline)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return args.handler(args)
    except WAlgebraError as exc:
        print(f"Error: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
