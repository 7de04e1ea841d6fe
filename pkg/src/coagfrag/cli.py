"""Command-line entry point.

Subcommands::

    coagfrag example ID [--out DIR] [--override k=v]...
    coagfrag simulate --config cfg.json [--out DIR] [--override k=v]...
    coagfrag analyze  --config cfg.json [--p P] [--out DIR]
    coagfrag converge --config cfg.json --sizes 25,50,100 --ref 400
                      [--p P] [--weight W] [--out DIR]

Exit codes: 0 success, 1 configuration/validation failure (the message
names the offending field), 2 runtime integration failure (partial outputs
are preserved in the run directory).  ``COAGFRAG_THREADS`` caps the number
of concurrent integrations in a convergence study (0 = auto).
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .analysis import NormSpec, check_conditions
from .config import ConfigError, apply_overrides, load_scenario, scenario_from_dict, scenario_to_dict
from .experiments import (
    builtin_example,
    convergence_study,
    run_scenario,
    write_convergence_csv,
)
from .integrator import IntegrationError

logger = logging.getLogger("coagfrag")


def _add_common(parser: argparse.ArgumentParser, config_required: bool):
    if config_required:
        parser.add_argument("--config", required=True, help="scenario JSON file")
    parser.add_argument("--out", default="runs/out", help="output directory")
    parser.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="PATH=VALUE",
        help="override one config entry (repeatable), e.g. laws.a=2",
    )
    parser.add_argument("--grid-points", type=int, default=None, help="output grid size")
    verbosity = parser.add_mutually_exclusive_group()
    verbosity.add_argument("-v", "--verbose", action="count", default=0)
    verbosity.add_argument("-q", "--quiet", action="store_true")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="coagfrag",
        description="simulate truncated coagulation-fragmentation systems "
        "with growth, decay and sedimentation",
    )
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p_sim = sub.add_parser("simulate", help="integrate a scenario from a config file")
    _add_common(p_sim, config_required=True)

    p_ana = sub.add_parser("analyze", help="check the well-posedness hypotheses")
    _add_common(p_ana, config_required=True)
    p_ana.add_argument("--p", type=float, default=None, help="moment order (default: config norm)")
    p_ana.add_argument("--i-max", type=int, default=2000, help="largest sampled size")

    p_con = sub.add_parser("converge", help="truncation self-convergence study")
    _add_common(p_con, config_required=True)
    p_con.add_argument("--sizes", required=True, help="comma-separated truncation sizes")
    p_con.add_argument("--ref", type=int, required=True, help="reference truncation size")
    p_con.add_argument("--p", type=float, default=None, help="error-norm moment order")
    p_con.add_argument("--weight", type=float, default=None, help="error-norm weight exponent")

    p_ex = sub.add_parser("example", help="run one of the six built-in examples")
    p_ex.add_argument("id", type=int, help="example id, 1..6")
    _add_common(p_ex, config_required=False)
    return parser


def _configure_logging(args):
    if args.quiet:
        level = logging.ERROR
    elif args.verbose >= 2:
        level = logging.DEBUG
    elif args.verbose == 1:
        level = logging.INFO
    else:
        level = logging.WARNING
    logging.basicConfig(level=level, format="%(levelname)s %(name)s: %(message)s")


def _load_cfg(args):
    overrides = list(args.override)
    if args.grid_points is not None:
        overrides.append(f"output_grid_points={args.grid_points}")
    if args.subcommand == "example":
        doc = scenario_to_dict(builtin_example(args.id))
        if overrides:
            doc = apply_overrides(doc, overrides)
        return scenario_from_dict(doc)
    return load_scenario(args.config, overrides)


def _cmd_simulate(args) -> int:
    cfg = _load_cfg(args)
    logger.info("running scenario %s (N=%d) into %s", cfg.name, cfg.N, args.out)
    try:
        traj = run_scenario(cfg, args.out)
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        print(f"partial outputs preserved in {args.out}", file=sys.stderr)
        return 2
    if not args.quiet:
        m1 = traj.moments[1]
        print(
            f"{cfg.name}: {traj.stats.steps_accepted} steps, "
            f"m1 {m1[0]:.6g} -> {m1[-1]:.6g}, outputs in {args.out}"
        )
    return 0


def _cmd_analyze(args) -> int:
    cfg = _load_cfg(args)
    p = args.p if args.p is not None else max(1.0, cfg.norm.p)
    report = check_conditions(cfg.frag, cfg.coag, cfg.laws, p=p, i_max=args.i_max)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    doc = {"config": scenario_to_dict(cfg), "conditions": report.to_dict()}
    with open(out / "conditions.json", "w") as fh:
        json.dump(doc, fh, indent=2)
        fh.write("\n")
    if not args.quiet:
        frag = "pass" if report.frag_dominance.passed else "fail"
        sed = "pass" if report.sed_dominance.passed else "fail"
        omega = f"{report.omega1.value:g}" if report.omega1.finite else "unbounded"
        print(f"fragmentation dominance: {frag}")
        print(f"sedimentation dominance: {sed}")
        print(f"coagulation bound feasible: {report.coag_bound.feasible}")
        print(f"mass growth rate omega1: {omega}")
        for message in report.messages:
            print(f"note: {message}")
    return 0


def _cmd_converge(args) -> int:
    cfg = _load_cfg(args)
    try:
        sizes = [int(tok) for tok in args.sizes.split(",") if tok.strip()]
    except ValueError:
        raise ConfigError("sizes", "must be a comma-separated list of integers")
    p = args.p if args.p is not None else cfg.norm.p
    weight = args.weight if args.weight is not None else cfg.norm.weight_exp
    norm = NormSpec(p=p, weight_exp=weight)
    result = convergence_study(cfg, sizes, args.ref, norm)
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    write_convergence_csv(result, out / "convergence.csv")
    if not args.quiet:
        for n, err in zip(result.sizes, result.errors):
            print(f"N={n:5d}  error={err:.6e}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    _configure_logging(args)
    handlers = {
        "simulate": _cmd_simulate,
        "analyze": _cmd_analyze,
        "converge": _cmd_converge,
        "example": _cmd_simulate,
    }
    try:
        return handlers[args.subcommand](args)
    except (ConfigError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except IntegrationError as exc:
        print(f"integration failed: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
