#!/usr/bin/env python3
"""
Command-line entry point for negative-control-outcome effect estimation
Analyzes subject-level CSV files and runs Monte Carlo studies over scenario presets

Exit codes: 0 success, 2 invalid input or configuration, 3 estimation failure.
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Optional, Sequence

from src.core.entities.analysis_options import AnalysisOptions
from src.core.entities.errors import NCOError, ValidationError
from src.core.entities.estimate_result import EstimationMethod
from src.core.entities.regression_spec import Augmentation, RegressionSpec
from src.core.entities.strata import StratumSpec
from src.core.entities.subject_data import CovariateKind
from src.infrastructure.config.settings import settings
from src.main.app import app as nco_app

logger = logging.getLogger("nco")


def _methods(text: str) -> List[EstimationMethod]:
    try:
        return [EstimationMethod(part.strip()) for part in text.split(",") if part.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"{e}; expected any of {', '.join(m.value for m in EstimationMethod)}")


def _method(text: str) -> EstimationMethod:
    methods = _methods(text)
    if len(methods) != 1:
        raise argparse.ArgumentTypeError("exactly one method expected")
    return methods[0]


def _cuts(entries: Optional[Sequence[str]]) -> Dict[str, List[float]]:
    """`age=18,20` -> {"age": [18.0, 20.0]}"""
    cuts = {}
    for entry in entries or ():
        name, sep, values = entry.partition("=")
        if not sep or not name.strip():
            raise ValidationError(f"--cuts expects name=a,b,..., got '{entry}'")
        try:
            cuts[name.strip()] = [float(v) for v in values.split(",") if v.strip()]
        except ValueError:
            raise ValidationError(f"--cuts values must be numbers, got '{values}'") from None
    return cuts


def _covariates(text: Optional[str]) -> Optional[Dict[str, CovariateKind]]:
    """`site:categorical,age:numeric`"""
    if not text:
        return None
    schema = {}
    for part in text.split(","):
        name, sep, kind = part.partition(":")
        try:
            schema[name.strip()] = CovariateKind(kind.strip().lower())
        except ValueError:
            raise ValidationError(f"--covariates expects name:categorical|numeric, got '{part}'") from None
    return schema


def _progress(args: argparse.Namespace) -> bool:
    return not args.quiet and sys.stderr.isatty()


def cmd_simulate(args: argparse.Namespace) -> int:
    study = settings.study_config
    outcome = nco_app.get_study_use_case().run_study(
        scenario=args.scenario,
        methods=args.methods,
        reps=args.reps if args.reps is not None else study.reps,
        seed=args.seed if args.seed is not None else study.seed,
        workers=args.workers if args.workers is not None else study.workers,
        n=args.n,
        out_dir=Path(args.out or study.output_dir),
        bootstrap_replicates=args.bootstrap_reps,
        dump_first=args.dump_first,
        progress=_progress(args),
    )
    summary = outcome.summary
    print(f"scenario {summary.scenario} ({summary.design}), n={summary.n}, reps={summary.reps}, "
          f"true beta1={summary.true_beta1:.5f}")
    header = f"{'method':<10} {'ok':>5} {'fail':>5} {'bias':>9} {'variance':>10} {'var ratio':>9} {'coverage':>8} {'mean SE':>8}"
    print(header)
    for row in summary.methods:
        print(f"{row.method:<10} {row.successes:>5} {row.failures:>5} {_num(row.bias, 9, 4)} "
              f"{_num(row.empirical_variance, 10, 5)} {_num(row.variance_ratio, 9, 3)} "
              f"{_num(row.coverage, 8, 3)} {_num(row.mean_std_err, 8, 4)}")
    print(f"wrote {outcome.reps_path} and {outcome.summary_path}")
    return 0


def cmd_analyze(args: argparse.Namespace) -> int:
    options = AnalysisOptions(
        strata=StratumSpec(
            keys=tuple(k.strip() for k in (args.strata or "").split(",") if k.strip()),
            numeric_cuts=_cuts(args.cuts),
        ),
        regression=RegressionSpec.parse(args.regress) if args.regress else RegressionSpec(),
        augmentation=Augmentation.parse(args.augment),
        ci_level=args.ci,
        bootstrap_replicates=args.bootstrap_reps,
        bootstrap_seed=args.seed,
        progress=_progress(args),
    )
    column_map = {}
    if args.y1_column:
        column_map["y1"] = args.y1_column
    if args.y2_type_prefix:
        column_map["y2_type_prefix"] = args.y2_type_prefix

    report = nco_app.get_analysis_use_case().analyze(
        args.input,
        args.method,
        options=options,
        schema=_covariates(args.covariates),
        column_map=column_map,
        out_path=args.out,
    )
    print(report.to_table())
    if args.out:
        print(f"wrote {args.out}")
    return 0


def cmd_plotdata(args: argparse.Namespace) -> int:
    methods = args.methods.split(",") if args.methods is not None else None
    frame = nco_app.get_plot_data_use_case().emit_plot_data(args.input, args.out, methods)
    print(f"wrote {len(frame)} rows to {args.out}")
    return 0


def cmd_presets(args: argparse.Namespace) -> int:
    presets = nco_app.get_scenario_repository().list_presets()
    if args.json:
        print(json.dumps([p.summary() for p in presets], indent=2))
        return 0
    print(f"{'name':<28} {'design':<14} {'incidences':<14} {'a values':<14} path")
    for preset in presets:
        info = preset.summary()
        incidences = ",".join(f"{p:g}" for p in info["target_incidences"])
        a_values = ",".join(f"{a:g}" for a in info["a_values"])
        print(f"{info['name']:<28} {info['design']:<14} {incidences:<14} {a_values:<14} {info['path']}")
    return 0


def _num(value: Optional[float], width: int, digits: int) -> str:
    return f"{'n/a':>{width}}" if value is None else f"{value:>{width}.{digits}f}"


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="nco",
        description="Negative-control-outcome estimators for vaccine efficacy, and a simulation harness",
    )
    parser.add_argument("--log-level", default=settings.log_level, help="logging level (default: %(default)s)")
    subparsers = parser.add_subparsers(dest="command", required=True)

    simulate = subparsers.add_parser("simulate", help="run a Monte Carlo study over a scenario preset")
    simulate.add_argument("--scenario", required=True, help="preset name (see `presets list`) or path to a preset file")
    simulate.add_argument("--n", type=int, help="cohort size (default: the preset's N)")
    simulate.add_argument("--reps", type=int, help=f"replications (default: {settings.study_config.reps})")
    simulate.add_argument("--seed", type=int, help=f"study seed (default: {settings.study_config.seed})")
    simulate.add_argument("--methods", type=_methods, help="comma-separated methods (default: by design)")
    simulate.add_argument("--workers", type=int, help="worker processes (default: 1)")
    simulate.add_argument("--out", help=f"output directory (default: {settings.study_config.output_dir})")
    simulate.add_argument("--bootstrap-reps", type=int, help="bootstrap replicates for mh and joint_mh")
    simulate.add_argument("--dump-first", type=int, default=0, metavar="K", help="also write the first K cohorts as CSV")
    simulate.add_argument("--quiet", action="store_true", help="no progress bar")
    simulate.set_defaults(handler=cmd_simulate)

    analyze = subparsers.add_parser("analyze", help="estimate the treatment effect in a subject CSV")
    analyze.add_argument("--input", required=True, help="subject-level CSV")
    analyze.add_argument("--method", required=True, type=_method, help="estimation method")
    analyze.add_argument("--strata", help="comma-separated stratum keys")
    analyze.add_argument("--cuts", action="append", metavar="NAME=A,B,...", help="cut points of a numeric stratum key")
    analyze.add_argument("--regress", help="primary=<terms>,secondary=<terms>; terms like age+age^2+C(site)")
    analyze.add_argument("--augment", default="y2", help="y2 | w | y2w (method aug only; default: %(default)s)")
    analyze.add_argument("--ci", type=float, help=f"confidence level (default: {settings.ci_level})")
    analyze.add_argument("--covariates", help="name:categorical|numeric,... (default: inferred)")
    analyze.add_argument("--y1-column", help="column holding the primary outcome (default: y1)")
    analyze.add_argument("--y2-type-prefix", help="sum the columns with this prefix into y2")
    analyze.add_argument("--bootstrap-reps", type=int, help="bootstrap replicates for mh and joint_mh")
    analyze.add_argument("--seed", type=int, help="bootstrap seed")
    analyze.add_argument("--out", help="JSON report path (a .txt table is written next to it)")
    analyze.add_argument("--quiet", action="store_true", help="no progress bar")
    analyze.set_defaults(handler=cmd_analyze)

    plotdata = subparsers.add_parser("plotdata", help="long-format estimates from reps.csv for plotting")
    plotdata.add_argument("--input", required=True, help="reps.csv written by simulate")
    plotdata.add_argument("--out", required=True, help="output CSV")
    plotdata.add_argument("--methods", help="comma-separated subset of methods")
    plotdata.set_defaults(handler=cmd_plotdata)

    presets = subparsers.add_parser("presets", help="scenario presets")
    presets_sub = presets.add_subparsers(dest="presets_command", required=True)
    presets_list = presets_sub.add_parser("list", help="list shipped presets")
    presets_list.add_argument("--json", action="store_true", help="machine-readable output")
    presets_list.set_defaults(handler=cmd_presets)
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=args.log_level.upper(),
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    logger.debug("configuration: %s", nco_app.get_service_status())
    try:
        return args.handler(args)
    except NCOError as e:
        logger.error("%s: %s", type(e).__name__, e)
        return e.exit_code


if __name__ == "__main__":
    sys.exit(main())
