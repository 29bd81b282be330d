"""Command-line front end.

Exit codes: 0 success, 1 validation failure, 2 runtime or solver failure.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path

from . import __version__
from .errors import HazardGridError
from .hazards import HazardType, risk_table_to_csv
from .report import RESULTS_FILE, read_results, render_study_charts, write_results
from .resilience import summarize_study
from .scenarios import outage_summary_csv, summarize_outages, write_scenarios
from .study import ConfigError, StudyConfig, load_config, load_inputs, parse_days, run_study, generate_scenarios

log = logging.getLogger("hazardgrid")

EXIT_OK, EXIT_INVALID, EXIT_RUNTIME = 0, 1, 2

RISK_FILE = "risk.csv"
SCENARIOS_FILE = "scenarios.jsonl"
OUTAGE_SUMMARY_FILE = "outage_summary.csv"


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", required=True, type=Path, help="study configuration (JSON)")
    common.add_argument("--seed", type=int)
    common.add_argument("--scenarios", type=int, help="scenarios per hazard-day")
    common.add_argument("--hazard", action="append", choices=[h.value for h in HazardType], help="repeatable")
    common.add_argument("--days", help="inclusive day range A..B")
    common.add_argument("--plan", type=Path, help="undergrounding plan (JSON)")
    common.add_argument("--out", type=Path, help="output directory")
    common.add_argument("--parallel", type=int, help="worker processes")
    common.add_argument("--trace", action="store_true", default=None, help="record per-line draws")
    common.add_argument("--enforce-gen-min", action="store_true", default=None)
    common.add_argument("--lp-tol", type=float)
    common.add_argument("-v", "--verbose", action="store_true")

    parser = argparse.ArgumentParser(prog="hazardgrid", description="Multi-hazard line-outage load-shed studies.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("validate", parents=[common], help="check all inputs without solving")
    sub.add_parser("risk", parents=[common], help="write the daily county risk table")
    sub.add_parser("scenarios", parents=[common], help="write outage scenarios and outage statistics")
    sub.add_parser("run", parents=[common], help="run the full study")
    sub.add_parser("report", parents=[common], help="rebuild summary and charts from results.csv")
    return parser


def resolve_config(args: argparse.Namespace) -> StudyConfig:
    config = load_config(args.config)
    return config.with_overrides(
        seed=args.seed,
        scenarios_per_day=args.scenarios,
        hazards=tuple(HazardType.parse(h) for h in args.hazard) if args.hazard else None,
        days=parse_days(args.days) if args.days else None,
        plan=args.plan,
        out=args.out,
        parallel=args.parallel,
        trace=args.trace,
        enforce_gen_min=args.enforce_gen_min,
        lp_tol=args.lp_tol,
    )


def _load(config: StudyConfig):
    inputs, findings = load_inputs(config)
    for f in findings:
        print(f"finding: {f}", file=sys.stderr)
    return inputs, findings


def cmd_validate(config: StudyConfig) -> int:
    inputs, findings = _load(config)
    if findings:
        print(f"{len(findings)} finding(s)")
        return EXIT_INVALID
    print(
        f"ok: {len(inputs.network.buses)} buses, {len(inputs.network.lines)} lines, "
        f"{len(inputs.regions)} regions, {len(inputs.days)} days"
    )
    return EXIT_OK


def _write(out: Path, files: dict[str, str]) -> None:
    out.mkdir(parents=True, exist_ok=True)
    for name, text in files.items():
        (out / name).write_text(text, encoding="utf-8")


def cmd_risk(config: StudyConfig) -> int:
    inputs, findings = _load(config)
    if findings:
        return EXIT_INVALID
    _write(config.out, {RISK_FILE: risk_table_to_csv(inputs.risk)})
    return EXIT_OK


def cmd_scenarios(config: StudyConfig) -> int:
    inputs, findings = _load(config)
    if findings:
        return EXIT_INVALID
    scenarios = generate_scenarios(config, inputs)
    _write(
        config.out,
        {
            SCENARIOS_FILE: write_scenarios(scenarios),
            OUTAGE_SUMMARY_FILE: outage_summary_csv(summarize_outages(scenarios), config.hazards),
        },
    )
    return EXIT_OK


def cmd_run(config: StudyConfig) -> int:
    inputs, findings = _load(config)
    if findings:
        return EXIT_INVALID
    stage = "solve"
    try:
        scenarios, results = run_study(config, inputs)
        stage = "summarize"
        summary = summarize_study(results, inputs.network, inputs.profile)
        stage = "report"
        extra = {
            RISK_FILE: risk_table_to_csv(inputs.risk),
            SCENARIOS_FILE: write_scenarios(scenarios),
            OUTAGE_SUMMARY_FILE: outage_summary_csv(summarize_outages(scenarios), config.hazards),
        }
        extra.update(render_study_charts(results))
        digests = write_results(results, summary, config.out, extra)
    except (HazardGridError, OSError) as exc:
        log.error("stage %s failed: %s", stage, exc)
        return EXIT_RUNTIME
    log.info("wrote %d files to %s", len(digests), config.out)
    return EXIT_OK


def cmd_report(config: StudyConfig) -> int:
    inputs, findings = _load(config)
    if findings:
        return EXIT_INVALID
    try:
        results = read_results((config.out / RESULTS_FILE).read_text(encoding="utf-8"))
        summary = summarize_study(results, inputs.network, inputs.profile)
        extra = {}
        for name in (RISK_FILE, SCENARIOS_FILE, OUTAGE_SUMMARY_FILE):
            path = config.out / name
            if path.exists():
                extra[name] = path.read_text(encoding="utf-8")
        extra.update(render_study_charts(results))
        write_results(results, summary, config.out, extra)
    except (HazardGridError, OSError) as exc:
        log.error("stage report failed: %s", exc)
        return EXIT_RUNTIME
    return EXIT_OK


COMMANDS = {
    "validate": cmd_validate,
    "risk": cmd_risk,
    "scenarios": cmd_scenarios,
    "run": cmd_run,
    "report": cmd_report,
}


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
        stream=sys.stderr,
    )
    try:
        config = resolve_config(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    return COMMANDS[args.command](config)


if __name__ == "__main__":
    sys.exit(main())
