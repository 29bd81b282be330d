"""Study configuration, input loading/validation, and the end-to-end pipeline.

The pipeline is risk -> scenarios -> hourly solves -> pre/post evaluation ->
reports. Work is split into (hazard, day) tasks; each task draws its
scenarios and evaluates them, and results are reassembled in sorted
(hazard, day, k) order, so the output does not depend on the worker count.
"""

from __future__ import annotations

import json
import logging
import re
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Iterable

from .dcopf import DEFAULT_LP_TOL, SolveOptions
from .errors import HazardGridError, SchemaError
from .geo import LineRegionIndex, RegionSet, map_lines_to_counties, parse_regions
from .hazards import HazardType, RiskTable, compute_risk_table, hazard_sort_key, parse_outage_records, parse_storm_events
from .network import DemandProfile, Network, parse_demand_profile, parse_network
from .resilience import ScenarioResult, ShedEvaluator, UndergroundPlan, evaluate_scenario, parse_plan
from .scenarios import BetaPrimeParams, OutageScenario, ScenarioConfig, generate_day

log = logging.getLogger(__name__)

PATH_KEYS = ("network", "regions", "outages", "storms", "profile")


class ConfigError(HazardGridError, ValueError):
    pass


def parse_days(text: str) -> tuple[int, int]:
    m = re.fullmatch(r"\s*(\d+)\s*\.\.\s*(\d+)\s*", str(text))
    if not m:
        raise ConfigError(f"day range {text!r} must look like A..B")
    lo, hi = int(m.group(1)), int(m.group(2))
    if not 1 <= lo <= hi <= 365:
        raise ConfigError(f"day range {text!r} must satisfy 1 <= A <= B <= 365")
    return lo, hi


@dataclass(frozen=True)
class StudyConfig:
    network: Path
    regions: Path
    outages: Path
    storms: Path
    profile: Path
    plan: Path | None = None
    out: Path = Path("out")
    seed: int = 0
    scenarios_per_day: int = 100
    alpha: float = 0.02
    beta: float = 3.0
    hazards: tuple[HazardType, ...] = tuple(HazardType)
    days: tuple[int, int] | None = None
    parallel: int = 1
    trace: bool = False
    enforce_gen_min: bool = False
    lp_tol: float = DEFAULT_LP_TOL

    def __post_init__(self):
        if self.scenarios_per_day < 1:
            raise ConfigError("scenarios_per_day must be >= 1")
        if not self.hazards:
            raise ConfigError("hazard filter must not be empty")
        if self.parallel < 1:
            raise ConfigError("parallel must be >= 1")
        try:
            self.scenario_config
            self.solve_options
        except ValueError as exc:
            raise ConfigError(str(exc)) from None
        object.__setattr__(self, "hazards", tuple(sorted(set(self.hazards), key=hazard_sort_key)))

    @property
    def scenario_config(self) -> ScenarioConfig:
        return ScenarioConfig(self.seed, self.scenarios_per_day, BetaPrimeParams(self.alpha, self.beta))

    @property
    def solve_options(self) -> SolveOptions:
        return SolveOptions(self.lp_tol, self.enforce_gen_min)

    @classmethod
    def from_dict(cls, doc: dict[str, Any], base_dir: Path = Path(".")) -> "StudyConfig":
        known = set(cls.__dataclass_fields__)
        unknown = set(doc).difference(known)
        if unknown:
            raise ConfigError(f"unknown config keys {sorted(unknown)}")
        missing = [k for k in PATH_KEYS if k not in doc]
        if missing:
            raise ConfigError(f"config missing path(s) {missing}")
        kw: dict[str, Any] = {}
        for key in PATH_KEYS + ("plan", "out"):
            if doc.get(key) is not None:
                kw[key] = base_dir / doc[key]
        try:
            for key in ("seed", "scenarios_per_day", "parallel"):
                if key in doc:
                    kw[key] = int(doc[key])
            for key in ("alpha", "beta", "lp_tol"):
                if key in doc:
                    kw[key] = float(doc[key])
            for key in ("trace", "enforce_gen_min"):
                if key in doc:
                    kw[key] = bool(doc[key])
            if "hazards" in doc:
                kw["hazards"] = tuple(HazardType.parse(h) for h in doc["hazards"])
            if doc.get("days") is not None:
                kw["days"] = parse_days(doc["days"])
        except (TypeError, ValueError, SchemaError) as exc:
            raise ConfigError(f"bad config value: {exc}") from None
        return cls(**kw)

    def with_overrides(self, **overrides) -> "StudyConfig":
        return replace(self, **{k: v for k, v in overrides.items() if v is not None})


def load_config(path: str | Path) -> StudyConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ConfigError("config must be a JSON object")
    return StudyConfig.from_dict(doc, path.parent)


@dataclass(frozen=True)
class Finding:
    file: str
    entity: str
    rule: str

    def __str__(self) -> str:
        return f"{self.file}: {self.entity}: {self.rule}"


@dataclass
class StudyInputs:
    network: Network
    regions: RegionSet
    index: LineRegionIndex
    risk: RiskTable
    profile: DemandProfile
    plan: UndergroundPlan | None
    days: list[int] = field(default_factory=list)


def _read(path: Path, findings: list[Finding]) -> str | None:
    try:
        return path.read_text(encoding="utf-8")
    except OSError as exc:
        findings.append(Finding(str(path), "-", f"cannot read file: {exc.strerror}"))
        return None


def _parse(path: Path, parser, findings: list[Finding], *args):
    text = _read(path, findings)
    if text is None:
        return None
    try:
        return parser(text, *args)
    except SchemaError as exc:
        entity = exc.entity or exc.locator or "-"
        where = f" at {exc.locator}" if exc.locator and exc.entity else ""
        findings.append(Finding(str(path), entity, exc.message + where))
        return None


def load_inputs(config: StudyConfig) -> tuple[StudyInputs | None, list[Finding]]:
    """Parse and cross-check every input. Returns inputs only when there are no findings."""
    findings: list[Finding] = []
    network = _parse(config.network, parse_network, findings)
    regions = _parse(config.regions, parse_regions, findings)
    outages = _parse(config.outages, parse_outage_records, findings)
    calendar = _parse(config.storms, parse_storm_events, findings)
    profile = _parse(config.profile, parse_demand_profile, findings)
    plan = _parse(config.plan, parse_plan, findings) if config.plan is not None else None

    if network is not None and plan is not None:
        for line_id in plan.lines:
            if line_id not in network.lines:
                findings.append(Finding(str(config.plan), line_id, "plan references a line not in the network"))

    days: list[int] = []
    if profile is not None:
        if config.days is not None:
            days = list(range(config.days[0], config.days[1] + 1))
            for d in days:
                if d not in profile.multipliers:
                    findings.append(Finding(str(config.profile), f"day {d}", "day in study range missing from profile"))
        else:
            days = profile.days

    if findings:
        return None, findings
    index = map_lines_to_counties(network, regions)
    risk = compute_risk_table(outages, calendar.restricted_to(config.hazards))
    return StudyInputs(network, regions, index, risk, profile, plan, days), findings


def study_tasks(config: StudyConfig, inputs: StudyInputs) -> list[tuple[HazardType, int]]:
    return [(h, d) for h in config.hazards for d in inputs.days]


def generate_scenarios(config: StudyConfig, inputs: StudyInputs) -> list[OutageScenario]:
    out = []
    for hazard, day in study_tasks(config, inputs):
        out.extend(generate_day(hazard, day, inputs.risk.slice(hazard, day), inputs.index, config.scenario_config, trace=config.trace))
    return out


# per-process state for worker pools
_worker: dict[str, Any] = {}


def _init_worker(config: StudyConfig, inputs: StudyInputs) -> None:
    _worker["config"] = config
    _worker["inputs"] = inputs
    _worker["evaluator"] = ShedEvaluator(inputs.network, inputs.profile, config.solve_options)


def _run_task(task: tuple[HazardType, int]) -> tuple[list[OutageScenario], list[ScenarioResult]]:
    config: StudyConfig = _worker["config"]
    inputs: StudyInputs = _worker["inputs"]
    hazard, day = task
    scenarios = generate_day(hazard, day, inputs.risk.slice(hazard, day), inputs.index, config.scenario_config, trace=config.trace)
    results = [
        evaluate_scenario(inputs.network, inputs.profile, s, inputs.plan, config.solve_options, _worker["evaluator"])
        for s in scenarios
    ]
    return scenarios, results


def run_study(config: StudyConfig, inputs: StudyInputs) -> tuple[list[OutageScenario], list[ScenarioResult]]:
    tasks = study_tasks(config, inputs)
    log.info("evaluating %d hazard-days x %d scenarios with %d worker(s)", len(tasks), config.scenarios_per_day, config.parallel)
    if config.parallel == 1:
        _init_worker(config, inputs)
        chunks = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(config.parallel, initializer=_init_worker, initargs=(config, inputs)) as pool:
            chunks = list(pool.map(_run_task, tasks))
    scenarios = sorted((s for chunk, _ in chunks for s in chunk), key=lambda s: s.key)
    results = sorted((r for _, chunk in chunks for r in chunk), key=lambda r: r.key)
    return scenarios, results
