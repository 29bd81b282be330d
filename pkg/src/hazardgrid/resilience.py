"""Pre/post undergrounding evaluation and study-level load-shed metrics."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .dcopf import SolveOptions, LoadShedLP
from .errors import ReferenceIntegrityError, SchemaError, SolveFailure
from .hazards import HazardType, hazard_sort_key
from .network import DemandProfile, Network
from .scenarios import OutageScenario


@dataclass(frozen=True)
class UndergroundPlan:
    plan_id: str
    lines: tuple[str, ...]

    def __post_init__(self):
        if len(set(self.lines)) != len(self.lines):
            raise SchemaError("plan lines must be duplicate-free", entity=self.plan_id)
        object.__setattr__(self, "lines", tuple(sorted(self.lines)))

    def validate(self, network: Network) -> None:
        unknown = sorted(set(self.lines).difference(network.lines))
        if unknown:
            raise ReferenceIntegrityError(f"plan references unknown line(s) {unknown}", entity=self.plan_id)


def parse_plan(text: str, network: Network | None = None) -> UndergroundPlan:
    """Parse ``{"plan_id": ..., "lines": [...]}``; validate against ``network`` if given."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError(f"invalid JSON: {exc.msg}", locator=f"line {exc.lineno} column {exc.colno}") from exc
    if not isinstance(doc, dict):
        raise SchemaError("plan must be an object")
    plan_id = doc.get("plan_id")
    lines = doc.get("lines")
    if not isinstance(plan_id, str):
        raise SchemaError("missing string field 'plan_id'")
    if not isinstance(lines, list) or not all(isinstance(l, str) for l in lines):
        raise SchemaError("'lines' must be an array of line ids", entity=plan_id)
    seen = set()
    for i, l in enumerate(lines):
        if l in seen:
            raise SchemaError("duplicate line id in plan", locator=f"lines[{i}]", entity=l)
        seen.add(l)
    plan = UndergroundPlan(plan_id, tuple(lines))
    if network is not None:
        plan.validate(network)
    return plan


def serialize_plan(plan: UndergroundPlan) -> str:
    return json.dumps({"plan_id": plan.plan_id, "lines": list(plan.lines)}, indent=2) + "\n"


def apply_plan(outaged: Iterable[str], plan: UndergroundPlan | None, network: Network | None = None) -> tuple[str, ...]:
    """Lines still out once undergrounded lines are removed, sorted."""
    outaged = set(outaged)
    if network is not None:
        unknown = sorted(outaged.difference(network.lines))
        if unknown:
            raise ReferenceIntegrityError(f"unknown outaged line(s) {unknown}")
        if plan is not None:
            plan.validate(network)
    if plan is None:
        return tuple(sorted(outaged))
    return tuple(sorted(outaged.difference(plan.lines)))


@dataclass(frozen=True)
class ScenarioResult:
    """Outcome of one scenario. Post fields are ``None`` when no plan was given."""

    hazard: HazardType
    day: int
    k: int
    pre_shed: float
    post_shed: float | None
    pre_outage_count: int
    post_outage_count: int | None
    overlap_count: int | None

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.hazard.order, self.day, self.k)

    @property
    def fully_prevented(self) -> bool:
        return bool(self.overlap_count) and self.post_outage_count == 0


class ShedEvaluator:
    """Daily load shed with memoised hourly solves.

    Hourly demand is ``base * multiplier``, so an hourly LP is fully determined
    by the outage set and the multiplier; identical pairs are solved once.
    Instances are per-process and not meant to be shared across threads.
    """

    def __init__(self, network: Network, profile: DemandProfile, options: SolveOptions = SolveOptions()):
        self.network = network
        self.profile = profile
        self.options = options
        self._lps: dict[frozenset[str], LoadShedLP] = {}
        self._hourly: dict[tuple[frozenset[str], float], float] = {}
        self.solves = 0

    def hourly_shed(self, outaged: frozenset[str], multiplier: float, *, day: int, hour: int) -> float:
        key = (outaged, multiplier)
        if key not in self._hourly:
            lp = self._lps.get(outaged)
            if lp is None:
                lp = self._lps[outaged] = LoadShedLP(self.network, outaged, self.options.enforce_gen_min)
            demand = {b: self.network.base_demand(b) * multiplier for b in self.network.buses}
            report, sol = lp.solve(hour, demand, self.options.tolerance)
            self.solves += 1
            if sol is None:
                raise SolveFailure(f"hourly solve {report.status.value}: {report.message}", report, day=day, hour=hour)
            self._hourly[key] = sol.objective_shed
        return self._hourly[key]

    def daily_shed(self, day: int, outaged: Iterable[str]) -> float:
        outaged = frozenset(outaged)
        unknown = outaged.difference(self.network.lines)
        if unknown:
            raise ReferenceIntegrityError(f"unknown outaged line(s) {sorted(unknown)}")
        mult = self.profile.for_day(day)
        return math.fsum(self.hourly_shed(outaged, m, day=day, hour=h) for h, m in enumerate(mult))


def evaluate_scenario(
    network: Network,
    profile: DemandProfile,
    scenario: OutageScenario,
    plan: UndergroundPlan | None = None,
    options: SolveOptions = SolveOptions(),
    evaluator: ShedEvaluator | None = None,
) -> ScenarioResult:
    if evaluator is None:
        evaluator = ShedEvaluator(network, profile, options)
    tags = {"hazard": scenario.hazard.value, "day": scenario.day, "k": scenario.k}
    try:
        pre = evaluator.daily_shed(scenario.day, scenario.outaged_lines)
        if plan is None:
            return ScenarioResult(
                scenario.hazard, scenario.day, scenario.k, pre, None, len(scenario.outaged_lines), None, None
            )
        remaining = apply_plan(scenario.outaged_lines, plan, network)
        overlap = len(scenario.outaged_lines) - len(remaining)
        # same outage set as pre: reuse the value instead of re-solving
        post = pre if overlap == 0 else evaluator.daily_shed(scenario.day, remaining)
    except SolveFailure as exc:
        raise SolveFailure(exc.message, exc.report, **{**exc.context, **tags}) from exc
    return ScenarioResult(
        scenario.hazard, scenario.day, scenario.k, pre, post, len(scenario.outaged_lines), len(remaining), overlap
    )


@dataclass(frozen=True)
class ShedStats:
    min: float
    q1: float
    median: float
    q3: float
    max: float
    mean: float

    @classmethod
    def of(cls, samples: Iterable[float]) -> "ShedStats":
        x = np.asarray(list(samples), dtype=float)
        if x.size == 0:
            return cls(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
        q = np.percentile(x, [0, 25, 50, 75, 100], method="linear")
        lo, hi = float(q[0]), float(q[4])
        # fsum/n can land one ulp outside [min, max] for constant samples
        mean = min(max(math.fsum(x) / x.size, lo), hi)
        return cls(*(float(v) for v in q), mean)


@dataclass(frozen=True)
class DaySummary:
    hazard: HazardType
    day: int
    scenarios: int
    daily_demand_mwh: float
    pre: ShedStats
    post: ShedStats | None
    mean_delta: float | None
    pre_shed_fraction: float
    post_shed_fraction: float | None
    mean_pre_outages: float
    scenarios_with_overlap: int
    fully_prevented: int


@dataclass(frozen=True)
class HazardCounts:
    scenarios: int
    scenarios_with_outages: int
    scenarios_with_overlap: int
    fully_prevented: int


@dataclass(frozen=True)
class StudySummary:
    days: tuple[DaySummary, ...]
    hazards: dict[HazardType, HazardCounts]


def daily_demand_mwh(network: Network, profile: DemandProfile, day: int) -> float:
    return network.total_base_demand() * math.fsum(profile.for_day(day))


def _fraction(shed: float, demand: float) -> float:
    if demand <= 0:
        return 0.0
    return min(max(shed / demand, 0.0), 1.0)


def summarize_study(results: Iterable[ScenarioResult], network: Network, profile: DemandProfile) -> StudySummary:
    """Per (hazard, day) shed distributions and per-hazard overlap counts."""
    groups: dict[tuple[HazardType, int], list[ScenarioResult]] = {}
    for r in sorted(results, key=lambda r: r.key):
        groups.setdefault((r.hazard, r.day), []).append(r)

    days = []
    counts: dict[HazardType, list[int]] = {}
    for (hazard, day), rows in groups.items():
        demand = daily_demand_mwh(network, profile, day)
        pre = ShedStats.of(r.pre_shed for r in rows)
        has_post = all(r.post_shed is not None for r in rows)
        post = ShedStats.of(r.post_shed for r in rows) if has_post else None
        delta = math.fsum(r.pre_shed - r.post_shed for r in rows) / len(rows) if has_post else None
        overlap = sum(1 for r in rows if r.overlap_count)
        prevented = sum(1 for r in rows if r.fully_prevented)
        days.append(
            DaySummary(
                hazard=hazard,
                day=day,
                scenarios=len(rows),
                daily_demand_mwh=demand,
                pre=pre,
                post=post,
                mean_delta=delta,
                pre_shed_fraction=_fraction(pre.mean, demand),
                post_shed_fraction=_fraction(post.mean, demand) if post is not None else None,
                mean_pre_outages=sum(r.pre_outage_count for r in rows) / len(rows),
                scenarios_with_overlap=overlap,
                fully_prevented=prevented,
            )
        )
        c = counts.setdefault(hazard, [0, 0, 0, 0])
        c[0] += len(rows)
        c[1] += sum(1 for r in rows if r.pre_outage_count > 0)
        c[2] += overlap
        c[3] += prevented

    hazards = {h: HazardCounts(*counts[h]) for h in sorted(counts, key=hazard_sort_key)}
    return StudySummary(tuple(days), hazards)


def baseline_daily_shed(network: Network, profile: DemandProfile, day: int, options: SolveOptions = SolveOptions()) -> float:
    """Daily shed with every line in service."""
    return ShedEvaluator(network, profile, options).daily_shed(day, ())

