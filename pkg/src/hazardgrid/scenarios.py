"""Monte Carlo line-outage scenarios driven by county risk.

Every (hazard, day, scenario k) gets its own random stream::

    SeedSequence(entropy=base_seed, spawn_key=(hazard_tag, day, k)) -> PCG64

with hazard tags wildfire=1, hurricane=2, wind=3. Scenarios are therefore
independent of each other and of the order or process they run in.

Within a scenario each line receives one beta-prime draw ``o``, taken as a
gamma ratio ``G1 / G2`` with shapes ``(alpha, beta)``. Draws are vectorised
over lines in ascending line-id order: all numerator variates first, then all
denominator variates. A line is outaged when ``o < rho`` for at least one
county it crosses.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

from .errors import ReferenceIntegrityError, SchemaError
from .geo import LineRegionIndex
from .hazards import HazardType, hazard_sort_key
from .network import Network

HAZARD_TAGS = {HazardType.WILDFIRE: 1, HazardType.HURRICANE: 2, HazardType.WIND: 3}


@dataclass(frozen=True)
class BetaPrimeParams:
    alpha: float = 0.02
    beta: float = 3.0

    def __post_init__(self):
        if not self.alpha > 0:
            raise ValueError(f"alpha must be > 0, got {self.alpha}")
        if not self.beta > 1:
            raise ValueError(f"beta must be > 1 for a finite mean, got {self.beta}")

    @property
    def mean(self) -> float:
        return self.alpha / (self.beta - 1.0)


@dataclass(frozen=True)
class ScenarioConfig:
    base_seed: int = 0
    scenarios_per_day: int = 100
    params: BetaPrimeParams = field(default_factory=BetaPrimeParams)

    def __post_init__(self):
        if not 0 <= self.base_seed < 2**64:
            raise ValueError("base_seed must be a 64-bit unsigned integer")
        if self.scenarios_per_day < 1:
            raise ValueError("scenarios_per_day must be >= 1")


@dataclass(frozen=True)
class OutageScenario:
    hazard: HazardType
    day: int
    k: int
    outaged_lines: tuple[str, ...]
    draws: dict[str, float] | None = field(default=None, compare=False)

    @property
    def key(self) -> tuple[int, int, int]:
        return (self.hazard.order, self.day, self.k)


@dataclass(frozen=True)
class HazardOutageStats:
    avg_outages: float = 0.0
    max_outages: int = 0
    days_with_outages: int = 0
    scenarios_with_outages: int = 0


@dataclass(frozen=True)
class OutageSummary:
    by_hazard: dict[HazardType, HazardOutageStats]

    def __getitem__(self, hazard: HazardType) -> HazardOutageStats:
        return self.by_hazard.get(hazard, HazardOutageStats())


def scenario_stream(base_seed: int, hazard: HazardType, day: int, k: int) -> np.random.Generator:
    seq = np.random.SeedSequence(entropy=base_seed, spawn_key=(HAZARD_TAGS[hazard], day, k))
    return np.random.Generator(np.random.PCG64(seq))


def sample_beta_prime(stream: np.random.Generator, params: BetaPrimeParams, size=None):
    """Beta-prime variate(s) as a ratio of unit-scale gamma variates."""
    num = stream.standard_gamma(params.alpha, size)
    den = stream.standard_gamma(params.beta, size)
    return num / den


def outaged_from_draws(draws: Mapping[str, float], risk: Mapping[str, float], index: LineRegionIndex) -> tuple[str, ...]:
    """Apply the outage rule to known draws; used for offline replay of traces."""
    out = []
    for line_id in sorted(draws):
        o = draws[line_id]
        if any(o < risk.get(fips, 0.0) for fips in index.get(line_id, ())):
            out.append(line_id)
    return tuple(out)


def generate_outage_set(
    hazard: HazardType,
    day: int,
    k: int,
    risk: Mapping[str, float],
    index: LineRegionIndex,
    config: ScenarioConfig,
    *,
    trace: bool = False,
    network: Network | None = None,
) -> OutageScenario:
    if not 0 <= k < config.scenarios_per_day:
        raise ValueError(f"scenario index {k} outside 0..{config.scenarios_per_day - 1}")
    if network is not None:
        unknown = set(index).difference(network.lines)
        if unknown:
            raise ReferenceIntegrityError(f"line ids in index not in network: {sorted(unknown)}")

    line_ids = sorted(index)
    rng = scenario_stream(config.base_seed, hazard, day, k)
    o = sample_beta_prime(rng, config.params, len(line_ids))
    outaged = tuple(
        line_id
        for line_id, value in zip(line_ids, o)
        if any(value < risk.get(fips, 0.0) for fips in index[line_id])
    )
    draws = {l: float(v) for l, v in zip(line_ids, o)} if trace else None
    return OutageScenario(hazard, day, k, outaged, draws)


def generate_day(
    hazard: HazardType,
    day: int,
    risk: Mapping[str, float],
    index: LineRegionIndex,
    config: ScenarioConfig,
    *,
    trace: bool = False,
) -> list[OutageScenario]:
    return [
        generate_outage_set(hazard, day, k, risk, index, config, trace=trace)
        for k in range(config.scenarios_per_day)
    ]


def summarize_outages(scenarios: Iterable[OutageScenario]) -> OutageSummary:
    """Table-style outage statistics per hazard.

    The average counts only scenarios with at least one outaged line.
    """
    sizes: dict[HazardType, list[int]] = {}
    days: dict[HazardType, set[int]] = {}
    for s in scenarios:
        n = len(s.outaged_lines)
        sizes.setdefault(s.hazard, [])
        days.setdefault(s.hazard, set())
        if n:
            sizes[s.hazard].append(n)
            days[s.hazard].add(s.day)
    stats = {}
    for hazard in sorted(sizes, key=hazard_sort_key):
        nonzero = sizes[hazard]
        if nonzero:
            stats[hazard] = HazardOutageStats(
                avg_outages=sum(nonzero) / len(nonzero),
                max_outages=max(nonzero),
                days_with_outages=len(days[hazard]),
                scenarios_with_outages=len(nonzero),
            )
        else:
            stats[hazard] = HazardOutageStats()
    return OutageSummary(stats)


def outage_summary_csv(summary: OutageSummary, hazards: Iterable[HazardType] = tuple(HazardType)) -> str:
    lines = ["hazard,avg_outages,max_outages,days,scenarios"]
    for h in sorted(hazards, key=hazard_sort_key):
        s = summary[h]
        lines.append(f"{h.value},{s.avg_outages!r},{s.max_outages},{s.days_with_outages},{s.scenarios_with_outages}")
    return "\n".join(lines) + "\n"


def scenario_to_json(s: OutageScenario) -> str:
    record = {"hazard": s.hazard.value, "day": s.day, "k": s.k, "outaged_lines": list(s.outaged_lines)}
    if s.draws is not None:
        record["draws"] = s.draws
    return json.dumps(record, separators=(",", ":"))


def write_scenarios(scenarios: Iterable[OutageScenario]) -> str:
    ordered = sorted(scenarios, key=lambda s: s.key)
    return "".join(scenario_to_json(s) + "\n" for s in ordered)


def read_scenarios(text: str) -> list[OutageScenario]:
    out = []
    for n, raw in enumerate(text.splitlines(), start=1):
        if not raw.strip():
            continue
        try:
            rec = json.loads(raw)
            hazard = HazardType.parse(rec["hazard"])
            draws = rec.get("draws")
            out.append(
                OutageScenario(
                    hazard,
                    int(rec["day"]),
                    int(rec["k"]),
                    tuple(sorted(rec["outaged_lines"])),
                    {k: float(v) for k, v in draws.items()} if draws is not None else None,
                )
            )
        except (KeyError, TypeError, ValueError) as exc:
            raise SchemaError(f"bad scenario record: {exc}", locator=f"line {n}") from None
    return out
