"""Hourly B-theta DC-OPF that minimises total load shed.

Per hour the LP is::

    min   sum_n shed_n
    s.t.  pmin_i <= p_i <= pmax_i                    (pmin_i -> 0 unless enforce_gen_min)
          0 <= shed_n <= demand_n
          f_l = 0                                    l outaged
          -fmax_l <= f_l <= fmax_l                   l in service
          dmin_l <= theta_fr - theta_to <= dmax_l    l in service
          f_l = -b_l (theta_fr - theta_to)           l in service
          sum_{l from n} f_l - sum_{l to n} f_l = sum_{i at n} p_i - demand_n + shed_n

One bus per island (its smallest id) has its angle pinned to zero. Hours are
independent, so a day is 24 separate solves. The LP is handed to HiGHS
through :func:`scipy.optimize.linprog`.
"""

from __future__ import annotations

import enum
import logging
import math
import time
from dataclasses import dataclass
from typing import Iterable

import numpy as np
from scipy import sparse
from scipy.optimize import linprog

from .errors import ReferenceIntegrityError, SolveFailure
from .network import HOURS_PER_DAY, DemandProfile, Network, connected_components

log = logging.getLogger(__name__)

DEFAULT_LP_TOL = 1e-7
# accepted solutions must satisfy every row to this absolute level (MW or rad)
RESIDUAL_LIMIT = 1e-6


class SolveStatus(enum.Enum):
    OPTIMAL = "Optimal"
    INFEASIBLE = "Infeasible"
    NUMERICAL_FAILURE = "NumericalFailure"


@dataclass(frozen=True)
class SolveOptions:
    tolerance: float = DEFAULT_LP_TOL
    enforce_gen_min: bool = False
    debug: bool = False

    def __post_init__(self):
        if not 0 < self.tolerance <= 1e-6:
            raise ValueError(f"LP tolerance must lie in (0, 1e-6], got {self.tolerance}")


@dataclass(frozen=True)
class HourlyCase:
    network: Network
    day: int
    hour: int
    demand: dict[str, float]
    outaged: frozenset[str]


@dataclass(frozen=True)
class SolveReport:
    status: SolveStatus
    iterations: int
    elapsed: float
    tolerance: float
    message: str = ""


@dataclass(frozen=True)
class DispatchSolution:
    """Optimal set-point for one hour. ``objective_shed`` is in MW (= MWh for 1 h)."""

    hour: int
    generation: dict[str, float]
    angles: dict[str, float]
    flows: dict[str, float]
    shed: dict[str, float]
    objective_shed: float


@dataclass(frozen=True)
class DailyDispatch:
    day: int
    outaged: frozenset[str]
    hours: tuple[DispatchSolution, ...]
    shed_mwh: float


def build_hourly_case(
    network: Network, day: int, hour: int, profile: DemandProfile, outaged: Iterable[str] = ()
) -> HourlyCase:
    m = profile.multiplier(day, hour)
    outaged = frozenset(outaged)
    unknown = outaged.difference(network.lines)
    if unknown:
        raise ReferenceIntegrityError(f"unknown outaged line id(s) {sorted(unknown)}")
    demand = {b: network.base_demand(b) * m for b in network.buses}
    return HourlyCase(network, day, hour, demand, outaged)


class LoadShedLP:
    """Constraint structure for one (network, outage set); demand varies per solve."""

    def __init__(self, network: Network, outaged: frozenset[str], enforce_gen_min: bool):
        self.network = network
        self.outaged = outaged
        self.bus_ids = list(network.buses)
        self.line_ids = list(network.lines)
        self.gen_ids = list(network.generators)
        self.live = [l for l in self.line_ids if l not in outaged]

        nb, nl, ng = len(self.bus_ids), len(self.line_ids), len(self.gen_ids)
        self.g0, self.t0, self.f0, self.s0 = 0, ng, ng + nb, ng + nb + nl
        self.nvar = ng + 2 * nb + nl
        bus_pos = {b: i for i, b in enumerate(self.bus_ids)}
        self.gen_pos = {g: i for i, g in enumerate(self.gen_ids)}
        line_pos = {l: i for i, l in enumerate(self.line_ids)}

        self.c = np.zeros(self.nvar)
        self.c[self.s0:] = 1.0

        rows, cols, vals = [], [], []
        r = 0
        # flow definition: f + b*theta_fr - b*theta_to = 0
        for l in self.live:
            line = network.lines[l]
            rows += [r, r, r]
            cols += [self.f0 + line_pos[l], self.t0 + bus_pos[line.from_bus], self.t0 + bus_pos[line.to_bus]]
            vals += [1.0, line.susceptance, -line.susceptance]
            r += 1
        self.balance_row0 = r
        # balance: f_out - f_in - p - shed = -demand
        for n in self.bus_ids:
            for l in network.lines_from[n]:
                rows.append(r); cols.append(self.f0 + line_pos[l]); vals.append(1.0)
            for l in network.lines_to[n]:
                rows.append(r); cols.append(self.f0 + line_pos[l]); vals.append(-1.0)
            for g in network.generators_at[n]:
                rows.append(r); cols.append(self.g0 + self.gen_pos[g]); vals.append(-1.0)
            rows.append(r); cols.append(self.s0 + bus_pos[n]); vals.append(-1.0)
            r += 1
        self.A_eq = sparse.csr_matrix((vals, (rows, cols)), shape=(r, self.nvar))
        self.n_eq = r

        rows, cols, vals, rhs = [], [], [], []
        for i, l in enumerate(self.live):
            line = network.lines[l]
            fr, to = self.t0 + bus_pos[line.from_bus], self.t0 + bus_pos[line.to_bus]
            rows += [2 * i, 2 * i, 2 * i + 1, 2 * i + 1]
            cols += [fr, to, fr, to]
            vals += [1.0, -1.0, -1.0, 1.0]
            rhs += [line.angle_max, -line.angle_min]
        self.A_ub = sparse.csr_matrix((vals, (rows, cols)), shape=(2 * len(self.live), self.nvar)) if self.live else None
        self.b_ub = np.array(rhs) if self.live else None

        self.references = [comp[0] for comp in connected_components(network, outaged)]
        refs = set(self.references)
        bounds: list[tuple[float | None, float | None]] = []
        for g in self.gen_ids:
            gen = network.generators[g]
            bounds.append((gen.p_min if enforce_gen_min else 0.0, gen.p_max))
        for b in self.bus_ids:
            bounds.append((0.0, 0.0) if b in refs else (None, None))
        for l in self.line_ids:
            if l in outaged:
                bounds.append((0.0, 0.0))
            else:
                fmax = network.lines[l].flow_limit
                bounds.append((-fmax, fmax))
        self.base_bounds = bounds

    def solve(self, hour: int, demand: dict[str, float], tol: float) -> tuple[SolveReport, DispatchSolution | None]:
        d = np.array([demand.get(b, 0.0) for b in self.bus_ids])
        b_eq = np.zeros(self.n_eq)
        b_eq[self.balance_row0:] = -d
        bounds = self.base_bounds + [(0.0, float(x)) for x in d]

        start = time.perf_counter()
        res = linprog(
            self.c,
            A_ub=self.A_ub,
            b_ub=self.b_ub,
            A_eq=self.A_eq,
            b_eq=b_eq,
            bounds=bounds,
            method="highs-ds",
            options={"primal_feasibility_tolerance": tol, "dual_feasibility_tolerance": tol, "presolve": True},
        )
        elapsed = time.perf_counter() - start
        if res.status == 0:
            status = SolveStatus.OPTIMAL
        elif res.status == 2:
            status = SolveStatus.INFEASIBLE
        else:
            status = SolveStatus.NUMERICAL_FAILURE
        report = SolveReport(status, int(getattr(res, "nit", 0) or 0), elapsed, tol, str(res.message))
        if status is not SolveStatus.OPTIMAL:
            return report, None

        x = res.x
        gap = float(np.max(np.abs(self.A_eq @ x - b_eq), initial=0.0))
        if self.A_ub is not None:
            gap = max(gap, float(np.max(self.A_ub @ x - self.b_ub, initial=0.0)))
        if gap > RESIDUAL_LIMIT:
            msg = f"constraint residual {gap:.3e} exceeds {RESIDUAL_LIMIT:g}"
            return SolveReport(SolveStatus.NUMERICAL_FAILURE, report.iterations, elapsed, tol, msg), None
        shed = np.clip(x[self.s0:], 0.0, d)
        flows = {l: (0.0 if l in self.outaged else float(x[self.f0 + i])) for i, l in enumerate(self.line_ids)}
        solution = DispatchSolution(
            hour=hour,
            generation={g: float(x[self.g0 + i]) for i, g in enumerate(self.gen_ids)},
            angles={b: float(x[self.t0 + i]) for i, b in enumerate(self.bus_ids)},
            flows=flows,
            shed={b: float(v) for b, v in zip(self.bus_ids, shed)},
            objective_shed=math.fsum(shed),
        )
        return report, solution

    def describe(self, demand: dict[str, float]) -> str:
        """Human-readable equation listing for debugging."""
        net = self.network
        out = ["minimize " + " + ".join(f"shed[{b}]" for b in self.bus_ids), "subject to"]
        for g in self.gen_ids:
            lo, hi = self.base_bounds[self.g0 + self.gen_pos[g]]
            out.append(f"  {lo:g} <= p[{g}] <= {hi:g}")
        for b in self.bus_ids:
            out.append(f"  0 <= shed[{b}] <= {demand.get(b, 0.0):g}")
        for l in self.line_ids:
            line = net.lines[l]
            if l in self.outaged:
                out.append(f"  f[{l}] = 0")
                continue
            out.append(f"  {-line.flow_limit:g} <= f[{l}] <= {line.flow_limit:g}")
            out.append(f"  {line.angle_min:g} <= theta[{line.from_bus}] - theta[{line.to_bus}] <= {line.angle_max:g}")
            out.append(f"  f[{l}] = -{line.susceptance:g} * (theta[{line.from_bus}] - theta[{line.to_bus}])")
        for n in self.bus_ids:
            lhs = " ".join([f"+ f[{l}]" for l in net.lines_from[n]] + [f"- f[{l}]" for l in net.lines_to[n]]) or "0"
            gens = " ".join(f"+ p[{g}]" for g in net.generators_at[n])
            out.append(f"  {lhs} = {gens} - {demand.get(n, 0.0):g} + shed[{n}]".replace("=  -", "= -"))
        for ref in self.references:
            out.append(f"  theta[{ref}] = 0")
        return "\n".join(out)


def solve_min_load_shed(
    case: HourlyCase, options: SolveOptions = SolveOptions()
) -> tuple[SolveReport, DispatchSolution | None]:
    lp = LoadShedLP(case.network, case.outaged, options.enforce_gen_min)
    if options.debug:
        log.debug("day %d hour %d LP:\n%s", case.day, case.hour, lp.describe(case.demand))
    return lp.solve(case.hour, case.demand, options.tolerance)


def format_lp(case: HourlyCase, options: SolveOptions = SolveOptions()) -> str:
    return LoadShedLP(case.network, case.outaged, options.enforce_gen_min).describe(case.demand)


def solve_day(
    network: Network,
    day: int,
    profile: DemandProfile,
    outaged: Iterable[str] = (),
    options: SolveOptions = SolveOptions(),
) -> DailyDispatch:
    """Solve all 24 hours independently; daily shed is their sum in MWh."""
    outaged = frozenset(outaged)
    cases = [build_hourly_case(network, day, h, profile, outaged) for h in range(HOURS_PER_DAY)]
    lp = LoadShedLP(network, outaged, options.enforce_gen_min)
    hours = []
    for case in cases:
        if options.debug:
            log.debug("day %d hour %d LP:\n%s", day, case.hour, lp.describe(case.demand))
        report, sol = lp.solve(case.hour, case.demand, options.tolerance)
        if sol is None:
            raise SolveFailure(f"hourly solve {report.status.value}: {report.message}", report, day=day, hour=case.hour)
        hours.append(sol)
    return DailyDispatch(day, outaged, tuple(hours), math.fsum(h.objective_shed for h in hours))


def constraint_residuals(case: HourlyCase, sol: DispatchSolution, enforce_gen_min: bool = False) -> dict[str, float]:
    """Largest violation of each constraint family (0 when satisfied).

    Angle families are in radians, everything else in MW.
    """
    net = case.network
    res = dict.fromkeys(
        ["gen_bounds", "shed_bounds", "outaged_flow", "flow_limits", "angle_limits", "flow_angle", "balance", "reference_angle"],
        0.0,
    )
    for g, gen in net.generators.items():
        lo = gen.p_min if enforce_gen_min else 0.0
        p = sol.generation[g]
        res["gen_bounds"] = max(res["gen_bounds"], lo - p, p - gen.p_max)
    for b in net.buses:
        s = sol.shed[b]
        res["shed_bounds"] = max(res["shed_bounds"], -s, s - case.demand[b])
    for l, line in net.lines.items():
        f = sol.flows[l]
        if l in case.outaged:
            res["outaged_flow"] = max(res["outaged_flow"], abs(f))
            continue
        dtheta = sol.angles[line.from_bus] - sol.angles[line.to_bus]
        res["flow_limits"] = max(res["flow_limits"], abs(f) - line.flow_limit)
        res["angle_limits"] = max(res["angle_limits"], line.angle_min - dtheta, dtheta - line.angle_max)
        res["flow_angle"] = max(res["flow_angle"], abs(f + line.susceptance * dtheta))
    for n in net.buses:
        lhs = sum(sol.flows[l] for l in net.lines_from[n]) - sum(sol.flows[l] for l in net.lines_to[n])
        rhs = sum(sol.generation[g] for g in net.generators_at[n]) - case.demand[n] + sol.shed[n]
        res["balance"] = max(res["balance"], abs(lhs - rhs))
    for comp in connected_components(net, case.outaged):
        res["reference_angle"] = max(res["reference_angle"], abs(sol.angles[comp[0]]))
    return {k: max(v, 0.0) for k, v in res.items()}


def conservation_gap(case: HourlyCase, sol: DispatchSolution) -> float:
    """|total generation - total served demand| in MW."""
    served = math.fsum(case.demand[b] - sol.shed[b] for b in case.network.buses)
    return abs(math.fsum(sol.generation.values()) - served)
