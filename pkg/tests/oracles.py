"""Independent reference computations used to freeze and check expected values.

Nothing here imports the code paths it checks.
"""

from __future__ import annotations

import itertools
import math

import networkx as nx
import numpy as np
from matplotlib.path import Path as MplPath
from scipy import integrate, special


def beta_prime_cdf(x: float, alpha: float, beta: float) -> float:
    """Integrate the beta-prime density on [0, x].

    The x**(alpha-1) endpoint singularity is handled by quad's algebraic weight.
    """
    if x <= 0:
        return 0.0
    norm = math.exp(special.betaln(alpha, beta))
    val, _ = integrate.quad(
        lambda t: (1.0 + t) ** (-alpha - beta), 0.0, x, weight="alg", wvar=(alpha - 1.0, 0.0), epsabs=1e-13, epsrel=1e-11
    )
    return val / norm


def sampled_intersects(p1, p2, rings_by_polygon, samples: int = 4001) -> bool:
    """Dense sampling along the segment with an even-odd inside test per polygon."""
    t = np.linspace(0.0, 1.0, samples)
    pts = np.column_stack([p1[0] + t * (p2[0] - p1[0]), p1[1] + t * (p2[1] - p1[1])])
    for rings in rings_by_polygon:
        count = np.zeros(len(pts), dtype=int)
        for ring in rings:
            count += MplPath(np.asarray(ring)).contains_points(pts).astype(int)
        if np.any(count % 2 == 1):
            return True
    return False


def islands(bus_ids, edges):
    g = nx.Graph()
    g.add_nodes_from(bus_ids)
    g.add_edges_from(edges)
    return [sorted(c) for c in nx.connected_components(g)]


def brute_force_min_shed(network, demand: dict[str, float], outaged=frozenset(), tol: float = 1e-7) -> float:
    """Minimum load shed by exhaustive vertex enumeration.

    Shed at each bus is eliminated through its balance equation, so the free
    variables are generator outputs and non-reference angles, the objective is
    total demand minus total generation, and every constraint becomes a row of
    ``G x <= h``. The feasible set is a bounded polytope; each vertex is found
    by making ``n`` linearly independent rows tight.
    """
    buses = sorted(network.buses)
    gens = sorted(network.generators)
    live = [l for l in sorted(network.lines) if l not in outaged]
    refs = {comp[0] for comp in islands(buses, [(network.lines[l].from_bus, network.lines[l].to_bus) for l in live])}
    free_theta = [b for b in buses if b not in refs]
    col = {("p", g): i for i, g in enumerate(gens)}
    col.update({("t", b): len(gens) + i for i, b in enumerate(free_theta)})
    n = len(col)

    def theta_row(b):
        row = np.zeros(n)
        if b not in refs:
            row[col[("t", b)]] = 1.0
        return row

    rows, rhs = [], []

    def leq(row, h):
        rows.append(row)
        rhs.append(h)

    for g in gens:
        gen = network.generators[g]
        r = np.zeros(n)
        r[col[("p", g)]] = 1.0
        leq(r, gen.p_max)
        leq(-r, 0.0)

    # shed_n = d_n - gen_n + sum_{out} f - sum_{in} f, with f = -b (theta_fr - theta_to)
    for b in buses:
        shed_coef = np.zeros(n)
        for g in gens:
            if network.generators[g].bus == b:
                shed_coef[col[("p", g)]] -= 1.0
        for l in live:
            line = network.lines[l]
            f_row = -line.susceptance * (theta_row(line.from_bus) - theta_row(line.to_bus))
            if line.from_bus == b:
                shed_coef += f_row
            if line.to_bus == b:
                shed_coef -= f_row
        d = demand.get(b, 0.0)
        leq(-shed_coef, d)  # shed >= 0
        leq(shed_coef, 0.0)  # shed <= d

    for l in live:
        line = network.lines[l]
        dtheta = theta_row(line.from_bus) - theta_row(line.to_bus)
        leq(line.susceptance * dtheta, line.flow_limit)
        leq(-line.susceptance * dtheta, line.flow_limit)
        leq(dtheta, line.angle_max)
        leq(-dtheta, -line.angle_min)

    G = np.array(rows)
    h = np.array(rhs)
    total_demand = sum(demand.get(b, 0.0) for b in buses)
    gen_cols = [col[("p", g)] for g in gens]
    if n == 0:
        return total_demand

    norms = np.linalg.norm(G, axis=1)
    nonzero = norms > 0
    Gn = np.where(nonzero[:, None], G / np.where(nonzero, norms, 1.0)[:, None], 0.0)
    best = math.inf
    combos = np.array(list(itertools.combinations(np.flatnonzero(nonzero), n)))
    for chunk in np.array_split(combos, max(1, len(combos) // 20000)):
        M = Gn[chunk]
        det = np.linalg.det(M)
        ok = np.abs(det) > 1e-9
        if not ok.any():
            continue
        chunk = chunk[ok]
        x = np.linalg.solve(G[chunk], h[chunk][..., None])[..., 0]
        slack = x @ G.T - h
        scale = np.maximum(1.0, np.abs(h))
        feasible = np.all(slack <= tol * scale, axis=1)
        if feasible.any():
            shed = total_demand - x[feasible][:, gen_cols].sum(axis=1)
            best = min(best, float(shed.min()))
    if not math.isfinite(best):
        raise AssertionError("no feasible vertex found")
    return best
