import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hazardgrid.errors import ReferenceIntegrityError
from hazardgrid.hazards import HazardType
from hazardgrid.scenarios import (
    BetaPrimeParams,
    OutageScenario,
    ScenarioConfig,
    generate_day,
    generate_outage_set,
    outage_summary_csv,
    outaged_from_draws,
    read_scenarios,
    sample_beta_prime,
    scenario_stream,
    summarize_outages,
    write_scenarios,
)
from oracles import beta_prime_cdf

H = HazardType
# beta-prime(0.02, 3.0) CDF from quadrature of the density (tests/oracles.py)
CDF_AT_0_05 = 0.967553888373626


def test_frozen_cdf_matches_oracle():
    assert beta_prime_cdf(0.05, 0.02, 3.0) == pytest.approx(CDF_AT_0_05, abs=1e-12)


@pytest.mark.parametrize("alpha, beta, mean, tol", [(0.02, 3.0, 0.01, 0.001), (1.0, 3.0, 0.5, 0.005)])
def test_sample_mean(alpha, beta, mean, tol):
    params = BetaPrimeParams(alpha, beta)
    assert params.mean == pytest.approx(mean)
    x = sample_beta_prime(np.random.default_rng(7), params, 1_000_000)
    assert abs(x.mean() - mean) <= tol
    assert (x >= 0).all()


def test_identical_streams_identical_draws():
    a = sample_beta_prime(scenario_stream(5, H.WIND, 3, 2), BetaPrimeParams(), 10)
    b = sample_beta_prime(scenario_stream(5, H.WIND, 3, 2), BetaPrimeParams(), 10)
    c = sample_beta_prime(scenario_stream(5, H.WIND, 3, 3), BetaPrimeParams(), 10)
    assert np.array_equal(a, b)
    assert not np.array_equal(a, c)


@pytest.mark.parametrize("alpha, beta", [(0.0, 3.0), (0.02, 1.0), (-1.0, 2.0)])
def test_params_validated(alpha, beta):
    with pytest.raises(ValueError):
        BetaPrimeParams(alpha, beta)


INDEX = {"L1": ("A",), "L2": ("A", "B"), "L3": ("B",), "L4": ()}


def test_zero_risk_gives_empty_set():
    cfg = ScenarioConfig(base_seed=1, scenarios_per_day=50)
    for s in generate_day(H.WIND, 1, {}, INDEX, cfg):
        assert s.outaged_lines == ()
    for s in generate_day(H.WIND, 1, {"A": 0.0, "B": 0.0}, INDEX, cfg):
        assert s.outaged_lines == ()


def test_generation_is_deterministic():
    cfg = ScenarioConfig(base_seed=99, scenarios_per_day=5)
    risk = {"A": 0.3, "B": 2.0}
    a = generate_outage_set(H.HURRICANE, 4, 3, risk, INDEX, cfg, trace=True)
    b = generate_outage_set(H.HURRICANE, 4, 3, risk, INDEX, cfg, trace=True)
    assert a == b
    assert a.draws == b.draws


def test_order_of_generation_does_not_matter():
    cfg = ScenarioConfig(base_seed=3, scenarios_per_day=20)
    risk = {"A": 0.5, "B": 0.5}
    forward = [generate_outage_set(H.WIND, 2, k, risk, INDEX, cfg) for k in range(20)]
    backward = [generate_outage_set(H.WIND, 2, k, risk, INDEX, cfg) for k in reversed(range(20))]
    assert forward == backward[::-1]


def test_k_out_of_range():
    with pytest.raises(ValueError):
        generate_outage_set(H.WIND, 1, 5, {}, INDEX, ScenarioConfig(scenarios_per_day=5))


def test_unknown_line_in_index(study5_network):
    with pytest.raises(ReferenceIntegrityError):
        generate_outage_set(H.WIND, 1, 0, {}, {"NOPE": ("A",)}, ScenarioConfig(), network=study5_network)


def test_inclusion_frequency_matches_cdf():
    cfg = ScenarioConfig(base_seed=2024, scenarios_per_day=100_000)
    index = {"L": ("C",)}
    hits = sum(bool(generate_outage_set(H.WIND, 1, k, {"C": 0.05}, index, cfg).outaged_lines) for k in range(100_000))
    assert abs(hits / 100_000 - CDF_AT_0_05) <= 0.01


def test_line_without_counties_never_outaged():
    cfg = ScenarioConfig(base_seed=0, scenarios_per_day=200)
    for s in generate_day(H.WIND, 1, {"A": 24.0, "B": 24.0}, INDEX, cfg):
        assert "L4" not in s.outaged_lines


def test_strict_inequality_on_ties():
    assert outaged_from_draws({"L1": 0.05}, {"A": 0.05}, INDEX) == ()
    assert outaged_from_draws({"L1": 0.0499}, {"A": 0.05}, INDEX) == ("L1",)


@settings(max_examples=80, deadline=None)
@given(
    st.integers(0, 2**32),
    st.integers(0, 99),
    st.floats(0.0, 0.2),
    st.floats(0.0, 0.2),
    st.floats(0.0, 1.0),
)
def test_raising_risk_only_adds_lines(seed, k, ra, rb, bump):
    cfg = ScenarioConfig(base_seed=seed)
    risk = {"A": ra, "B": rb}
    s = generate_outage_set(H.WIND, 7, k, risk, INDEX, cfg, trace=True)
    assert outaged_from_draws(s.draws, risk, INDEX) == s.outaged_lines
    higher = {"A": ra + bump, "B": rb}
    t = generate_outage_set(H.WIND, 7, k, higher, INDEX, cfg, trace=True)
    assert t.draws == s.draws
    assert set(s.outaged_lines) <= set(t.outaged_lines)


def scen(h, day, k, n):
    return OutageScenario(h, day, k, tuple(f"L{i}" for i in range(n)))


def test_summary_excludes_empty_scenarios():
    summary = summarize_outages([scen(H.WIND, 1, 0, 0), scen(H.WIND, 1, 1, 4), scen(H.WIND, 2, 0, 6)])
    s = summary[H.WIND]
    assert (s.avg_outages, s.max_outages, s.scenarios_with_outages, s.days_with_outages) == (5.0, 6, 2, 2)


def test_summary_all_empty_and_no_input():
    s = summarize_outages([scen(H.HURRICANE, 1, k, 0) for k in range(3)])[H.HURRICANE]
    assert (s.avg_outages, s.max_outages, s.scenarios_with_outages, s.days_with_outages) == (0.0, 0, 0, 0)
    assert summarize_outages([])[H.WIND].max_outages == 0
    assert outage_summary_csv(summarize_outages([])).splitlines()[1:] == [
        "wildfire,0.0,0,0,0",
        "hurricane,0.0,0,0,0",
        "wind,0.0,0,0,0",
    ]


@settings(max_examples=100, deadline=None)
@given(st.lists(st.tuples(st.sampled_from(list(HazardType)), st.integers(1, 5), st.integers(0, 8)), max_size=30))
def test_summary_invariants(items):
    scenarios = [scen(h, d, k, n) for k, (h, d, n) in enumerate(items)]
    summary = summarize_outages(scenarios)
    for h in HazardType:
        s = summary[h]
        if s.scenarios_with_outages:
            assert s.max_outages >= s.avg_outages >= 1
        else:
            assert (s.avg_outages, s.max_outages, s.days_with_outages) == (0.0, 0, 0)


def test_scenario_file_round_trip():
    cfg = ScenarioConfig(base_seed=11, scenarios_per_day=4)
    risk = {"A": 1.0, "B": 0.01}
    scenarios = generate_day(H.WILDFIRE, 9, risk, INDEX, cfg, trace=True) + generate_day(H.WIND, 2, risk, INDEX, cfg)
    text = write_scenarios(reversed(scenarios))
    back = read_scenarios(text)
    assert back == sorted(scenarios, key=lambda s: s.key)
    assert back[0].draws == scenarios[0].draws
    assert write_scenarios(back) == text
