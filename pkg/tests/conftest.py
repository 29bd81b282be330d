import json
import sys
from pathlib import Path

import pytest

from hazardgrid.network import Bus, DemandProfile, Generator, Line, LoadPoint, Network, parse_demand_profile, parse_network

sys.path.insert(0, str(Path(__file__).parent))

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
STUDY5 = FIXTURES / "study5"
SMALL4 = FIXTURES / "small4"


@pytest.fixture
def study5_dir() -> Path:
    return STUDY5


@pytest.fixture(scope="session")
def study5_network() -> Network:
    return parse_network((STUDY5 / "network.json").read_text())


@pytest.fixture(scope="session")
def study5_profile() -> DemandProfile:
    return parse_demand_profile((STUDY5 / "profile.json").read_text())


@pytest.fixture(scope="session")
def small4_network() -> Network:
    return parse_network((SMALL4 / "network.json").read_text())


@pytest.fixture(scope="session")
def small4_profile() -> DemandProfile:
    return parse_demand_profile((SMALL4 / "profile.json").read_text())


def flat_profile(days=(1,), value=1.0) -> DemandProfile:
    return DemandProfile({d: (value,) * 24 for d in days})


def two_bus(flow_limit=100.0, susceptance=1000.0, gen_cap=100.0, demand=50.0) -> Network:
    return Network.build(
        [Bus("A", 30.0, -99.0), Bus("B", 30.0, -98.0)],
        [Line("L", "A", "B", susceptance, flow_limit)],
        [Generator("G", "A", 0.0, gen_cap)],
        [LoadPoint("B", demand)],
    )


def write_config(tmp_path: Path, **overrides) -> Path:
    """Copy of the study5 config with absolute input paths and an out dir under tmp_path."""
    doc = json.loads((STUDY5 / "study.json").read_text())
    for key in ("network", "regions", "outages", "storms", "profile", "plan"):
        if doc.get(key):
            doc[key] = str(STUDY5 / doc[key])
    doc["out"] = str(tmp_path / "out")
    for k, v in overrides.items():
        if v is None:
            doc.pop(k, None)
        else:
            doc[k] = v
    path = tmp_path / "study.json"
    path.write_text(json.dumps(doc))
    return path


ACCEPTANCE_CRITERIA = 10
_verdicts: dict[int, tuple[bool, str]] = {}
_acceptance_collected = False


@pytest.fixture
def verdict():
    """Record the outcome of one acceptance criterion for the end-of-run summary."""

    def record(number: int, ok: bool, detail: str) -> None:
        _verdicts[number] = (bool(ok), detail)

    return record


def pytest_collection_modifyitems(items):
    global _acceptance_collected
    _acceptance_collected = any(item.path.name == "test_acceptance.py" for item in items)


def pytest_terminal_summary(terminalreporter):
    if not _acceptance_collected:
        return
    terminalreporter.section("acceptance criteria")
    for n in range(1, ACCEPTANCE_CRITERIA + 1):
        if n in _verdicts:
            ok, detail = _verdicts[n]
            terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
        else:
            terminalreporter.write_line(f"criterion {n:2d}: FAIL  (not evaluated)")
