"""Regenerate the synthetic fixture files in this directory.

    python fixtures/make_fixtures.py

study5/ is a 5-bus, 7-line network over three adjacent 1-degree counties
with ten days of outage/storm data. small4/ is a 4-bus network used for
exhaustive outage-subset checks.
"""

import json
import math
from pathlib import Path

import numpy as np

HERE = Path(__file__).resolve().parent

# hourly load shapes (fraction of daily peak), winter weekday / weekend
WEEKDAY = [67, 63, 60, 59, 59, 60, 74, 86, 95, 96, 96, 95, 95, 95, 93, 94, 99, 100, 100, 96, 91, 83, 73, 63]
WEEKEND = [78, 72, 68, 66, 64, 65, 66, 70, 80, 88, 90, 91, 90, 88, 87, 87, 91, 100, 99, 97, 94, 92, 87, 81]


def square(lon0, lat0, size=1.0):
    return [[lon0, lat0], [lon0 + size, lat0], [lon0 + size, lat0 + size], [lon0, lat0 + size], [lon0, lat0]]


def write_json(path, doc, indent=2):
    path.write_text(json.dumps(doc, indent=indent) + "\n")


def study5():
    out = HERE / "study5"
    out.mkdir(exist_ok=True)
    network = {
        "buses": [
            {"id": "B1", "latitude": 30.5, "longitude": -99.5},
            {"id": "B2", "latitude": 30.2, "longitude": -99.7},
            {"id": "B3", "latitude": 30.5, "longitude": -98.5},
            {"id": "B4", "latitude": 30.7, "longitude": -97.5},
            {"id": "B5", "latitude": 30.3, "longitude": -97.3},
        ],
        "lines": [
            {"id": "L1", "from_bus": "B1", "to_bus": "B2", "susceptance": 900.0, "flow_limit": 120.0},
            {"id": "L2", "from_bus": "B1", "to_bus": "B3", "susceptance": 700.0, "flow_limit": 100.0},
            {"id": "L3", "from_bus": "B2", "to_bus": "B3", "susceptance": 600.0, "flow_limit": 80.0},
            {"id": "L4", "from_bus": "B3", "to_bus": "B4", "susceptance": 800.0, "flow_limit": 90.0},
            {"id": "L5", "from_bus": "B3", "to_bus": "B5", "susceptance": 500.0, "flow_limit": 100.0},
            {"id": "L6", "from_bus": "B4", "to_bus": "B5", "susceptance": 650.0, "flow_limit": 60.0},
            {"id": "L7", "from_bus": "B1", "to_bus": "B4", "susceptance": 400.0, "flow_limit": 70.0,
             "angle_min": -0.1, "angle_max": 0.1},
        ],
        "generators": [
            {"id": "G1", "bus": "B1", "p_min": 20.0, "p_max": 300.0},
            {"id": "G2", "bus": "B2", "p_min": 0.0, "p_max": 60.0},
            {"id": "G3", "bus": "B4", "p_min": 0.0, "p_max": 100.0},
            {"id": "G4", "bus": "B4", "p_min": 10.0, "p_max": 30.0},
        ],
        "loads": [
            {"bus": "B1", "base_demand": 50.0},
            {"bus": "B2", "base_demand": 100.0},
            {"bus": "B3", "base_demand": 100.0},
            {"bus": "B3", "base_demand": 50.0},
            {"bus": "B4", "base_demand": 60.0},
            {"bus": "B5", "base_demand": 90.0},
        ],
    }
    write_json(out / "network.json", network)

    counties = {
        "type": "FeatureCollection",
        "features": [
            {"type": "Feature", "properties": {"fips": fips, "name": name},
             "geometry": {"type": "Polygon", "coordinates": [square(lon0, 30.0)]}}
            for fips, name, lon0 in [("48001", "West", -100.0), ("48003", "Central", -99.0), ("48005", "East", -98.0)]
        ],
    }
    write_json(out / "counties.geojson", counties)

    # 2021-01-01 was a Friday; days 2, 3, 9, 10 fall on weekends
    profile = {str(d): [v / 100 for v in (WEEKEND if d in (2, 3, 9, 10) else WEEKDAY)] for d in range(1, 11)}
    write_json(out / "profile.json", profile, indent=None)

    # (day, fips, hazard, peak hourly fraction, hours affected)
    events = [
        (1, "48003", "wind", 0.02, 5),
        (2, "48001", "wind", 0.0004, 2),
        (4, "48005", "wildfire", 0.003, 3),
        (5, "48001", "wind", 0.05, 8),
        (5, "48003", "wind", 0.01, 4),
        (6, "48005", "hurricane", 0.45, 24),
        (7, "48005", "hurricane", 0.30, 24),
        (8, "48003", "wind", 0.005, 6),
        (9, "48005", "wildfire", 0.0002, 2),
        (10, "48001", "wind", 0.001, 3),
    ]
    rng = np.random.default_rng(48)
    outage_rows = {}
    storm_rows = []
    for day, fips, hazard, peak, hours in events:
        storm_rows.append((day, fips, hazard))
        start = int(rng.integers(0, 24 - hours + 1))
        for h in range(start, start + hours):
            frac = round(float(peak * rng.uniform(0.4, 1.0)), 6)
            outage_rows[(day, h, fips)] = frac
    # outages on a day with no storm flag never count toward any hazard
    for h in range(8, 12):
        outage_rows[(3, h, "48003")] = 0.15
    lines = ["day,hour,fips,fraction_out"]
    lines += [f"{d},{h},{f},{v}" for (d, h, f), v in sorted(outage_rows.items())]
    (out / "outages.csv").write_text("\n".join(lines) + "\n")
    storms = ["day,fips,hazard"] + [f"{d},{f},{h}" for d, f, h in sorted(storm_rows)]
    (out / "storms.csv").write_text("\n".join(storms) + "\n")

    write_json(out / "plan.json", {"plan_id": "ignition-risk-west", "lines": ["L1", "L3"]})
    write_json(out / "plan_east.json", {"plan_id": "east-corridor", "lines": ["L4", "L6"]})
    write_json(out / "study.json", {
        "network": "network.json",
        "regions": "counties.geojson",
        "outages": "outages.csv",
        "storms": "storms.csv",
        "profile": "profile.json",
        "plan": "plan.json",
        "out": "out",
        "seed": 2021,
        "scenarios_per_day": 100,
        "alpha": 0.02,
        "beta": 3.0,
        "hazards": ["wildfire", "hurricane", "wind"],
        "days": "1..10",
        "parallel": 1,
        "trace": False,
        "enforce_gen_min": False,
        "lp_tol": 1e-7,
    })


def small4():
    out = HERE / "small4"
    out.mkdir(exist_ok=True)
    network = {
        "buses": [
            {"id": "N1", "latitude": 31.0, "longitude": -98.0},
            {"id": "N2", "latitude": 31.0, "longitude": -97.0},
            {"id": "N3", "latitude": 30.0, "longitude": -97.0},
            {"id": "N4", "latitude": 30.0, "longitude": -98.0},
        ],
        "lines": [
            {"id": "a", "from_bus": "N1", "to_bus": "N2", "susceptance": 300.0, "flow_limit": 60.0},
            {"id": "b", "from_bus": "N2", "to_bus": "N3", "susceptance": 500.0, "flow_limit": 80.0},
            {"id": "c", "from_bus": "N3", "to_bus": "N4", "susceptance": 250.0, "flow_limit": 50.0,
             "angle_min": -0.08, "angle_max": 0.08},
            {"id": "d", "from_bus": "N4", "to_bus": "N1", "susceptance": 400.0, "flow_limit": 70.0},
            {"id": "e", "from_bus": "N1", "to_bus": "N3", "susceptance": 200.0, "flow_limit": 40.0},
        ],
        "generators": [
            {"id": "g1", "bus": "N1", "p_min": 0.0, "p_max": 150.0},
            {"id": "g3", "bus": "N3", "p_min": 0.0, "p_max": 40.0},
        ],
        "loads": [
            {"bus": "N2", "base_demand": 70.0},
            {"bus": "N3", "base_demand": 60.0},
            {"bus": "N4", "base_demand": 50.0},
        ],
    }
    write_json(out / "network.json", network)
    profile = {"1": [0.6] * 12 + [1.0] * 12}
    write_json(out / "profile.json", profile, indent=None)


if __name__ == "__main__":
    study5()
    small4()
    print(f"wrote fixtures under {HERE}")
