import csv
import json
import shutil

import pytest

from conftest import STUDY5, write_config
from hazardgrid import cli
from hazardgrid.errors import SolveFailure
from hazardgrid.geo import map_lines_to_counties, parse_regions
from hazardgrid.network import parse_network
from hazardgrid.scenarios import outaged_from_draws, read_scenarios


def run(*argv):
    return cli.main([str(a) for a in argv])


def rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def test_validate_clean(tmp_path, capsys):
    assert run("validate", "--config", write_config(tmp_path)) == 0
    captured = capsys.readouterr()
    assert "finding" not in captured.err
    assert captured.out.startswith("ok: 5 buses, 7 lines, 3 regions, 10 days")


def test_validate_plan_with_unknown_line(tmp_path, capsys):
    plan = tmp_path / "bad_plan.json"
    plan.write_text(json.dumps({"plan_id": "bad", "lines": ["L1", "L42"]}))
    assert run("validate", "--config", write_config(tmp_path), "--plan", plan) == 1
    err = capsys.readouterr().err
    assert "L42" in err and "bad_plan.json" in err


def test_validate_bad_fraction_reports_row(tmp_path, capsys):
    outages = tmp_path / "outages.csv"
    outages.write_text("day,hour,fips,fraction_out\n1,0,48001,0.2\n1,1,48001,1.7\n")
    assert run("validate", "--config", write_config(tmp_path, outages=str(outages))) == 1
    err = capsys.readouterr().err
    assert "row 3" in err and "1.7" in err


def test_validate_missing_file_and_profile_days(tmp_path, capsys):
    cfg = write_config(tmp_path, storms=str(tmp_path / "nope.csv"), days="1..12")
    assert run("validate", "--config", cfg) == 1
    err = capsys.readouterr().err
    assert "nope.csv" in err
    assert "day 11" in err and "day 12" in err


@pytest.mark.parametrize(
    "args",
    [
        ["--days", "5..2"],
        ["--scenarios", "0"],
        ["--parallel", "0"],
        ["--lp-tol", "1e-3"],
    ],
)
def test_bad_overrides_exit_1(tmp_path, args):
    assert run("run", "--config", write_config(tmp_path), *args) == 1


def test_unreadable_config(tmp_path):
    assert run("validate", "--config", tmp_path / "missing.json") == 1
    bad = tmp_path / "bad.json"
    bad.write_text('{"network": "x", "colour": 1}')
    assert run("validate", "--config", bad) == 1


def test_run_without_plan_leaves_post_empty(tmp_path):
    cfg = write_config(tmp_path, plan=None)
    assert run("run", "--config", cfg, "--scenarios", 4, "--days", "1..2") == 0
    data = rows(tmp_path / "out" / "results.csv")
    assert len(data) == 3 * 2 * 4
    assert all(r["post_shed_mwh"] == r["post_outages"] == r["overlap"] == "" for r in data)
    assert all(r["pre_shed_mwh"] != "" for r in data)


def test_hazard_filter(tmp_path):
    cfg = write_config(tmp_path)
    assert run("run", "--config", cfg, "--scenarios", 3, "--hazard", "hurricane", "--days", "5..7") == 0
    out = tmp_path / "out"
    assert {r["hazard"] for r in rows(out / "results.csv")} == {"hurricane"}
    assert {r["hazard"] for r in rows(out / "summary.csv")} == {"hurricane"}
    assert {r["hazard"] for r in rows(out / "risk.csv")} <= {"hurricane"}
    assert {json.loads(l)["hazard"] for l in (out / "scenarios.jsonl").read_text().splitlines()} == {"hurricane"}


def test_flags_override_config(tmp_path):
    cfg = write_config(tmp_path, scenarios_per_day=2)
    other = tmp_path / "elsewhere"
    assert run("scenarios", "--config", cfg, "--scenarios", 5, "--days", "1..1", "--out", other) == 0
    lines = (other / "scenarios.jsonl").read_text().splitlines()
    assert len(lines) == 3 * 5


def test_trace_allows_offline_replay(tmp_path):
    cfg = write_config(tmp_path)
    assert run("run", "--config", cfg, "--trace", "--scenarios", 20, "--hazard", "wind", "--days", "1..2") == 0
    out = tmp_path / "out"
    scenarios = read_scenarios((out / "scenarios.jsonl").read_text())
    risk = {}
    for r in rows(out / "risk.csv"):
        risk.setdefault((r["hazard"], int(r["day"])), {})[r["fips"]] = float(r["rho"])
    net = parse_network((STUDY5 / "network.json").read_text())
    index = map_lines_to_counties(net, parse_regions((STUDY5 / "counties.geojson").read_text()))
    assert any(s.outaged_lines for s in scenarios)
    for s in scenarios:
        assert set(s.draws) == set(net.lines)
        assert outaged_from_draws(s.draws, risk.get((s.hazard.value, s.day), {}), index) == s.outaged_lines


def test_risk_command(tmp_path):
    assert run("risk", "--config", write_config(tmp_path)) == 0
    data = rows(tmp_path / "out" / "risk.csv")
    assert data and all(float(r["rho"]) >= 0 for r in data)
    # outage records on day 3 carry no storm flag, so they never reach the table
    assert all(r["day"] != "3" for r in data)


def test_report_rebuilds_same_outputs(tmp_path):
    cfg = write_config(tmp_path)
    assert run("run", "--config", cfg, "--scenarios", 5, "--days", "1..3") == 0
    out = tmp_path / "out"
    before = {p.name: p.read_bytes() for p in out.iterdir()}
    (out / "summary.csv").unlink()
    assert run("report", "--config", cfg, "--days", "1..3") == 0
    after = {p.name: p.read_bytes() for p in out.iterdir()}
    assert after == before


def test_report_without_results(tmp_path):
    assert run("report", "--config", write_config(tmp_path)) == 2


def test_solver_failure_exit_2(tmp_path, monkeypatch, caplog):
    def boom(config, inputs):
        raise SolveFailure("hourly solve Infeasible", None, hazard="wind", day=1, k=0, hour=0)

    monkeypatch.setattr(cli, "run_study", boom)
    assert run("run", "--config", write_config(tmp_path), "--scenarios", 1) == 2
    assert "stage solve failed" in caplog.text


def test_config_paths_resolve_against_config_dir(tmp_path):
    local = tmp_path / "study"
    shutil.copytree(STUDY5, local, ignore=shutil.ignore_patterns("out"))
    assert run("run", "--config", local / "study.json", "--scenarios", 2, "--days", "1..1") == 0
    assert (local / "out" / "manifest.json").exists()


def test_help_lists_subcommands(capsys):
    with pytest.raises(SystemExit) as exc:
        run("--help")
    assert exc.value.code == 0
    out = capsys.readouterr().out
    for name in ("validate", "risk", "scenarios", "run", "report"):
        assert name in out
