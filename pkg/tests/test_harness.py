from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
import pytest

from dual_bbgky.errors import CapacityError, ConfigParseError, ValidationError
from dual_bbgky.harness.checks import CHECKS, norm_estimate_bound
from dual_bbgky.harness.cli import main
from dual_bbgky.harness.report import VerificationReport, emit_report, parse_report, run_scenario
from dual_bbgky.harness.scenario import DEFAULT_GAMMAS, DEFAULT_TIMES, load_scenario, scenario_from_dict


def write(tmp_path, text, name="s.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return p


def test_minimal_scenario_defaults(tmp_path):
    s = load_scenario(write(tmp_path, "system:\n  preset: pair-zz\n  N: 2\n"))
    assert s.seed == 0
    assert s.times == list(DEFAULT_TIMES) and s.gamma_values == list(DEFAULT_GAMMAS)
    assert s.checks == list(CHECKS)
    assert s.tolerance_overrides == {}
    assert s.spec_for(0).N == 2


def test_inline_scenario(tmp_path):
    text = """
system:
  d: 2
  N: 2
  h1: [[1, [0, -1]], [[0, 1], -1]]
  potentials:
    - k: 2
      phi: [[1,0,0,0],[0,-1,0,0],[0,0,-1,0],[0,0,0,1]]
"""
    spec = load_scenario(write(tmp_path, text)).spec_for(0)
    assert np.allclose(spec.h1, [[1, -1j], [1j, -1]])
    assert spec.orders == (2,)


def test_non_hermitian_h1_is_named(tmp_path):
    p = write(tmp_path, "system:\n  d: 2\n  N: 2\n  h1: [[0, 1], [0, 0]]\n")
    with pytest.raises(ValidationError) as exc:
        load_scenario(p)
    assert exc.value.field.endswith("h1")


def test_non_symmetric_potential_is_named(tmp_path):
    text = "system:\n  d: 2\n  N: 2\n  h1: [[1, 0], [0, -1]]\n  potentials:\n    - k: 2\n      phi: [[1,0,0,0],[0,1,0,0],[0,0,-1,0],[0,0,0,-1]]\n"
    with pytest.raises(ValidationError) as exc:
        load_scenario(write(tmp_path, text))
    assert exc.value.field == "system.potentials[0].phi"
    sym = load_scenario(write(tmp_path, text.replace("  h1:", "  symmetrize: true\n  h1:"), "sym.yaml"))
    assert sym.spec_for(0).orders == (2,)


def test_unknown_check_lists_valid_ids():
    with pytest.raises(ValidationError) as exc:
        scenario_from_dict({"system": {"preset": "free", "N": 2}, "checks": ["nope"]})
    assert exc.value.field == "checks"
    for cid in CHECKS:
        assert cid in exc.value.message


@pytest.mark.parametrize("data,field", [
    ({"system": {"preset": "free"}, "seed": -1}, "seed"),
    ({"system": {"preset": "free"}, "seed": 2 ** 64}, "seed"),
    ({"system": {"preset": "free"}, "gamma_values": [0.5]}, "gamma_values[0]"),
    ({"system": {"preset": "free"}, "times": []}, "times"),
    ({"system": {"preset": "free"}, "tolerance_overrides": {"zzz": 1.0}}, "tolerance_overrides.zzz"),
    ({"system": {"preset": "nope"}}, "system.preset"),
    ({"system": {"preset": "free"}, "bogus": 1}, "bogus"),
    ({}, "system"),
])
def test_validation_errors(data, field):
    with pytest.raises(ValidationError) as exc:
        scenario_from_dict(data)
    assert exc.value.field == field


def test_parse_error_position(tmp_path):
    p = write(tmp_path, "system:\n  preset: free\n  N: [1, 2\n")
    with pytest.raises(ConfigParseError) as exc:
        load_scenario(p)
    assert exc.value.line is not None and exc.value.column is not None
    assert str(p) in str(exc.value)
    with pytest.raises(ConfigParseError):
        load_scenario(tmp_path / "missing.yaml")


def test_capacity_error():
    with pytest.raises(CapacityError):
        scenario_from_dict({"system": {"preset": "free", "N": 9}})
    with pytest.raises(CapacityError):
        scenario_from_dict({"system": {"preset": "random", "d": 4, "N": 5}})


@pytest.fixture(scope="module")
def all_checks_report():
    s = scenario_from_dict({"system": {"preset": "pair+triple-random", "N": 3}, "seed": 42, "instances": 2})
    return run_scenario(s, deterministic=True)


def test_all_checks_present(all_checks_report):
    assert set(all_checks_report.by_check()) == set(CHECKS)
    assert all_checks_report.passed
    for r in all_checks_report.records:
        assert r.verdict == ("PASS" if r.residual <= r.tolerance else "FAIL")
        assert r.anchor == CHECKS[r.check].anchor and r.wall_time is None


def test_free_preset_vanishing():
    s = scenario_from_dict({"system": {"preset": "free", "N": 3}, "checks": ["cumulant_vanishing_free"]})
    rep = run_scenario(s)
    assert rep.records and all(r.residual <= 1e-12 for r in rep.records)


def test_norm_estimate_records(all_checks_report):
    bound = norm_estimate_bound(0.3)
    assert bound == pytest.approx(math.e ** 2 / (1 - 0.3 * math.e))
    assert 40.0 < bound < 40.1
    recs = [r for r in all_checks_report.records if r.check == "norm_estimate" and r.parameters["gamma"] == 0.3]
    assert recs and max(r.residual for r in recs) <= bound
    assert all(r.tolerance == bound for r in recs)


def test_json_round_trip(all_checks_report):
    data = emit_report(all_checks_report, "json")
    back = parse_report(data)
    assert back.to_dict() == all_checks_report.to_dict()
    assert emit_report(back, "json") == data
    assert json.loads(data)["schema_version"] == "1.0"


def test_empty_report():
    s = scenario_from_dict({"system": {"preset": "free", "N": 2}, "checks": []})
    rep = run_scenario(s)
    assert rep.records == [] and rep.passed
    assert parse_report(emit_report(rep)).records == []
    assert b"0/0 records passed" in emit_report(rep, "text")


def test_text_report_and_failures():
    s = scenario_from_dict({
        "system": {"preset": "pair-zz", "N": 2},
        "checks": ["group_law", "index_identity"],
        "tolerance_overrides": {"group_law": 0.0},
        "times": [0.3, 0.7],
        "instances": 1,
    })
    rep = run_scenario(s)
    assert not rep.passed
    assert {r.check for r in rep.failures()} == {"group_law"}
    text = emit_report(rep, "text").decode()
    assert "FAIL" in text and "overall FAIL" in text and "index_identity" in text


def test_non_finite_residual_renders():
    from dual_bbgky.harness.report import CheckRecord
    rep = VerificationReport(scenario={}, records=[CheckRecord("x", "a", {}, float("nan"), 1.0, "FAIL")])
    back = parse_report(emit_report(rep))
    assert math.isnan(back.records[0].residual)
    assert "FAIL" in emit_report(rep, "text").decode()


SCENARIO = "system:\n  preset: pair-zz\n  N: 2\nseed: 42\ntimes: [0.1, 0.7]\ninstances: 1\n"


def test_cli_run_deterministic(tmp_path, capsysbinary):
    p = write(tmp_path, SCENARIO)
    outs = []
    for _ in range(2):
        assert main(["run", str(p), "--deterministic"]) == 0
        outs.append(capsysbinary.readouterr().out)
    assert outs[0] == outs[1]
    assert json.loads(outs[0])["passed"] is True


def test_cli_out_writes_plot_data(tmp_path):
    p = write(tmp_path, SCENARIO)
    out = tmp_path / "rep" / "report.json"
    assert main(["run", str(p), "--out", str(out), "--deterministic"]) == 0
    assert json.loads(out.read_text())["scenario"]["seed"] == 42
    rt = (tmp_path / "rep" / "report.residual_vs_t.tsv").read_text().splitlines()
    assert rt[0] == "check\tt\tresidual\ttolerance" and len(rt) > 1
    rg = (tmp_path / "rep" / "report.ratio_vs_gamma.tsv").read_text().splitlines()
    assert rg[0] == "gamma\tworst_ratio\tbound" and len(rg) == 1 + len(DEFAULT_GAMMAS)
    assert (tmp_path / "rep" / "report.residual_vs_t.png").stat().st_size > 0
    assert (tmp_path / "rep" / "report.ratio_vs_gamma.png").stat().st_size > 0


def test_cli_exit_codes(tmp_path, capsys):
    p = write(tmp_path, SCENARIO + "tolerance_overrides:\n  group_law: 0.0\n")
    assert main(["run", str(p), "--checks", "group_law", "--format", "text"]) == 1
    assert "FAIL" in capsys.readouterr().out
    assert main(["run", str(p), "--checks", "index_identity", "--seed", "7"]) == 0
    capsys.readouterr()
    assert main(["run", str(p), "--checks", "nope"]) == 2
    assert "valid ids" in capsys.readouterr().err
    bad = write(tmp_path, "system:\n  d: 2\n  N: 2\n  h1: [[0, 1], [0, 0]]\n", "bad.yaml")
    assert main(["validate", str(bad)]) == 2
    assert "system.h1" in capsys.readouterr().err
    big = write(tmp_path, "system:\n  preset: free\n  N: 12\n", "big.yaml")
    assert main(["run", str(big)]) == 2
    assert main(["validate", str(p)]) == 0
    assert main(["list-checks"]) == 0
    listed = capsys.readouterr().out
    assert all(cid in listed for cid in CHECKS)


def test_cli_rejects_bad_seed(tmp_path):
    p = write(tmp_path, SCENARIO)
    with pytest.raises(SystemExit):
        main(["run", str(p), "--seed", "-3"])


def test_seed_changes_random_instances():
    a = scenario_from_dict({"system": {"preset": "random", "N": 2}, "seed": 1})
    b = scenario_from_dict({"system": {"preset": "random", "N": 2}, "seed": 2})
    assert not np.allclose(a.spec_for(0).h1, b.spec_for(0).h1)
    assert np.array_equal(a.spec_for(1).h1, a.spec_for(1).h1)
    assert not np.allclose(a.spec_for(0).h1, a.spec_for(1).h1)


@pytest.mark.parametrize("path", sorted(p.name for p in (Path(__file__).parent.parent / "scenarios").glob("*.yaml")))
def test_shipped_scenarios_validate(path):
    s = load_scenario(Path(__file__).parent.parent / "scenarios" / path)
    assert s.spec_for(0).d == 2
