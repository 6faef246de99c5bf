import json
import subprocess
import sys

import pytest

from cliffcalc.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def write_config(tmp_path, name, data):
    path = tmp_path / name
    path.write_text(json.dumps(data))
    return str(path)


def load(out):
    return json.loads(out)


RICCATI_CFG = {
    "n": 3,
    "fields": {"f": {"e1": "1"}, "v": "0 - 1"},
    "grid": {"samples_per_axis": 4},
}


def test_riccati_check_pass(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", RICCATI_CFG)
    code, out, _ = run_cli(capsys, "riccati-check", "--config", cfg)
    assert code == 0
    payload = load(out)
    assert payload["overall_pass"] is True
    assert payload["schema_version"] == 1
    names = [r["name"] for r in payload["reports"]]
    assert names == ["riccati", "scalar_part", "bivector_part"]


def test_riccati_check_failure_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 2, "fields": {"f": {"e1": "1"}, "v": "1"},
        "grid": {"samples_per_axis": 3}})
    code, out, _ = run_cli(capsys, "riccati-check", "--config", cfg)
    assert code == 1
    assert load(out)["overall_pass"] is False


def test_config_error_exit_code(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"n": 2})
    code, _, err = run_cli(capsys, "riccati-check", "--config", cfg)
    assert code == 2 and "missing" in err
    code, _, _ = run_cli(capsys, "riccati-check", "--config", str(tmp_path / "nope.json"))
    assert code == 2
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    code, _, _ = run_cli(capsys, "riccati-check", "--config", str(bad))
    assert code == 2


def test_bad_expression_is_config_error(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 2, "fields": {"f": {"e1": "x9"}, "v": "0-1"}})
    code, _, err = run_cli(capsys, "riccati-check", "--config", cfg)
    assert code == 2


def test_missing_arguments(capsys):
    assert run_cli(capsys)[0] == 2
    assert run_cli(capsys, "riccati-check")[0] == 2


def test_list_claims(capsys):
    code, out, _ = run_cli(capsys, "--list-claims")
    assert code == 0
    for cmd in ("verify-identities", "decompose", "darboux-kvector", "family-gap"):
        assert cmd in out


def test_verify_identities_deterministic(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {"n": 2, "rounds": 5})
    outs = []
    for _ in range(2):
        code, out, _ = run_cli(capsys, "verify-identities", "--config", cfg, "--seed", "3")
        assert code == 0
        payload = load(out)
        payload.pop("wall_time_s")
        outs.append(json.dumps(payload, sort_keys=True))
    assert outs[0] == outs[1]


def test_config_round_trip(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", RICCATI_CFG)
    _, out, _ = run_cli(capsys, "riccati-check", "--config", cfg)
    first = load(out)
    # re-run from the echoed config; reports must be identical
    cfg2 = write_config(tmp_path, "echo.json", first["config"])
    _, out2, _ = run_cli(capsys, "riccati-check", "--config", cfg2)
    second = load(out2)
    assert first["reports"] == second["reports"]
    assert first["overall_pass"] == second["overall_pass"]


def test_out_flag(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", RICCATI_CFG)
    dest = tmp_path / "report.json"
    code, out, _ = run_cli(capsys, "riccati-check", "--config", cfg, "--out", str(dest))
    assert code == 0 and out == ""
    assert json.loads(dest.read_text())["overall_pass"] is True


def test_decompose_command(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 2, "fields": {"f": {"e1": "1"}, "v": "0 - 1", "phi": "1"},
        "lambda": 1.0, "grid": {"samples_per_axis": 4}})
    code, out, _ = run_cli(capsys, "decompose", "--config", cfg)
    assert code == 0
    payload = load(out)
    assert payload["extras"]["g_plus_at_center"] == "(0.5+0j)*1 + 0.5j*e2"
    assert payload["extras"]["variant"] == "A"


def test_decompose_dual_command(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 2, "fields": {"f": {"e1": "1"}, "phi": "1"},
        "lambda": 1.0, "grid": {"samples_per_axis": 4}})
    code, out, _ = run_cli(capsys, "decompose-dual", "--config", cfg)
    assert code == 0
    assert load(out)["extras"]["variant"] == "B"


def test_precondition_failure_is_numerical_failure(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 2, "fields": {"f": {"e1": "1"}, "v": "1", "phi": "1"},
        "lambda": 1.0, "grid": {"samples_per_axis": 3}})
    code, _, err = run_cli(capsys, "decompose", "--config", cfg)
    assert code == 1 and "check failed" in err


def test_mode_rejection_is_config_error(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 3, "mode": "full", "fields": {"f": {"e1": "1"}, "v": "0 - 1", "phi": "1"},
        "lambda": 1.0, "grid": {"samples_per_axis": 3}})
    code, _, _ = run_cli(capsys, "decompose", "--config", cfg)
    assert code == 2


def test_separable_command(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 2, "v_list": ["0 - 1", "0 - 1"],
        "grid": {"box": [[-0.8, 0.8], [-0.8, 0.8]], "samples_per_axis": 4}})
    code, out, _ = run_cli(capsys, "riccati-separable", "--config", cfg)
    assert code == 0 and load(out)["overall_pass"] is True


def test_separable_blowup_reported(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 1, "v_list": ["1"],
        "grid": {"box": [[-1.0, 2.0]], "samples_per_axis": 4}})
    code, out, _ = run_cli(capsys, "riccati-separable", "--config", cfg)
    assert code == 1
    payload = load(out)
    assert payload["overall_pass"] is False
    assert 1.4 < payload["extras"]["blow_up"]["x"] < 1.7


def test_family_gap_command(tmp_path, capsys):
    cfg = write_config(tmp_path, "c.json", {
        "n": 3, "K_samples": [2.0, -3.0, 0.5],
        "grid": {"samples_per_axis": 5}})
    code, out, _ = run_cli(capsys, "family-gap", "--config", cfg)
    assert code == 0
    assert load(out)["extras"]["min_distance"] >= 0.1


def test_console_entry_point():
    proc = subprocess.run([sys.executable, "-m", "cliffcalc.cli", "--list-claims"],
                          capture_output=True, text=True)
    assert proc.returncode == 0
    assert "verify-identities" in proc.stdout
