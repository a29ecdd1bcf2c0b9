import json
import math

import pytest

from msx.cli import main, run_experiment, verify_paper_examples


def _write_config(tmp_path, doc, name="config.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc))
    return path


def test_spectrum_example4(tmp_path):
    out = tmp_path / "out"
    cfg = _write_config(tmp_path, {"kind": "spectrum", "measure": "example4",
                                   "a": 0.5, "n_max": 200})
    assert main(["run", str(cfg), "--out", str(out)]) == 0
    rows = (out / "lambda.csv").read_text().strip().splitlines()
    assert rows[0] == "n,lambda_n,delta"
    assert len(rows) == 202
    summary = json.loads((out / "summary.json").read_text())
    assert summary["schema"] == 1
    assert abs(summary["limit"]["value"][0] - 1.0 / 3.0) <= 2e-3
    assert abs(summary["essinf_ac_density"] - 1.0 / 3.0) <= 1e-6


def test_spectrum_identity_density(tmp_path):
    out = tmp_path / "out"
    cfg = _write_config(tmp_path, {"kind": "spectrum", "measure": "circle_ac",
                                   "w": "one", "n_max": 10})
    assert run_experiment(json.loads(cfg.read_text()), out) == 0
    rows = (out / "lambda.csv").read_text().strip().splitlines()[1:]
    assert all(float(r.split(",")[1]) == 1.0 for r in rows)


def test_deterministic_output(tmp_path):
    cfg = {"kind": "spectrum", "measure": "example4", "a": 0.5, "n_max": 40}
    out1, out2 = tmp_path / "a", tmp_path / "b"
    assert run_experiment(cfg, out1) == 0
    assert run_experiment(cfg, out2) == 0
    assert (out1 / "lambda.csv").read_bytes() == (out2 / "lambda.csv").read_bytes()
    assert (out1 / "summary.json").read_bytes() == (out2 / "summary.json").read_bytes()


def test_invert_example3_shows_non_inverse(tmp_path):
    out = tmp_path / "out"
    cfg = {"kind": "invert", "measure": "example3", "window": 4, "n_max": 300,
           "truncation": 30}
    assert run_experiment(cfg, out) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["residuals"]["left"] >= 0.9
    assert summary["residuals"]["right"] >= 0.9
    assert not summary["residuals"]["trusted"]
    # the entrywise-limit window itself approximates 2I
    rows = (out / "a_window.csv").read_text().strip().splitlines()[1:]
    first = [float(tok) for tok in rows[0].split(",")]
    assert abs(first[0] - 2.0) <= 1e-4


def test_invert_example2_residuals_small(tmp_path):
    out = tmp_path / "out"
    cfg = {"kind": "invert", "measure": "example2", "a": 0.5, "window": 3,
           "n_max": 120, "truncation": 25}
    assert run_experiment(cfg, out) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["residuals"]["left"] <= 1e-8
    assert summary["residuals"]["right"] <= 1e-8
    assert summary["series_entries"]["0,0"]["value"][0] == pytest.approx(2.0, abs=1e-10)


def test_invert_pascal_numerical_failure(tmp_path):
    out = tmp_path / "out"
    cfg = {"kind": "invert", "measure": "pascal", "window": 4, "n_max": 60,
           "truncation": 40}
    assert run_experiment(cfg, out) == 3
    summary = json.loads((out / "summary.json").read_text())
    assert "breakdown" in summary["error"]


def test_asymptotics_example4(tmp_path):
    out = tmp_path / "out"
    cfg = {"kind": "asymptotics", "measure": "example4", "a": 0.5,
           "k_max": 4, "n_max": 120}
    assert run_experiment(cfg, out) == 0
    summary = json.loads((out / "summary.json").read_text())
    beta0 = summary["beta"][0]["value"][0]
    assert beta0 == pytest.approx(math.sqrt(3.0) / 2.0, abs=1e-8)
    alpha1 = summary["alpha"][1]["value"][0]
    assert alpha1 == pytest.approx(-0.5, abs=1e-8)
    assert (out / "beta_traces.csv").exists()


def test_asymptotics_probe_for_mixed_measure(tmp_path):
    out = tmp_path / "out"
    cfg = {"kind": "asymptotics", "measure": "example3", "k_max": 2, "n_max": 150}
    assert run_experiment(cfg, out) == 0
    summary = json.loads((out / "summary.json").read_text())
    probe = summary["ac_comparison"]
    assert probe["gaps"][0] <= 1e-6
    assert probe["lambda_limit"]["value"][0] == pytest.approx(0.5, abs=1e-10)


def test_toeplitz_limit_disk(tmp_path):
    out = tmp_path / "out"
    cfg = {"kind": "toeplitz-limit", "measure": "disk_uniform", "k_max": 3,
           "n_max": 400}
    assert run_experiment(cfg, out) == 0
    summary = json.loads((out / "summary.json").read_text())
    assert summary["max_deviation"] <= 1e-6
    rows = (out / "diagonal_limits.csv").read_text().strip().splitlines()
    assert rows[0] == "k,limit_re,limit_im,expected_re,expected_im"
    assert len(rows) == 8


def test_config_errors(tmp_path):
    assert run_experiment({"kind": "nope"}, tmp_path / "x") == 2
    assert run_experiment({"kind": "spectrum", "measure": "unknown"}, tmp_path / "y") == 2
    missing = tmp_path / "missing.json"
    assert main(["run", str(missing), "--out", str(tmp_path / "z")]) == 2


def test_moment_subcommand(tmp_path, capsys):
    doc = tmp_path / "disk.json"
    doc.write_text(json.dumps({"type": "disk_uniform"}))
    assert main(["moment", str(doc), "--i", "2", "--j", "2"]) == 0
    out = capsys.readouterr().out.split()
    assert float(out[0]) == pytest.approx(math.pi / 3)
    assert float(out[1]) == 0.0


def test_moment_subcommand_bad_doc(tmp_path, capsys):
    doc = tmp_path / "bad.json"
    doc.write_text(json.dumps({"type": "nope"}))
    assert main(["moment", str(doc), "--i", "0", "--j", "0"]) == 2


def test_verify_single_criterion(capsys):
    assert main(["verify", "--only", "10"]) == 0
    out = capsys.readouterr().out
    assert "[PASS" in out and "criterion 10" in out
    assert "1/1 checks passed" in out


def test_verify_distinguishes_non_convergence(capsys):
    # a capped run must report "not converged", not a plain failure
    code = verify_paper_examples(only={4}, n_cap=10)
    out = capsys.readouterr().out
    assert code == 1
    assert "NOCONV" in out
    assert "FAIL" not in out
