import json

import pytest

from dunkl_sobolev.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    out = capsys.readouterr()
    return code, out.out, out.err


def test_coherence_json_schema(capsys):
    code, out, _ = run(capsys, "coherence", "--preset", "hermite", "--n", "4", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert doc["schema_version"] == 1
    assert doc["command"] == "coherence"
    assert doc["config"]["N"] == 4
    assert doc["rows"][1]["tilde_gamma"] == pytest.approx(4.3, rel=1e-15)
    assert {r["key"] for r in doc["summary"]} >= {"D", "kappa", "t0", "positive_through"}


def test_json_floats_round_trip(capsys):
    _, out, _ = run(capsys, "sobolev", "--preset", "hermite", "--n", "4", "--format", "json")
    assert '"s": 17.600000000000001' in out
    assert json.loads(out)["rows"][1]["s"] == 17.6


def test_csv_default_mode_values(capsys):
    code, out, _ = run(capsys, "sobolev", "--preset", "hermite", "--n", "3")
    assert code == 0
    lines = out.strip().splitlines()
    assert lines[0] == "n,a,eta,s,e_n"
    assert lines[2].split(",")[3] == "17.600000000000001"


def test_paper_compat_flag(capsys):
    _, out, _ = run(capsys, "sobolev", "--preset", "hermite", "--n", "3", "--mode", "paper-compat",
                    "--format", "json")
    rows = json.loads(out)["rows"]
    assert rows[1]["s"] == pytest.approx(5.6, rel=1e-14)


def test_deterministic_output(capsys):
    argv = ("expand", "--preset", "gegenbauer", "--n", "6", "--format", "json")
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second


def test_usage_errors(capsys):
    assert run(capsys, "nonsense")[0] == 1
    assert run(capsys, "expand", "--family", "hermite", "--mu", "5")[0] == 1
    assert run(capsys, "expand", "--preset", "hermite", "--f", "x+*2")[0] == 1


def test_parameter_errors(capsys):
    code, _, err = run(capsys, "coherence", "--preset", "hermite", "--eps0", "0")
    assert code == 2 and err.startswith("error:")
    assert run(capsys, "sobolev", "--preset", "hermite", "--lambda", "-1")[0] == 2
    assert run(capsys, "coherence", "--family", "gegenbauer", "--mu", "1")[0] == 2


def test_quadrature_failure_exit(capsys):
    code, _, err = run(capsys, "expand", "--preset", "gegenbauer", "--quad-nodes", "3")
    assert code == 3
    assert "doubling" in err


def test_verify_exit_codes(capsys):
    code, out, _ = run(capsys, "verify", "--preset", "hermite", "--format", "json")
    assert code == 0
    doc = json.loads(out)
    assert all(c["status"] in ("pass", "info") for c in doc["checks"])
    assert run(capsys, "verify", "--preset", "hermite", "--perturb-eta", "3=1e-6")[0] == 4


def test_bad_perturb_spec(capsys):
    assert run(capsys, "verify", "--preset", "hermite", "--perturb-eta", "three")[0] == 1


def test_job_file_precedence(tmp_path, capsys):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"family": "hermite", "mu": 5, "lambda": 0.1, "eps0": 1.2, "eps1": 1.3,
                               "n": 5, "format": "json"}))
    _, out, _ = run(capsys, "sobolev", "--job", str(job), "--n", "3")
    doc = json.loads(out)
    assert doc["config"]["N"] == 3
    assert len(doc["rows"]) == 4


def test_job_file_unknown_key(tmp_path, capsys):
    job = tmp_path / "job.json"
    job.write_text(json.dumps({"colour": "red"}))
    assert run(capsys, "coherence", "--job", str(job))[0] == 2


def test_env_precision(monkeypatch, capsys):
    monkeypatch.setenv("DUNKL_PRECISION", "extended")
    _, out, _ = run(capsys, "coherence", "--preset", "hermite", "--n", "2", "--format", "json")
    assert json.loads(out)["config"]["precision"] == "extended"
    _, out, _ = run(capsys, "coherence", "--preset", "hermite", "--n", "2", "--format", "json",
                    "--precision", "double")
    assert json.loads(out)["config"]["precision"] == "double"


def test_expand_out_and_samples(tmp_path, capsys):
    out = tmp_path / "coeffs.csv"
    assert run(capsys, "expand", "--preset", "hermite", "--n", "4", "--out", str(out))[0] == 0
    assert out.read_text().startswith("n,w,f,F,sobolev_error")
    samples = (tmp_path / "coeffs.samples.txt").read_text().strip().splitlines()
    assert len(samples) >= 201


def test_polynomial_expand_tail(capsys):
    _, out, _ = run(capsys, "expand", "--preset", "hermite", "--n", "6", "--format", "json")
    rows = json.loads(out)["rows"]
    assert all(abs(r["F"]) < 1e-9 for r in rows[3:])


def test_quad(capsys):
    code, out, _ = run(capsys, "quad", "--preset", "gegenbauer", "--quad-nodes", "5", "--format", "json")
    assert code == 0
    rows = json.loads(out)["rows"]
    assert len(rows) == 5
    assert sum(r["weight"] for r in rows) == pytest.approx(1.0, rel=1e-13)
