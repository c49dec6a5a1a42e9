from __future__ import annotations

import json

import numpy as np
import pytest

from mvconcord.cli import EXIT_FAILED, EXIT_INPUT, EXIT_OK, EXIT_USAGE, main
from mvconcord.measures import BLOMQVIST, transition_constant

FAST = ["--samples", "100000", "--quad-points", "513"]


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_measure_comonotone_all(capsys):
    code, out, _ = run(capsys, "measure", "--copula", "M(3)", "--family", "all", *FAST)
    assert code == EXIT_OK
    report = json.loads(out)
    assert [r["name"].split("[")[0] for r in report["results"]] == ["spearman", "gini", "blomqvist", "kendall"]
    for r in report["results"]:
        tol = 5 * r["std_error"] if r["std_error"] else 1e-6
        assert abs(r["value"] - 1) <= tol
    assert report["config"]["mc_samples"] == 100000 and report["config"]["sigmas"] == 5.0
    assert report["command"]["copula"] == "M(3)"


def test_measure_kendall_fgm(capsys):
    code, out, _ = run(capsys, "measure", "--copula", "En(2,1.0)", "--family", "kendall")
    (r,) = json.loads(out)["results"]
    assert r["value"] == pytest.approx(2 / 9, abs=1e-12) and r["method"] == "exact"
    code, out, _ = run(capsys, "measure", "--copula", "En(2,1.0)", "--family", "kendall", "--monte-carlo", *FAST)
    (r,) = json.loads(out)["results"]
    assert r["method"] == "monte_carlo" and abs(r["value"] - 2 / 9) < 5 * r["std_error"]


def test_measure_reflected_comonotone_blomqvist(capsys):
    code, out, _ = run(capsys, "measure", "--copula", "refl(1)*M(4)", "--family", "blomqvist")
    (r,) = json.loads(out)["results"]
    assert r["value"] == pytest.approx(float(transition_constant(BLOMQVIST, 3) - 1), abs=1e-15)


def test_measure_errors(capsys):
    code, _, err = run(capsys, "measure", "--copula", "refl(1)*M(4")
    assert code == EXIT_USAGE and "position 11" in err
    code, _, err = run(capsys, "measure", "--copula", "M(13)")
    assert code == EXIT_INPUT and "cap" in err
    code, _, err = run(capsys, "measure", "--copula", "M(3)", "--family", "pearson")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "certify", "nonsense")
    assert code == EXIT_USAGE
    code, _, _ = run(capsys, "measure")
    assert code == EXIT_USAGE


def test_reports_are_byte_identical(capsys):
    argv = ["measure", "--copula", "mix(0.3,Pi(3),M(3))", "--family", "all", *FAST]
    _, first, _ = run(capsys, *argv)
    _, second, _ = run(capsys, *argv)
    assert first == second
    _, text, _ = run(capsys, *argv, "--format", "text")
    assert text.splitlines()[2].split() == ["name", "value", "method", "std_error", "expected", "pass"]


def test_config_file_and_env(capsys, tmp_path, monkeypatch):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"mc_samples": 1234, "seed": 7, "sigmas": 4}))
    monkeypatch.setenv("MVCONCORD_CONFIG", str(cfg))
    _, out, _ = run(capsys, "measure", "--copula", "M(2)", "--family", "blomqvist")
    report = json.loads(out)
    assert report["config"]["mc_samples"] == 1234 and report["config"]["sigmas"] == 4
    _, out, _ = run(capsys, "measure", "--copula", "M(2)", "--family", "blomqvist", "--seed", "9")
    assert json.loads(out)["config"]["seed"] == 9
    cfg.write_text(json.dumps({"bogus": 1}))
    code, _, err = run(capsys, "measure", "--copula", "M(2)")
    assert code == EXIT_INPUT and "bogus" in err


def _write(path, data, header=True):
    cols = ",".join(f"c{i}" for i in range(data.shape[1]))
    np.savetxt(path, data, delimiter=",", header=cols if header else "", comments="")


def test_data_comonotone_and_independent(capsys, tmp_path):
    rng = np.random.default_rng(3)
    x = rng.normal(size=400)
    p = tmp_path / "co.csv"
    _write(p, np.c_[x, np.exp(x), x**3])
    code, out, _ = run(capsys, "data", str(p), "--family", "blomqvist", "--family", "spearman")
    rows = {r["name"]: r for r in json.loads(out)["results"]}
    assert code == EXIT_OK
    assert rows["blomqvist kappa_3"]["value"] > 0.98
    assert {"spearman kappa_2[1,2]", "spearman kappa_2[1,3]", "spearman kappa_2[2,3]"} <= set(rows)

    p = tmp_path / "ind.csv"
    N = 3000
    _write(p, rng.random((N, 2)), header=False)
    code, out, _ = run(capsys, "data", str(p), "--family", "all", *FAST)
    null_sd = {"spearman": (1 / (N - 1)) ** 0.5, "kendall": (2 * (2 * N + 5) / (9 * N * (N - 1))) ** 0.5,
               "blomqvist": (1 / N) ** 0.5, "gini": (2 / (3 * N)) ** 0.5}
    for r in json.loads(out)["results"]:
        assert abs(r["value"]) < 4 * null_sd[r["name"].split()[0]]


def test_data_ubeda_check(capsys, tmp_path):
    rng = np.random.default_rng(5)
    z = rng.normal(size=(500, 3))
    z[:, 1] += z[:, 0]
    p = tmp_path / "three.csv"
    _write(p, z)
    code, out, _ = run(capsys, "data", str(p), "--ubeda-check", "--family", "spearman", "--family", "blomqvist")
    rows = {r["name"]: r for r in json.loads(out)["results"]}
    assert code == EXIT_OK
    for fam in ("spearman", "blomqvist"):
        pairs = sum(rows[f"{fam} kappa_2[{c}]"]["value"] for c in ("1,2", "1,3", "2,3"))
        assert rows[f"{fam} ubeda rhs"]["value"] == pytest.approx(pairs / 3, abs=1e-12)
        assert abs(rows[f"{fam} ubeda residual kappa_3 - rhs"]["value"]) < 0.05
    p2 = tmp_path / "two.csv"
    _write(p2, z[:, :2])
    code, _, err = run(capsys, "data", str(p2), "--ubeda-check")
    assert code == EXIT_INPUT


def test_data_file_errors(capsys, tmp_path):
    p = tmp_path / "bad.csv"
    p.write_text("a,b\n1,2\n3,x\n")
    code, _, err = run(capsys, "data", str(p))
    assert code == EXIT_INPUT and "line 3, column 2" in err
    code, _, err = run(capsys, "data", str(tmp_path / "missing.csv"))
    assert code == EXIT_INPUT


def test_certify_exit_codes(capsys):
    code, out, _ = run(capsys, "certify", "ubeda", "--family", "blomqvist")
    report = json.loads(out)
    assert code == EXIT_OK and report["passed"] is True
    names = [r["name"] for r in report["results"]]
    assert "a[blomqvist]_9,8" in names and any(n.startswith("kappa9[blomqvist]") for n in names)
    code, out, _ = run(capsys, "certify", "axioms", "--family", "blomqvist")
    report = json.loads(out)
    assert code == EXIT_OK
    gated = [r for r in report["results"] if r["passed"] is not None and not r["name"].startswith("A3")]
    assert gated and all(r["tolerance"] == 1e-12 for r in gated)
    code, out, _ = run(capsys, "certify", "asymptotics")
    names = [r["name"] for r in json.loads(out)["results"]]
    assert any("r_11 - 1" in n for n in names)


def test_certify_failure_gives_nonzero_exit(capsys, monkeypatch):
    import mvconcord.cli as cli
    from mvconcord.certify import Check

    monkeypatch.setattr(cli, "run_suite", lambda *a: [Check("forced", 1.0, 0.0, 0.1, False)])
    code, out, err = run(capsys, "certify", "theorems")
    assert code == EXIT_FAILED and json.loads(out)["passed"] is False and "forced" in err
