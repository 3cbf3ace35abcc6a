import csv
import json

import numpy as np
import pytest

from varwave.cli import run
from varwave.io import dumps_json, format_float

BASE = """
[coefficient]
kind = constant
c = 1.0

[period]
p = 2
q = 1

[spectrum]
m_max = 15
n_max = 10

[nonlinearity]
c_lin = -0.25
c_sat = 0.125
forcing = [["cos", 1, 1, 0.5]]

[solver]
alpha = {alpha}
beta = 0.65
"""

PROBE = """
[coefficient]
kind = constant

[period]
p = 2
q = 1

[spectrum]
m_max = 7
n_max = 6

[nonlinearity]
c_lin = -0.25
c_osc = 0.125

[solver]
alpha = -0.375
beta = -0.125
"""


@pytest.fixture
def config(tmp_path):
    def make(text=BASE, alpha=-1.15, name="run.ini"):
        path = tmp_path / name
        path.write_text(text.format(alpha=alpha) if "{alpha}" in text else text)
        return path

    return make


def test_spectrum_constant_coefficient(config, tmp_path):
    out = tmp_path / "spec.csv"
    assert run(["spectrum", "--config", str(config()), "--nmax", "20", "--out", str(out)]) == 0
    rows = list(csv.DictReader(out.open()))
    assert [float(r["lambda_sq"]) for r in rows] == [float(n * n) for n in range(1, 21)]


def test_gaps_summary(config, tmp_path, capsys):
    out = tmp_path / "gaps.json"
    assert run(["gaps", "--config", str(config()), "--format", "json", "--out", str(out)]) == 0
    summary = json.loads(out.read_text())["summary"]
    assert summary["lambda_lower"] == -1.25
    assert summary["lambda_upper"] == 0.75
    assert summary["min_abs_mu"] == 0.75
    assert json.loads(capsys.readouterr().out) == summary


def test_check_fails_on_lower_eigenvalue(config, tmp_path):
    out = tmp_path / "check.json"
    assert run(["check", "--config", str(config(alpha=-1.25)), "--out", str(out)]) == 1
    assert json.loads(out.read_text())["verdict"] is False
    assert run(["check", "--config", str(config()), "--out", str(out)]) == 0


def test_solve_refuses_unless_forced(config, tmp_path):
    out = tmp_path / "s.json"
    cfg = str(config(alpha=-1.25))
    assert run(["solve", "--config", cfg, "--out", str(out)]) == 1
    assert not out.exists()
    assert run(["solve", "--config", cfg, "--out", str(out), "--force"]) == 0
    assert json.loads(out.read_text())["check"]["verdict"] is False


def test_solve_then_verify(config, tmp_path):
    cfg = str(config())
    sol, grid_csv, ver = tmp_path / "s.json", tmp_path / "s.csv", tmp_path / "v.json"
    assert run(["solve", "--config", cfg, "--out", str(sol), "--grid-out", str(grid_csv)]) == 0
    report = json.loads(sol.read_text())
    assert report["residual_norm"] <= 1e-8 and report["bound_satisfied"]
    assert grid_csv.read_text().startswith("# varwave grid")
    assert run(["verify", "--config", cfg, "--solution", str(sol), "--out", str(ver)]) == 0
    checked = json.loads(ver.read_text())
    assert checked["spectral_residual"] == pytest.approx(report["residual_norm"], rel=1e-6)
    assert checked["weak_residual"] <= 1e-6


def test_outputs_are_byte_identical(config, tmp_path):
    cfg = str(config())
    a, b = tmp_path / "a.json", tmp_path / "b.json"
    assert run(["solve", "--config", cfg, "--out", str(a)]) == 0
    assert run(["solve", "--config", cfg, "--out", str(b)]) == 0
    assert a.read_bytes() == b.read_bytes()


def test_probe_uniqueness(config, tmp_path):
    out = tmp_path / "probe.json"
    assert run(["probe-uniqueness", "--config", str(config(PROBE)), "--starts", "5", "--out", str(out)]) == 0
    result = json.loads(out.read_text())
    assert result["n_distinct"] == 1 and result["all_converged"]
    # the forced problem is outside the probe's hypotheses
    assert run(["probe-uniqueness", "--config", str(config(alpha=-1.15, name="f.ini"))]) == 1


@pytest.mark.parametrize(
    "mutate",
    [
        lambda t: t.replace("p = 2", "p = 3"),
        lambda t: t.replace("[period]\np = 2\nq = 1\n", ""),
        lambda t: t.replace("kind = constant", "kind = cubic"),
        lambda t: t.replace("c = 1.0", "c = -1.0"),
        lambda t: "not an ini file",
        lambda t: t.replace("alpha = {alpha}", "alpha = low"),
    ],
)
def test_config_errors(config, mutate):
    assert run(["check", "--config", str(config(mutate(BASE)))]) == 3


def test_missing_file_and_unknown_flag(config, tmp_path):
    assert run(["gaps", "--config", str(tmp_path / "missing.ini")]) == 3
    assert run(["gaps", "--config", str(config()), "--bogus"]) == 3
    assert run(["verify", "--config", str(config()), "--solution", str(tmp_path / "nope.json")]) == 3


def test_sampled_coefficient_table_relative_path(config, tmp_path):
    x = np.linspace(0, np.pi, 257)
    np.savetxt(tmp_path / "u.txt", np.column_stack([np.ones_like(x), 0 * x, 0 * x]))
    text = BASE.replace("kind = constant\nc = 1.0", "kind = user_sampled\ntable = u.txt")
    out = tmp_path / "spec.csv"
    assert run(["spectrum", "--config", str(config(text)), "--out", str(out)]) == 0
    lam = [float(r["lambda_sq"]) for r in csv.DictReader(out.open())]
    np.testing.assert_allclose(lam, np.arange(1, 11) ** 2, atol=1e-9)


def test_seventeen_digit_serialisation():
    assert format_float(0.1) == "0.10000000000000001"
    assert format_float(2.0) == "2.0"
    assert dumps_json({"x": float("inf"), "y": [1, True, None]}) == '{"x": Infinity, "y": [1, true, null]}'
    for v in np.random.default_rng(0).normal(size=50):
        assert float(format_float(v)) == v
