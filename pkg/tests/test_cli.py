import csv
import io
import json
import math
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qbm import cli

RECIPES = Path(__file__).resolve().parent.parent / "recipes"


def run(tmp_path, *argv, name="out.csv"):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    text = out.read_text() if out.exists() else ""
    return code, text


def table(text):
    lines = [l for l in text.splitlines() if not l.startswith("#")]
    rows = list(csv.DictReader(io.StringIO("\n".join(lines))))
    return rows


def summary(text):
    line = [l for l in text.splitlines() if l.startswith("# summary:")][0]
    return dict(kv.split("=") for kv in line[len("# summary: "):].split(", "))


def test_parse_range():
    assert cli.parse_range("0:1:3") == [0.0, 0.5, 1.0]
    assert cli.parse_range("1:100:3:log") == pytest.approx([1, 10, 100])
    assert cli.parse_range("0.1, 0.5") == [0.1, 0.5]
    for bad in ("0:1:0", "1:2", "0:1:3:lin", "", "0:1:3:log"):
        with pytest.raises(ValueError):
            cli.parse_range(bad)


def test_units_header(tmp_path):
    code, text = run(tmp_path, "entropy-sweep", "--gamma", "1", "--temp", "0.5")
    assert code == 0
    assert text.splitlines()[0] == "# units: hbar=k=m=1, omega0=1; command=entropy-sweep"


def test_entropy_sweep_weak_coupling(tmp_path):
    code, text = run(tmp_path, "entropy-sweep", "--gamma", "1e-6", "--temp-range", "0.2:2:4")
    assert code == 0
    rows = table(text)
    assert len(rows) == 4
    for r in rows:
        s = [float(r[k]) for k in ("S_thermo", "S_vN", "s_omega0")]
        assert max(s) - min(s) < 1e-4


def test_entropy_sweep_fig6_and_determinism(tmp_path):
    args = ["entropy-sweep", "--spec-file", str(RECIPES / "fig6.spec"), "--temp-range", "0.001:2:12"]
    code, text = run(tmp_path, *args)
    assert code == 0
    rows = table(text)
    assert all(float(r["S_vN"]) > float(r["S_thermo"]) for r in rows)
    assert float(rows[0]["gamma"]) == pytest.approx(2.4313, abs=1e-3)
    code2, text2 = run(tmp_path, *args, name="again.csv")
    assert text2 == text
    code3, text3 = run(tmp_path, *args, "--workers", "2", name="pool.csv")
    assert text3 == text


def test_flags_override_spec_file(tmp_path):
    spec = tmp_path / "s.spec"
    spec.write_text("gamma=0.5\ncutoff=20\ntemp=1.0\n")
    code, text = run(tmp_path, "entropy-sweep", "--spec-file", str(spec), "--gamma", "0.25")
    rows = table(text)
    assert float(rows[0]["gamma"]) == 0.25 and float(rows[0]["cutoff"]) == 20.0


def test_json_output(tmp_path):
    code, text = run(tmp_path, "landauer", "--gamma", "0.5", "--temp", "0.05,0.1", "--format", "json")
    doc = json.loads(text)
    assert doc["units"]["hbar"] == 1
    assert doc["columns"][:3] == ["gamma", "cutoff", "T"]
    assert len(doc["rows"]) == 2


def test_density_matrix_squeezed_parity(tmp_path):
    code, text = run(tmp_path, "density-matrix", "--state", "squeezed", "--n-bar", "1")
    assert code == 0
    for r in table(text):
        n, m = int(r["n"]), int(r["m"])
        if n % 2 or m % 2:
            assert abs(float(r["rho_nm"])) < 1e-12
    s = summary(text)
    assert float(s["trace"]) > 1 - 1e-8
    assert float(s["n_var"]) == pytest.approx(4.0, abs=1e-6)


def test_density_matrix_thermal_diagonal(tmp_path):
    code, text = run(tmp_path, "density-matrix", "--state", "thermal", "--n-bar", "1")
    for r in table(text):
        if r["n"] != r["m"]:
            assert abs(float(r["rho_nm"])) < 1e-12


def test_density_matrix_fig5_closed_form(tmp_path):
    code, text = run(tmp_path, "density-matrix", "--gamma", "0.93", "--cutoff", "100", "--temp", "0")
    assert code == 0
    diag = [r for r in table(text) if r["n"] == r["m"]]
    for r in diag:
        assert float(r["rho_nm"]) == pytest.approx(float(r["rho_nn_closed_form"]), abs=1e-8)
    assert float(summary(text)["n_mean"]) == pytest.approx(0.5, abs=0.02)


def test_density_matrix_fig5_populations(tmp_path):
    code, text = run(tmp_path, "density-matrix", "--spec-file", str(RECIPES / "fig5.spec"))
    rows = table(text)
    assert list(rows[0]) == ["n", "rho_nn", "p_n", "thermal_rho_nn", "squeezed_rho_nn"]
    assert float(rows[1]["squeezed_rho_nn"]) == 0.0


def test_truncation_warning(tmp_path, capsys):
    code, text = run(tmp_path, "density-matrix", "--state", "thermal", "--n-bar", "3", "--n-max", "5")
    assert code == 0
    assert "trace deficit" in capsys.readouterr().err


def test_state_bounds(tmp_path):
    args = ["state-bounds", "--samples", "200", "--seed", "42"]
    code, text = run(tmp_path, *args)
    assert code == 0
    rows = table(text)
    assert len(rows) == 200
    for r in rows:
        assert float(r["dq2_norm"]) * float(r["dp2_norm"]) >= 1 - 1e-12
        assert float(r["mu"]) <= 1 + 1e-12
    assert run(tmp_path, *args, name="b.csv")[1] == text
    other = run(tmp_path, "state-bounds", "--samples", "200", "--seed", "43", name="c.csv")[1]
    assert other != text


def test_sampling_box():
    pts = cli.sample_parameters(5000, 1)
    for col, key in enumerate(("gamma", "cutoff", "T")):
        lo, hi = cli.BOUNDS_BOX[key]
        assert pts[:, col].min() >= lo and pts[:, col].max() <= hi
        # log-uniform: the log-midpoint splits the sample in half
        frac = np.mean(pts[:, col] < math.sqrt(lo * hi))
        assert abs(frac - 0.5) < 0.03


def test_bounds_violation_reported(monkeypatch, tmp_path, capsys):
    real = cli._bounds_row

    def fake(g, c, T, w0, spec):
        row = real(g, c, T, w0, spec)
        row[7] = 3 * row[6] * (row[6] + 1) + 1  # variance above the squeezed limit
        return row

    monkeypatch.setattr(cli, "_bounds_row", fake)
    code, _ = run(tmp_path, "state-bounds", "--samples", "3")
    assert code == cli.EXIT_CONSTRAINT
    assert "gamma=" in capsys.readouterr().err


def test_thermal_corner_on_bisector():
    row = cli._bounds_row(1e-5, 10.0, 1.0, 1.0, None)
    assert abs(row[3] - row[4]) < 1e-3


def test_landauer_fig7(tmp_path):
    code, text = run(tmp_path, "landauer", "--spec-file", str(RECIPES / "fig7.spec"),
                     "--temp-range", "0.01:0.1:4")
    assert code == 0
    rows = table(text)
    assert len(rows) == 8
    assert all(r["below_bound"] == "1" for r in rows)
    for r in rows:
        assert float(r["kTln2"]) == float(r["T"]) * math.log(2)


def test_oracle_two_oscillator(tmp_path):
    code, text = run(tmp_path, "oracle", "--N", "1")
    assert code == 0
    assert all(r["status"] == "PASS" for r in table(text))


def test_oracle_continuum(tmp_path):
    code, text = run(tmp_path, "oracle", "--N", "4000", "--gamma", "1", "--cutoff", "10", "--temp", "1")
    assert code == 0
    rows = {r["quantity"]: r for r in table(text)}
    assert set(rows) >= {"q2", "p2", "F_tot-F_b"}
    assert all(r["status"] == "PASS" for r in rows.values())


def test_oracle_failure_exit(tmp_path):
    code, text = run(tmp_path, "oracle", "--N", "20", "--gamma", "2", "--temp", "0.2")
    assert code == cli.EXIT_CONSTRAINT


def test_parameter_errors(tmp_path, capsys):
    assert cli.main(["entropy-sweep", "--gamma", "-1"]) == cli.EXIT_PARAM
    assert cli.main(["entropy-sweep", "--temp", "1", "--temp-range", "0:1:2"]) == cli.EXIT_PARAM
    assert cli.main(["entropy-sweep", "--temp-range", "0:1:0"]) == cli.EXIT_PARAM
    assert cli.main(["landauer", "--temp", "0"]) == cli.EXIT_PARAM
    assert cli.main(["oracle", "--gamma", "1,2"]) == cli.EXIT_PARAM
    assert cli.main(["entropy-sweep", "--spec-file", str(tmp_path / "missing")]) == cli.EXIT_PARAM
    bad = tmp_path / "bad.spec"
    bad.write_text("colour=blue\n")
    assert cli.main(["entropy-sweep", "--spec-file", str(bad)]) == cli.EXIT_PARAM
    with pytest.raises(SystemExit) as info:
        cli.main(["nonsense"])
    assert info.value.code == 2


def test_numerical_failure_names_grid_point(monkeypatch, tmp_path, capsys):
    def boom(T, p, spec=None):
        raise ArithmeticError("synthetic failure")

    monkeypatch.setattr(cli, "entropy_comparison", boom)
    code, text = run(tmp_path, "entropy-sweep", "--gamma", "1", "--temp", "0.3")
    assert code == cli.EXIT_NUMERIC
    err = capsys.readouterr().err
    assert "T=0.3" in err and "synthetic failure" in err
    assert "nan" in text


def test_env_rel_tol(monkeypatch):
    monkeypatch.setenv("QBM_QUAD_RTOL", "1e-7")
    args = cli.build_parser().parse_args(["landauer"])
    assert cli.resolve(args)["spec"].rel_tol == 1e-7
    args = cli.build_parser().parse_args(["landauer", "--rel-tol", "1e-9"])
    assert cli.resolve(args)["spec"].rel_tol == 1e-9


def test_module_entry_point():
    res = subprocess.run([sys.executable, "-m", "qbm", "oracle", "--N", "1"], capture_output=True, text=True)
    assert res.returncode == 0 and "omega_0" in res.stdout


@pytest.mark.parametrize("fig, command", [(1, "density-matrix"), (2, "density-matrix"), (3, "state-bounds"),
                                          (4, "state-bounds"), (5, "density-matrix"),
                                          (6, "entropy-sweep"), (7, "landauer")])
def test_recipes_exist(fig, command):
    text = (RECIPES / f"fig{fig}.spec").read_text()
    assert f"command={command}" in text
