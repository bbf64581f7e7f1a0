import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from qsv import cli, strategy as strat
from qsv.states import density_to_json


def run(argv, capsys):
    code = cli.main(argv)
    out, err = capsys.readouterr()
    return code, out, err


def write_config(tmp_path, **overrides):
    config = {
        "theta_degrees": 45,
        "strategy": "auto",
        "source": {"kind": "pure"},
        "mode": {"kind": "fixed_delta", "value": 0.05},
        "n_max": 1000,
        "trials": 1,
        "seed": 1,
        "output_path": "out.csv",
    }
    config.update(overrides)
    path = tmp_path / "config.json"
    path.write_text(json.dumps(config))
    return path


def read_rows(path):
    with open(path) as fh:
        return list(csv.DictReader(line for line in fh if not line.startswith("#")))


def test_bounds_singlet(capsys):
    code, out, _ = run(["bounds", "--epsilon", "0.01", "--delta", "0.05", "--theta", "45", "--json"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["n_local"] == 448 and d["n_global"] == 299
    assert d["penalty"] == pytest.approx(1.5)
    assert d["n_local_real"] == pytest.approx(447.86, abs=0.01)


def test_bounds_product_state(capsys):
    _, out, _ = run(["bounds", "--epsilon", "0.01", "--delta", "0.05", "--theta", "0", "--json"], capsys)
    d = json.loads(out)
    assert d["n_local"] == d["n_global"] == 299


def test_bounds_partial_penalty(capsys):
    _, out, _ = run(["bounds", "--epsilon", "0.01", "--delta", "0.05", "--theta", "30", "--json"], capsys)
    assert json.loads(out)["penalty"] == pytest.approx(2 + math.sqrt(3) / 4, abs=1e-6)
    assert json.loads(out)["penalty"] == pytest.approx(2.433013, abs=1e-6)


def test_bounds_table_output(capsys):
    code, out, _ = run(["bounds", "--epsilon", "0.01", "--delta", "0.05"], capsys)
    assert code == 0
    table = dict(line.split(None, 1) for line in out.strip().splitlines())
    assert table["n_local"].strip() == "448"
    assert table["penalty"].strip() == "1.5"


@pytest.mark.parametrize("argv,flag", [
    (["bounds", "--epsilon", "1.5", "--delta", "0.05"], "--epsilon"),
    (["bounds", "--epsilon", "0.1", "--delta", "0"], "--delta"),
    (["bounds", "--epsilon", "0.1", "--delta", "0.1", "--theta", "100"], "--theta"),
    (["bounds", "--epsilon", "abc", "--delta", "0.1"], "--epsilon"),
    (["strategy", "--theta", "-5"], "--theta"),
])
def test_invalid_arguments_exit_2(argv, flag, capsys):
    code, _, err = run(argv, capsys)
    assert code == 2
    assert err.startswith("error:") and len(err.strip().splitlines()) == 1
    assert flag in err


def test_strategy_singlet_json(capsys):
    code, out, _ = run(["strategy", "--theta", "45", "--check-table"], capsys)
    assert code == 0
    d = json.loads(out)
    assert d["omega_eigenvalues"] == pytest.approx([1, 1 / 3, 1 / 3, 1 / 3], abs=1e-12)
    rows = {r["label"]: r for r in d["table_check"]["rows"]}
    assert rows["ZZ"]["max_deviation"] == 0.0
    assert rows["XX"]["max_deviation"] < 1e-6


def test_strategy_info_alias(capsys):
    code, out, _ = run(["strategy-info", "--theta", "0"], capsys)
    assert code == 0 and json.loads(out)["f"] == 1.0


def test_strategy_partial_weights(capsys):
    _, out, _ = run(["strategy", "--theta", "30"], capsys)
    d = json.loads(out)
    assert len(d["settings"]) == 4
    assert sum(s["weight"] for s in d["settings"]) == pytest.approx(1.0, abs=1e-12)


def test_strategy_check_table_missing_annotations(capsys):
    code, _, err = run(["strategy", "--theta", "20", "--check-table"], capsys)
    assert code == 2 and err.startswith("error:")


def test_strategy_self_check_failure_exit_3(monkeypatch, capsys):
    monkeypatch.setattr(strat, "partial_efficiency", lambda theta: 0.5)
    code, _, err = run(["strategy", "--theta", "30"], capsys)
    assert code == 3
    assert err.startswith("error:") and "residuals=" in err
    assert len(err.strip().splitlines()) == 1


def test_simulate_fixed_epsilon(tmp_path, capsys):
    cfg = write_config(tmp_path, mode={"kind": "fixed_epsilon", "value": 0.01})
    code, _, _ = run(["simulate", str(cfg)], capsys)
    assert code == 0
    rows = read_rows(tmp_path / "out.csv")
    assert len(rows) == 1000
    assert list(rows[0]) == ["step", "setting", "outcome", "m", "bound", "inconclusive"]
    assert float(rows[-1]["bound"]) == pytest.approx((1 - 1 / 150) ** 1000, rel=1e-12)


def test_simulate_product_state_40000(tmp_path, capsys):
    cfg = write_config(tmp_path, theta_degrees=0, n_max=40000)
    assert run(["simulate", str(cfg)], capsys)[0] == 0
    rows = read_rows(tmp_path / "out.csv")
    assert float(rows[-1]["bound"]) == pytest.approx(1 - 0.05 ** (1 / 40000), rel=1e-12)
    assert float(rows[-1]["bound"]) == pytest.approx(7.49e-5, rel=1e-3)


def test_simulate_is_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path, source={"kind": "werner", "parameters": {"p": 0.05}}, n_max=3000)
    run(["simulate", str(cfg), "--output", str(tmp_path / "a.csv")], capsys)
    run(["simulate", str(cfg), "--output", str(tmp_path / "b.csv")], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    run(["simulate", str(cfg), "--output", str(tmp_path / "c.csv"), "--seed", "2"], capsys)
    assert (tmp_path / "a.csv").read_bytes() != (tmp_path / "c.csv").read_bytes()


def test_simulate_float_format(tmp_path, capsys):
    cfg = write_config(tmp_path, n_max=10)
    run(["simulate", str(cfg)], capsys)
    bound = read_rows(tmp_path / "out.csv")[-1]["bound"]
    assert float(bound) == float(format(float(bound), ".17g"))
    assert len(bound.replace(".", "").lstrip("0")) <= 17


def test_simulate_multiple_trials(tmp_path, capsys):
    cfg = write_config(tmp_path, trials=3, n_max=50)
    code, out, _ = run(["simulate", str(cfg)], capsys)
    assert code == 0
    for k in range(3):
        assert (tmp_path / f"out_trial{k}.csv").exists()


def test_simulate_custom_source(tmp_path, capsys):
    rho = np.eye(4) / 4
    (tmp_path / "rho.json").write_text(json.dumps(density_to_json(rho)))
    cfg = write_config(tmp_path, source={"kind": "custom", "parameters": {"path": "rho.json"}}, n_max=20000,
                       mode={"kind": "fixed_epsilon", "value": 0.5})
    assert run(["simulate", str(cfg)], capsys)[0] == 0
    rows = read_rows(tmp_path / "out.csv")
    freq = int(rows[-1]["m"]) / len(rows)
    assert freq == pytest.approx(0.5, abs=4 * math.sqrt(0.25 / 20000))


def test_simulate_rotated_source(tmp_path, capsys):
    cfg = write_config(tmp_path, source={"kind": "rotated", "parameters": {"alice": [0, 10, 0], "bob": [0, 0, 0]}},
                       n_max=100)
    assert run(["simulate", str(cfg)], capsys)[0] == 0


@pytest.mark.parametrize("overrides,fragment", [
    ({"bogus": 1}, "unknown config keys"),
    ({"source": {"kind": "laser"}}, "source kind"),
    ({"source": {"kind": "werner", "parameters": {"q": 1}}}, "unknown parameters"),
    ({"source": {"kind": "werner", "parameters": {"p": 2}}}, "Werner"),
    ({"mode": {"kind": "fixed_delta", "value": 1.5}}, "mode value"),
    ({"n_max": 0}, "n_max"),
    ({"strategy": "magic"}, "strategy"),
    ({"theta_degrees": 30, "strategy": "singlet"}, "singlet"),
    ({"source": {"kind": "custom", "parameters": {"matrix": [[1, 0], [0, 1]]}}}, "density"),
])
def test_simulate_invalid_config_exit_2(tmp_path, capsys, overrides, fragment):
    cfg = write_config(tmp_path, **overrides)
    code, _, err = run(["simulate", str(cfg)], capsys)
    assert code == 2
    assert err.startswith("error:") and fragment in err
    assert len(err.strip().splitlines()) == 1


def test_simulate_missing_config(tmp_path, capsys):
    code, _, err = run(["simulate", str(tmp_path / "none.json")], capsys)
    assert code == 2 and err.startswith("error:")


def test_simulate_unwritable_exit_4(tmp_path, capsys):
    cfg = write_config(tmp_path, n_max=10)
    code, _, err = run(["simulate", str(cfg), "--output", str(tmp_path / "missing" / "x.csv")], capsys)
    assert code == 4 and err.startswith("error:")


def test_scaling_command(tmp_path, capsys):
    cfg = write_config(tmp_path, trials=5, n_range=[20, 80], output_path="scaling.csv")
    assert run(["scaling", str(cfg)], capsys)[0] == 0
    text = (tmp_path / "scaling.csv").read_text()
    lines = text.splitlines()
    assert lines[0] == "n,epsilon_mean,epsilon_stddev,inconclusive_count"
    assert len(lines) == 63 and lines[-1].startswith("# slope=")
    slope = float(lines[-1].split(",")[0].split("=")[1])
    assert slope == pytest.approx(-1, abs=0.05)
    rows = read_rows(tmp_path / "scaling.csv")
    n = np.array([int(r["n"]) for r in rows])
    np.testing.assert_allclose([float(r["epsilon_mean"]) for r in rows], 1.5 * (1 - 0.05 ** (1 / n)), rtol=1e-12)


def test_scaling_requires_fixed_delta_and_range(tmp_path, capsys):
    cfg = write_config(tmp_path, n_range=[20, 80], mode={"kind": "fixed_epsilon", "value": 0.01})
    assert run(["scaling", str(cfg)], capsys)[0] == 2
    cfg = write_config(tmp_path)
    code, _, err = run(["scaling", str(cfg)], capsys)
    assert code == 2 and "n_range" in err


def test_scaling_is_byte_identical(tmp_path, capsys):
    cfg = write_config(tmp_path, trials=8, n_range=[20, 60], source={"kind": "werner", "parameters": {"p": 0.05}})
    run(["scaling", str(cfg), "--output", str(tmp_path / "a.csv")], capsys)
    run(["scaling", str(cfg), "--output", str(tmp_path / "b.csv")], capsys)
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_module_entry_point():
    proc = subprocess.run([sys.executable, "-m", "qsv", "bounds", "--epsilon", "0.01", "--delta", "0.05", "--json"],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["n_local"] == 448
    proc = subprocess.run([sys.executable, "-m", "qsv", "frobnicate"], capture_output=True, text=True, check=False)
    assert proc.returncode == 2 and proc.stderr.startswith("error:")
