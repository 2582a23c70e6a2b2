import json
import math
import subprocess
import sys

import numpy as np
import pytest

from confluent_arnoldi.cli import main, model_from_json, model_to_json
from confluent_arnoldi.experiments import ExperimentConfig, run_experiment
from confluent_arnoldi.fitting import evaluate, fit_hermite, hermite_data
from confluent_arnoldi.table import ResultTable, emit_plot


def small_table():
    t = ResultTable(["n", "err_f_naive", "err_f_arnoldi"])
    t.append({"n": 1, "err_f_naive": 0.1, "err_f_arnoldi": 1 / 3})
    t.append({"n": 2, "err_f_arnoldi": 2.5e-17})
    return t


# ---------------------------------------------------------------- table

def test_csv_round_trip_exact():
    t = small_table()
    back = ResultTable.from_csv(t.to_csv())
    assert back == t
    assert back.rows[0][2] == 1 / 3
    assert math.isnan(back.rows[1][1])
    assert isinstance(back.rows[0][0], int)


def test_csv_round_trip_experiment(tmp_path):
    cfg = ExperimentConfig("ex2", n_min=0, n_max=10, step=5, out=str(tmp_path / "a.csv"))
    t = run_experiment(cfg)
    assert ResultTable.read_csv(tmp_path / "a.csv") == t


def test_rerun_is_byte_identical(tmp_path):
    for name in ("a.csv", "b.csv"):
        run_experiment(ExperimentConfig("ex6", n_min=5, n_max=10, step=5,
                                        out=str(tmp_path / name)))
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()


def test_plot_single_row(tmp_path):
    t = ResultTable(["n", "err_f_arnoldi"], [(3, 1e-3)])
    emit_plot(t, tmp_path / "p.svg")
    svg = (tmp_path / "p.svg").read_text()
    assert svg.startswith("<svg") and svg.count("<circle") == 1


def test_plot_series_and_log_axis(tmp_path):
    emit_plot(small_table(), tmp_path / "p.svg", title="t")
    svg = (tmp_path / "p.svg").read_text()
    assert "err_f_naive" in svg and "err_f_arnoldi" in svg
    assert "1e-17" in svg or "1e-16" in svg


def test_plot_empty_table_writes_nothing(tmp_path):
    with pytest.raises(ValueError):
        emit_plot(ResultTable(["n", "err"]), tmp_path / "p.svg")
    assert not (tmp_path / "p.svg").exists()


# ---------------------------------------------------------------- experiments config

@pytest.mark.parametrize("kwargs", [
    dict(experiment="ex8"),
    dict(experiment="ex1", n_min=10, n_max=5),
    dict(experiment="ex1", step=0),
    dict(experiment="ex2", points_factor=0),
    dict(experiment="ex2", basis="lagrange"),
    dict(experiment="ex7", integrand="cos"),
])
def test_config_validation(kwargs):
    with pytest.raises(ValueError):
        ExperimentConfig(**kwargs)


def test_ex1_degrees_are_odd():
    assert ExperimentConfig("ex1", n_min=2, n_max=9).degrees() == [3, 5, 7, 9]


def test_ex7_zero_integrand():
    t = run_experiment(ExperimentConfig("ex7", n_min=20, n_max=100, step=40, integrand="zero"))
    for c in t.columns[1:]:
        assert max(t.column(c)) <= 1e-15


def test_methods_selection():
    cfg = ExperimentConfig("ex4", basis="hermite", baseline=False)
    assert cfg.methods() == ["arnoldi"]


# ---------------------------------------------------------------- model json, CLI

def test_model_json_round_trip():
    data = hermite_data(np.cos, [lambda x: -np.sin(x)], np.linspace(-1, 1, 8))
    model = fit_hermite(data, 9)
    back = model_from_json(model_to_json(model))
    np.testing.assert_array_equal(back.d, model.d)
    np.testing.assert_array_equal(back.h, model.h)
    s = np.linspace(-1, 1, 5)
    np.testing.assert_array_equal(evaluate(back, s)[1], evaluate(model, s)[1])


def write_data(path, x, cols):
    header = "x," + ",".join(cols)
    rows = np.column_stack([x] + [cols[c] for c in cols])
    np.savetxt(path, rows, delimiter=",", header=header, comments="")


def test_cli_fit_and_eval(tmp_path, capsys):
    x = np.linspace(-1, 1, 6)
    write_data(tmp_path / "d.csv", x, {"f": x ** 3, "fp": 3 * x ** 2})
    assert main(["fit", "--data", str(tmp_path / "d.csv"), "-n", "3",
                 "--model", str(tmp_path / "m.json")]) == 0
    assert json.loads((tmp_path / "m.json").read_text())["basis_kind"] == "hermite"
    assert main(["eval", "--model", str(tmp_path / "m.json"), "--x", "0.5", "2",
                 "--order", "2", "--out", str(tmp_path / "e.csv")]) == 0
    t = ResultTable.read_csv(tmp_path / "e.csv")
    assert t.columns == ["x", "p", "p1", "p2"]
    np.testing.assert_allclose(t.rows[1], [2, 8, 12, 12], rtol=1e-12)


def test_cli_values_basis_and_integral(tmp_path):
    x = np.linspace(-1, 1, 12)
    write_data(tmp_path / "d.csv", x, {"f": 2 * x, "fp": 2 * np.ones_like(x)})
    assert main(["fit", "--data", str(tmp_path / "d.csv"), "-n", "2", "--basis", "values",
                 "--model", str(tmp_path / "v.json")]) == 0
    assert main(["fit", "--data", str(tmp_path / "d.csv"), "-n", "2", "--integral",
                 "--model", str(tmp_path / "i.json")]) == 0
    model = model_from_json((tmp_path / "i.json").read_text())
    p, pp = evaluate(model, [0.0, 0.7])
    assert abs((p[1] - p[0]) - 0.49) <= 1e-13


def test_cli_experiment_outputs(tmp_path):
    out, plot = tmp_path / "r.csv", tmp_path / "r.svg"
    assert main(["experiment", "ex2", "--n-min", "5", "--n-max", "10", "--step", "5",
                 "--no-baseline", "--out", str(out), "--plot", str(plot)]) == 0
    t = ResultTable.read_csv(out)
    assert t.column("n") == [5, 10]
    assert not any("naive" in c for c in t.columns)
    assert plot.read_text().startswith("<svg")


@pytest.mark.parametrize("argv", [
    ["experiment", "ex1", "--n-min", "9", "--n-max", "3"],
    ["fit", "--data", "/nonexistent.csv", "-n", "2"],
    ["eval", "--model", "/nonexistent.json", "--x", "0"],
])
def test_cli_config_errors_exit_2(argv, capsys):
    assert main(argv) == 2
    assert "error" in capsys.readouterr().err


def test_cli_unwritable_output_exit_2():
    assert main(["experiment", "ex6", "--n-min", "5", "--n-max", "5",
                 "--out", "/nonexistent/dir/x.csv"]) == 2


def test_cli_breakdown_exit_3(tmp_path):
    write_data(tmp_path / "d.csv", np.array([0.5, 0.5, -0.5]), {"f": np.ones(3)})
    with pytest.warns(RuntimeWarning):
        assert main(["fit", "--data", str(tmp_path / "d.csv"), "-n", "2"]) == 3


def test_cli_module_entry_unknown_experiment():
    r = subprocess.run([sys.executable, "-m", "confluent_arnoldi", "experiment", "ex9"],
                       capture_output=True, text=True)
    assert r.returncode == 2
