import math

import numpy as np
import pytest

import qsim


def test_default_simulation():
    r = qsim.simulate()
    assert r["model"] == "basic"
    assert r["state"].shape == (len(r["t"]), 9)
    assert np.allclose(r["state"].sum(axis=1), 1.0, atol=1e-9)
    assert set(r["observables"]) == {"reported_active", "total_infected", "total_quarantined"}
    s = r["summary"]
    assert s["peak_value"] == pytest.approx(r["observables"]["total_infected"].max(), rel=1e-3)
    assert s["end_time"] > s["peak_time"] > 0


def test_config_accepts_dict_and_string():
    cfg = {"model": "extended", "params": {"psi_s": 0.1, "psi_a": 0.1}}
    a = qsim.peak(cfg)
    b = qsim.peak('{"model": "extended", "params": {"psi_s": 0.1, "psi_a": 0.1}}')
    assert a == b
    assert qsim.normalize_config(cfg)["params"]["psi_s"] == 0.1


def test_testing_lowers_the_peak():
    assert qsim.peak({"params": {"psi": 0.2}}) < qsim.peak({})


def test_matching_and_cost_ratio():
    m = qsim.match_peak({}, "abrupt", 0.1)
    assert m["parameter"] == "initial.quarantine_total"
    assert abs(m["achieved_peak"] / m["target_peak"] - 1) <= 1e-3
    c = qsim.cost_ratio({}, 0.1, "gradual")
    assert c["ratio"] > 1


def test_sweep_grid():
    g = qsim.sweep({"sweep": {"axis1": {"path": "psi", "values": [0.0, 0.2]},
                              "axis2": {"path": "rho", "values": [0.3, 0.6, 0.9]}}})
    assert g["values"].shape == (2, 3)
    assert all(math.isfinite(v) for v in g["values"].ravel())
    assert (g["values"][1] < g["values"][0]).all()


def test_errors_map_to_python_exceptions(tmp_path):
    with pytest.raises(qsim.ValidationError, match="rho"):
        qsim.simulate({"params": {"rho": 1.5}})
    with pytest.raises(ValueError):
        qsim.simulate({"unknown": 1})
    with pytest.raises(qsim.NumericalError):
        qsim.simulate({"integrator": {"t_max": 5}})
    with pytest.raises(ValueError, match="fig99"):
        qsim.figure("fig99", str(tmp_path))


def test_figure(tmp_path):
    assert "fig2" in qsim.figure_ids()
    files = qsim.figure("fig2", str(tmp_path))
    assert files
    assert all((tmp_path / f).exists() for f in files)
