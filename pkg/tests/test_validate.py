"""Sweep and doubling-metric tests at reduced grid sizes."""

import numpy as np
import pytest

from lepra_octl import (
    HeatMatrix,
    PRESET_TABLE_1,
    SweepSpec,
    TimeMesh,
    doubling_metric,
    heat_sweep,
    initial_state_preset,
    simulate,
)
from lepra_octl.errors import ConfigError
from lepra_octl.validate import thread_count

XV = initial_state_preset("validation")


def small_spec(**kw) -> SweepSpec:
    base = dict(
        param_x="alpha",
        param_y="gamma",
        x_range=(0.0563, 0.0763),
        y_range=(0.15, 0.2090),
        initial_state=XV,
        base_params=PRESET_TABLE_1,
        grid_n=5,
    )
    base.update(kw)
    return SweepSpec(**base)


def test_spec_rejects_unknown_parameter():
    with pytest.raises(ConfigError, match="unknown parameter"):
        small_spec(param_x="not_a_rate")


def test_spec_rejects_degenerate_settings():
    with pytest.raises(ConfigError):
        small_spec(param_y="alpha")  # same as param_x
    with pytest.raises(ConfigError):
        small_spec(grid_n=1)
    with pytest.raises(ConfigError):
        small_spec(x_range=(0.2, 0.1))
    with pytest.raises(ConfigError):
        small_spec(observe_day=-1.0)


def test_degenerate_sweep_equals_single_run():
    p = PRESET_TABLE_1
    spec = small_spec(
        grid_n=2,
        x_range=(p.alpha, p.alpha),
        y_range=(p.gamma, p.gamma),
    )
    matrix = heat_sweep(spec)
    n_steps = round(spec.observe_day / spec.step)
    mesh = TimeMesh(0.0, spec.observe_day, n_steps)
    single = simulate(XV, p, mesh).values[-1, 2]
    np.testing.assert_allclose(matrix.values, single, rtol=1e-13)
    assert matrix.values.shape == (2, 2)


def test_sweep_monotone_in_replication_and_clearance():
    m = heat_sweep(small_spec())
    # non-decreasing along alpha (columns), non-increasing along gamma (rows)
    assert np.all(np.diff(m.values, axis=1) >= -1e-10)
    assert np.all(np.diff(m.values, axis=0) <= 1e-10)

    m2 = heat_sweep(small_spec(param_y="y", y_range=(0.0002, 0.5003)))
    assert np.all(np.diff(m2.values, axis=0) <= 1e-10)


def test_sweep_nonnegative_and_reproducible():
    spec = small_spec()
    a = heat_sweep(spec)
    b = heat_sweep(spec)
    assert a.values.min() >= 0.0
    np.testing.assert_array_equal(a.values, b.values)


def test_sweep_independent_of_parallelism(monkeypatch):
    spec = small_spec(grid_n=4)
    monkeypatch.setenv("LEPRA_OCTL_THREADS", "1")
    serial = heat_sweep(spec)
    monkeypatch.setenv("LEPRA_OCTL_THREADS", "3")
    threaded = heat_sweep(spec)
    np.testing.assert_array_equal(serial.values, threaded.values)


def test_sweep_axis_orientation():
    # rows must follow the ordinate parameter: a sweep over y (pure clearance)
    # varies down the rows and is flat along columns when alpha is pinned
    spec = small_spec(
        param_y="y", y_range=(0.0002, 0.5003), x_range=(0.063, 0.063), grid_n=3
    )
    m = heat_sweep(spec)
    assert np.all(np.abs(np.diff(m.values, axis=1)) < 1e-12)
    assert np.all(np.diff(m.values[:, 0]) < 0.0)


def test_thread_count_parsing(monkeypatch):
    monkeypatch.delenv("LEPRA_OCTL_THREADS", raising=False)
    assert thread_count() >= 1
    monkeypatch.setenv("LEPRA_OCTL_THREADS", "0")
    assert thread_count() >= 1
    monkeypatch.setenv("LEPRA_OCTL_THREADS", "2")
    assert thread_count() == 2
    monkeypatch.setenv("LEPRA_OCTL_THREADS", "nope")
    with pytest.raises(ConfigError):
        thread_count()


def test_doubling_metric_constant_matrices():
    coords = np.linspace(0.0, 1.0, 4)
    hit = HeatMatrix(coords, coords, np.full((4, 4), 80.0))
    summary = doubling_metric(hit, 40.0)
    assert summary.fraction == 1.0
    assert summary.band == (68.0, 92.0)

    miss = HeatMatrix(coords, coords, np.full((4, 4), 40.0))
    summary = doubling_metric(miss, 40.0)
    assert summary.fraction == 0.0
    assert summary.min_value == summary.max_value == 40.0

    with pytest.raises(ValueError):
        doubling_metric(hit, 0.0)
