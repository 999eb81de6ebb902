import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from delaynoise.errors import BadGrid, DimensionMismatch
from delaynoise.limit import (
    DriftKind,
    drift_coefficient,
    integrate_ito_sde,
    integrate_stratonovich_heun,
    noise_induced_drift,
)
from delaynoise.models import additive, bounded2d, linear1d, zero_model
from delaynoise.sdde import DelaySchedule, build_wiener

A = np.array([[0.7, -0.1], [0.2, 0.4]])
B = np.array([[0.5, 0.3], [-0.6, 0.8]])


def test_drift_coefficient_values():
    assert drift_coefficient(DriftKind.EXACT, 0.0, 1.0) == 0.5
    assert float(drift_coefficient("exact", 2.0, 2.0)) == pytest.approx(float(mpmath.exp(-1) / 2), rel=1e-15)
    assert float(drift_coefficient("taylor", 2.0, 2.0)) == 0.25
    assert round(float(drift_coefficient("exact", 1.0, 1.0)), 5) == 0.18394
    assert float(drift_coefficient("exact", 1e6, 1.0)) < 1e-300
    assert float(drift_coefficient("stratonovich", 3.0, 1.0)) == 0.5
    assert float(drift_coefficient("none", 3.0, 1.0)) == 0.0


def test_exact_equals_stratonovich_without_delay_and_tends_to_ito():
    k = np.array([0.1, 1.0, 7.0])
    np.testing.assert_array_equal(drift_coefficient("exact", 0.0, k), drift_coefficient("stratonovich", 0.0, k))
    assert float(drift_coefficient("exact", 1e3, 1e-3)) == 0.0


@pytest.mark.parametrize("r", np.round(np.concatenate([np.arange(0.01, 0.1, 0.01), np.arange(0.1, 10.01, 0.1)]), 4))
def test_coefficient_dominance_grid(r):
    exact = float(drift_coefficient("exact", r, 1.0))
    taylor = float(drift_coefficient("taylor", r, 1.0))
    assert 0 < exact < taylor <= 0.5


@settings(max_examples=200, deadline=None)
@given(st.floats(1e-6, 50.0))
def test_coefficient_dominance_property(r):
    exact = float(drift_coefficient("exact", r, 1.0))
    taylor = float(drift_coefficient("taylor", r, 1.0))
    assert exact < taylor
    assert 0 < exact <= 0.5 and 0 < taylor <= 0.5


@pytest.mark.parametrize("r", [1e-1, 1e-2, 1e-3])
def test_taylor_is_first_order_in_ratio(r):
    gap = float(drift_coefficient("taylor", r, 1.0) - drift_coefficient("exact", r, 1.0))
    assert gap / r**2 <= 1


@pytest.mark.parametrize("kind", list(DriftKind))
def test_additive_model_has_no_drift(kind):
    model = additive([[0.3, 1.0], [-0.4, 0.2]])
    sched = DelaySchedule((0.5, 1.0), (1.0, 2.0), 0.1)
    assert not np.any(noise_induced_drift(model, np.array([1.3, -0.7]), sched, kind))


@pytest.mark.parametrize("x", [0.0, 1.0])
def test_linear1d_exact_drift_scalar_path(x):
    a, b, c = -1.0, 0.6, 1.3
    c1, k1 = 0.7, 0.4
    expected = 0.5 * math.exp(-c1 / k1) * b * (b * x + c)
    got = noise_induced_drift(linear1d(a, b, c), np.array([x]), DelaySchedule((c1,), (k1,), 0.05), "exact")
    assert got[0] == pytest.approx(expected, rel=1e-14)


def _drift_loops(model, x, sched, kind):
    sig = model.sigma(x)
    jac = model.sigma_jac(x)
    out = np.zeros(model.m)
    for i in range(model.m):
        for p in range(model.m):
            for j in range(model.n):
                out[i] += float(drift_coefficient(kind, sched.c[p], sched.k[j])) * sig[p, j] * jac[i, j, p]
    return out


@pytest.mark.parametrize("kind", list(DriftKind))
def test_drift_matches_explicit_sum(kind):
    rng = np.random.default_rng(12)
    model = bounded2d(A, B)
    sched = DelaySchedule((0.3, 1.7), (0.5, 2.0), 0.05)
    for x in rng.normal(size=(20, 2)):
        np.testing.assert_allclose(noise_induced_drift(model, x, sched, kind), _drift_loops(model, x, sched, kind),
                                   rtol=1e-13, atol=1e-15)


def test_zero_delay_exact_equals_stratonovich():
    rng = np.random.default_rng(13)
    model = bounded2d(A, B)
    sched = DelaySchedule((0.0, 0.0), (0.5, 2.0), 0.05)
    x = rng.normal(scale=2, size=(50, 2))
    diff = noise_induced_drift(model, x, sched, "exact") - noise_induced_drift(model, x, sched, "stratonovich")
    assert np.abs(diff).max() <= 1e-12


@settings(max_examples=50, deadline=None)
@given(
    s=st.floats(0.01, 100.0),
    x=st.tuples(st.floats(-3, 3), st.floats(-3, 3)),
    kind=st.sampled_from(list(DriftKind)),
)
def test_drift_depends_only_on_ratios(s, x, kind):
    model = bounded2d(A, B)
    base = DelaySchedule((0.3, 1.7), (0.5, 2.0), 0.05)
    scaled = DelaySchedule((0.3 * s, 1.7 * s), (0.5 * s, 2.0 * s), 0.05 / s)
    x = np.array(x)
    np.testing.assert_allclose(noise_induced_drift(model, x, base, kind), noise_induced_drift(model, x, scaled, kind),
                               rtol=1e-12, atol=1e-12)


def test_noise_induced_drift_dimension_check():
    with pytest.raises(DimensionMismatch):
        noise_induced_drift(bounded2d(), np.zeros(2), DelaySchedule((0.0,), (1.0, 1.0), 0.1), "exact")


@pytest.mark.parametrize("h", [1e-3, 1e-4])
def test_ito_deterministic_decay(h):
    x = integrate_ito_sde(zero_model(decay=1.0), DelaySchedule((0.0,), (1.0,), 1.0), "exact", [1.0],
                          build_wiener(0, 0.0, 1.0, h), h)
    assert abs(x.terminal[0, 0] - math.exp(-1)) <= 5 * h


def test_ito_identity_diffusion_reproduces_wiener_path():
    model = additive(np.eye(2))
    w = build_wiener(3, -0.1, 1.0, 0.01, 2, range(3))
    x = integrate_ito_sde(model, DelaySchedule((0.0, 0.0), (1.0, 1.0), 1.0), "none", [0.0, 0.0], w, 0.01)
    W = np.cumsum(w.increments[:, w.index_of(0.0):, :], axis=1)
    np.testing.assert_allclose(x.states[:, 1:, :], W, rtol=0, atol=1e-14)
    assert not np.any(x.states[:, 0, :])


def test_ito_linear_mean():
    a, T, x0 = -1.0, 1.0, 1.0
    model = linear1d(a, 0.5, 1.0)
    h = 1e-3
    x = integrate_ito_sde(model, DelaySchedule((0.0,), (1.0,), 0.1), "none", [x0],
                          build_wiener(5, 0.0, T, h, 1, range(10_000)), h)
    xt = x.terminal[:, 0]
    assert abs(xt.mean() - math.exp(a * T) * x0) < 3 * xt.std(ddof=1) / math.sqrt(xt.size)


def test_heun_linear_stratonovich_mean():
    # Stratonovich dx = a x dt + (b x + c) o dW has mean m' = (a + b^2/2) m + b c / 2
    a, b, c, T, x0 = -1.0, 0.5, 1.0, 1.0, 0.5
    lam = a + b * b / 2
    mean = math.exp(lam * T) * x0 + (b * c / 2) * (math.exp(lam * T) - 1) / lam
    h = 1e-3
    x = integrate_stratonovich_heun(linear1d(a, b, c), [x0], build_wiener(6, 0.0, T, h, 1, range(10_000)), h)
    xt = x.terminal[:, 0]
    assert abs(xt.mean() - mean) < 3 * xt.std(ddof=1) / math.sqrt(xt.size)


def test_constant_sigma_paths_identical_across_kinds():
    model = additive([[0.3, 1.0], [-0.4, 0.2]])
    sched = DelaySchedule((0.5, 1.0), (1.0, 2.0), 0.1)
    w = build_wiener(7, 0.0, 1.0, 0.001, 2, range(2))
    paths = [integrate_ito_sde(model, sched, kind, [0.1, 0.2], w, 0.001).states for kind in DriftKind]
    for p in paths[1:]:
        np.testing.assert_array_equal(paths[0], p)


def test_ito_grid_errors():
    sched = DelaySchedule((0.0,), (1.0,), 0.1)
    with pytest.raises(BadGrid):
        integrate_ito_sde(linear1d(), sched, "exact", [0.0], build_wiener(0, 0.0, 1.0, 0.01), 0.02)
    with pytest.raises(DimensionMismatch):
        integrate_ito_sde(linear1d(), sched, "exact", [0.0], build_wiener(0, 0.0, 1.0, 0.01, 2), 0.01)
    with pytest.raises(DimensionMismatch):
        integrate_ito_sde(linear1d(), sched, "exact", [0.0, 1.0], build_wiener(0, 0.0, 1.0, 0.01), 0.01)
