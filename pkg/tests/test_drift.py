import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import integrate

from levy_spde import kernels
from levy_spde.drift import (DriftSpec, apply_drift, cubic_drift, from_grid, make_collocation,
                             one_sided_constant, resolvent_scalar, to_grid, yosida_drift,
                             yosida_scalar, zero_drift)
from levy_spde.errors import DriftOverflowError, HypothesisViolation
from levy_spde.spectral import make_dirichlet_laplacian, make_shifted_neumann

ms = st.sampled_from([1.0, 10.0, 100.0, 1e4])
xs = st.floats(-5, 5, allow_nan=False)


def test_one_sided_constants():
    assert one_sided_constant([0, 0, 0, -1]) == 0.0
    assert one_sided_constant([0, 2.5, 0, -1]) == pytest.approx(2.5)
    assert one_sided_constant([0, -2.0]) == -2.0
    assert one_sided_constant([0.0]) == 0.0
    # g = -u^5 + u^3: g' = -5u^4 + 3u^2, max at u^2 = 3/10 -> 9/20
    assert one_sided_constant([0, 0, 0, 1, 0, -1]) == pytest.approx(0.45, rel=1e-12)


@pytest.mark.parametrize("coeffs", [[0, 0, 1], [0, 0, 0, 1], [1.0]])
def test_non_dissipative_rejected(coeffs):
    with pytest.raises(ValueError):
        one_sided_constant(coeffs)


def test_kappa_requires_m_above_eta():
    d = cubic_drift(2.0)
    assert d.kappa(math.inf) == 1.0
    assert d.kappa(4.0) == pytest.approx(0.5)
    with pytest.raises(HypothesisViolation) as exc:
        d.kappa(2.0)
    assert exc.value.hypothesis == "yosida_m_gt_eta"


@settings(max_examples=200, deadline=None)
@given(xs, ms)
def test_resolvent_solves_equation(x, m):
    d = cubic_drift()
    y = float(resolvent_scalar(d, m, np.array([x]))[0])
    assert y - float(d.g(y)) / m == pytest.approx(x, abs=1e-10)


@settings(max_examples=200, deadline=None)
@given(xs, ms)
def test_yosida_bounded_by_drift(x, m):
    d = cubic_drift()
    fm = float(yosida_scalar(d, m, np.array([x]))[0])
    assert abs(fm) <= abs(float(d.g(x))) * (1 + 1e-12)
    # F_m = m (J_m x - x)
    j = float(resolvent_scalar(d, m, np.array([x]))[0])
    assert fm == pytest.approx(m * (j - x), rel=1e-8, abs=1e-8)


@settings(max_examples=200, deadline=None)
@given(xs, xs, ms, st.floats(-1.0, 1.0))
def test_yosida_one_sided(x, y, m, c):
    d = cubic_drift(c)
    if m <= max(d.eta, 0):
        return
    # slope of F_m is g'/(1 - g'/m), increasing in g' <= eta
    eta_m = d.eta * m / (m - d.eta)
    fx, fy = yosida_scalar(d, m, np.array([x, y]))
    assert (fx - fy) * (x - y) <= (eta_m + 1e-9) * (x - y) ** 2 + 1e-12


def test_yosida_converges_monotonically():
    d = cubic_drift()
    x = np.linspace(-5, 5, 2001)
    errs = [np.max(np.abs(yosida_scalar(d, m, x) - d.g(x))) for m in (1, 10, 100, 1e4, 1e6)]
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert np.array_equal(yosida_scalar(d, math.inf, x), d.g(x))


def test_cubic_projection_orthonormal_sine():
    # mode-1 coefficient of -(a e_1)^3 with e_1 = sqrt(2) sin(pi s): -(3/2) a^3
    op = make_dirichlet_laplacian(8)
    cmap = make_collocation(op)
    a = 1.7
    x = np.zeros(8)
    x[0] = a
    got = apply_drift(cubic_drift(), cmap, x)
    for k in range(1, 9):
        ref = integrate.quad(lambda s: -(a * math.sqrt(2) * math.sin(math.pi * s)) ** 3
                             * math.sqrt(2) * math.sin(k * math.pi * s), 0, 1)[0]
        assert got[k - 1] == pytest.approx(ref, abs=1e-12)
    assert got[0] == pytest.approx(-1.5 * a ** 3, rel=1e-13)


@pytest.mark.parametrize("op", [make_dirichlet_laplacian(6), make_shifted_neumann(6, shift=1.0)])
def test_collocation_roundtrip_and_cubic_exact(op):
    cmap = make_collocation(op)
    gen = np.random.default_rng(4)
    x = gen.normal(size=6)
    np.testing.assert_allclose(from_grid(cmap, to_grid(cmap, x)), x, atol=1e-13)
    # compare with a 4000-point midpoint rule for <g(u), e_k>
    basis = np.cos if op.basis == "cosine" else np.sin
    s = (np.arange(4000) + 0.5) / 4000
    k = np.arange(1, 7) - (1 if op.basis == "cosine" else 0)
    phi = math.sqrt(2) * basis(np.pi * np.outer(s, k))
    if op.basis == "cosine":
        phi[:, 0] = 1.0
    u = phi @ x
    ref = (-(u ** 3)) @ phi / 4000
    np.testing.assert_allclose(apply_drift(cubic_drift(), cmap, x), ref, atol=1e-9)


def test_galerkin_projection_of_drift():
    op = make_dirichlet_laplacian(8)
    cmap = make_collocation(op)
    x = np.linspace(1, 0.1, 8)
    out = yosida_drift(cubic_drift(), cmap, math.inf, x, n=3)
    assert np.all(out[3:] == 0)
    xp = x.copy()
    xp[3:] = 0
    np.testing.assert_allclose(out[:3], apply_drift(cubic_drift(), cmap, xp)[:3], rtol=1e-13)


def test_zero_drift():
    cmap = make_collocation(make_dirichlet_laplacian(4))
    assert np.all(apply_drift(zero_drift(), cmap, np.ones((3, 4))) == 0)
    assert zero_drift().linear and not cubic_drift().linear


def test_overflow_detected():
    cmap = make_collocation(make_dirichlet_laplacian(4))
    with pytest.raises(DriftOverflowError):
        apply_drift(cubic_drift(), cmap, np.full(4, 1e200))


def test_backends_agree():
    op = make_dirichlet_laplacian(8)
    cmap = make_collocation(op)
    d = cubic_drift(1.0)
    c = np.asarray(d.coeffs, dtype=float)
    gen = np.random.default_rng(0)
    x = gen.normal(scale=2.0, size=(50, 8))
    u = gen.uniform(-5, 5, size=500)
    for m in (10.0, math.inf):
        kap = d.kappa(m)
        np.testing.assert_allclose(kernels.yosida_values_numba(u, c, m, kap),
                                   kernels.yosida_values_numpy(u, c, m, kap), rtol=1e-12)
        np.testing.assert_allclose(
            kernels.drift_eval_numba(x, 5, cmap.forward, cmap.inverse, c, m, kap),
            kernels.drift_eval_numpy(x, 5, cmap.forward, cmap.inverse, c, m, kap),
            rtol=1e-11, atol=1e-11)
        conv = 0.01 * gen.normal(size=(50, 20, 8))
        args = (x, conv, op.decay(1e-3), 1e-3, 8, cmap.forward, cmap.inverse, c, m, kap, False)
        np.testing.assert_allclose(kernels.exp_euler_chunk(*args, backend="numba"),
                                   kernels.exp_euler_chunk(*args, backend="numpy"),
                                   rtol=1e-11, atol=1e-12)
    np.testing.assert_allclose(kernels.resolvent_numba(u, c, 10.0, d.kappa(10.0)),
                               kernels.resolvent_numpy(u, c, 10.0, d.kappa(10.0)), rtol=1e-12)


def test_drift_spec_trims_coefficients():
    d = DriftSpec(np.array([0.0, 0.0, 0.0, -1.0, 0.0, 0.0]))
    assert d.degree == 3
