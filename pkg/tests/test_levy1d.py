import math

import mpmath
import numpy as np
import pytest
from scipy import integrate, special

from levy_spde.errors import UnsupportedSampling
from levy_spde.levy1d import (CompoundPoisson, DiscreteJumps, SlowLogTail, SymmetricAlphaStable,
                              UniformJumps, char_exponent, convolution_exponent, log_moment_finite,
                              sample_increment, sample_ou_convolution)
from levy_spde.ou_invariant import finite_time_cf
from levy_spde.rng import RngStream


def emp_cf(x, h):
    return np.mean(np.cos(h * x))


def test_compound_poisson_exponent_at_pi():
    assert char_exponent(CompoundPoisson(2.0), math.pi) == pytest.approx(4.0, abs=1e-14)


def test_discrete_jumps_exponent_matches_direct_sum():
    jumps = DiscreteJumps((-2.0, -0.5, 0.5, 2.0), (0.1, 0.4, 0.4, 0.1))
    fam = CompoundPoisson(3.0, jumps)
    h = np.array([0.3, 1.7, -4.0])
    direct = 3.0 * (0.2 * (1 - np.cos(2 * h)) + 0.8 * (1 - np.cos(0.5 * h)))
    np.testing.assert_allclose(fam.char_exponent(h), direct, rtol=1e-14)


def test_asymmetric_jumps_rejected():
    with pytest.raises(ValueError):
        DiscreteJumps((-1.0, 2.0), (0.5, 0.5))


def test_uniform_jumps_exponent_against_quadrature():
    fam = CompoundPoisson(1.5, UniformJumps(2.0))
    for h in (0.1, 1.0, 3.3):
        ref = 1.5 * integrate.quad(lambda y: (1 - math.cos(h * y)) / 4.0, -2, 2)[0]
        assert fam.char_exponent(h) == pytest.approx(ref, rel=1e-12)


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 1.9])
def test_stable_exponent_from_levy_density(alpha):
    # psi(h) = int (1 - cos hy) C |y|^{-1-alpha} dy must equal (sigma |h|)^alpha
    fam = SymmetricAlphaStable(alpha, 1.3)
    h = 2.0
    # head: smooth (1 - cos hy) / y^2 against the weight y^(1 - alpha)
    smooth = lambda y: fam.levy_constant * (1 - math.cos(h * y)) / y ** 2 if y > 0 else \
        fam.levy_constant * h * h / 2
    head = integrate.quad(smooth, 0, 1, weight="alg", wvar=(1 - alpha, 0))[0]
    tail = integrate.quad(lambda y: fam.levy_density(y), 1, np.inf)[0] - integrate.quad(
        lambda y: fam.levy_density(y), 1, np.inf, weight="cos", wvar=h)[0]
    assert 2 * (head + tail) == pytest.approx((1.3 * h) ** alpha, rel=1e-7)
    assert fam.char_exponent(h) == pytest.approx((1.3 * h) ** alpha, rel=1e-14)


def test_stable_exponent_known_value():
    assert SymmetricAlphaStable(1.5).char_exponent(2.0) == pytest.approx(2 ** 1.5, rel=1e-14)


def test_slow_log_tail_exponent_against_mpmath():
    c, h = 0.7, 1.3
    fam = SlowLogTail(c)
    mpmath.mp.dps = 30
    tail = mpmath.quadosc(lambda y: mpmath.cos(h * y) / (y * mpmath.log(y) ** 2),
                          [mpmath.e, mpmath.inf], omega=h)
    # nu has mass 2c on |y| > e, so psi = 2c - 2c int cos(hy) / (y log^2 y)
    ref = float(2 * c * (1 - tail))
    assert fam.char_exponent(h) == pytest.approx(ref, rel=1e-7)


def test_log_moment():
    assert log_moment_finite(CompoundPoisson())
    assert log_moment_finite(SymmetricAlphaStable(0.7))
    assert not log_moment_finite(SlowLogTail(1.0))


def test_zero_time_increment_is_zero():
    for fam in (CompoundPoisson(), SymmetricAlphaStable(1.2)):
        assert np.all(sample_increment(fam, 0.0, 1, size=10) == 0)


def test_slow_log_tail_sampling_unsupported():
    with pytest.raises(UnsupportedSampling):
        sample_increment(SlowLogTail(1.0), 0.1, 0, size=3)


@pytest.mark.parametrize("fam", [CompoundPoisson(2.0), CompoundPoisson(1.0, UniformJumps(1.5)),
                                 SymmetricAlphaStable(1.5, 0.8)])
def test_increment_cf_matches_exponent(fam):
    M, t = 40000, 0.7
    x = sample_increment(fam, t, RngStream(11).generator(), size=M)
    for h in (0.5, 1.0, 2.5):
        assert abs(emp_cf(x, h) - math.exp(-t * fam.char_exponent(h))) <= 4 / math.sqrt(M)


@pytest.mark.parametrize("fam", [CompoundPoisson(3.0), SymmetricAlphaStable(1.3)])
def test_ou_convolution_cf(fam):
    # int_0^t e^{-lam (t-s)} beta dL(s) has CF exp(-int_0^t psi(e^{-lam u} beta h) du)
    M, lam, beta, t = 40000, 4.0, 0.9, 0.5
    x = sample_ou_convolution(fam, lam, beta, t, RngStream(3).generator(), size=M)
    for h in (0.7, 2.0):
        ref = finite_time_cf(fam, lam, beta, h, t)
        assert abs(emp_cf(x, h) - ref) <= 4 / math.sqrt(M)


def test_stable_convolution_exponent_closed_form():
    fam = SymmetricAlphaStable(1.4, 1.1)
    lam, a, h, t = 3.0, 0.6, 1.7, 0.4
    ref = integrate.quad(lambda u: fam.char_exponent(math.exp(-lam * u) * a * h), 0, t)[0]
    assert convolution_exponent(fam, lam, a, h, t) == pytest.approx(ref, rel=1e-10)


def test_compound_poisson_stationary_exponent_closed_form():
    # int_0^inf rate (1 - cos(a h e^{-lam u})) du = (rate / lam) Cin(a h)
    lam, a, h = 9.0, 0.5, 2.5
    z = a * h
    cin = np.euler_gamma + math.log(z) - special.sici(z)[1]
    assert convolution_exponent(CompoundPoisson(1.0), lam, a, h) == pytest.approx(cin / lam,
                                                                                  rel=1e-9)


def test_broadcast_shapes():
    lam = np.array([1.0, 4.0, 9.0])
    x = sample_ou_convolution(CompoundPoisson(), lam, 1.0, 0.1, 0, size=(5, 3))
    assert x.shape == (5, 3)
