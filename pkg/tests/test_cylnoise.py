import math

import numpy as np
import pytest

from levy_spde.cylnoise import (CylNoiseSpec, DoubleSidedPath, admissible, find_weight,
                                sample_noise_increment, weight_compatible)
from levy_spde.errors import UndecidableError
from levy_spde.levy1d import CompoundPoisson, SlowLogTail, SymmetricAlphaStable
from levy_spde.rng import RngStream


@pytest.mark.parametrize("alpha", [0.5, 1.0, 1.5, 1.9])
@pytest.mark.parametrize("theta", [0.4, 0.6, 0.8, 1.2, 2.1])
def test_stable_admissibility_rule(alpha, theta):
    spec = CylNoiseSpec(SymmetricAlphaStable(alpha), 8, theta=theta)
    assert admissible(spec) == (alpha * theta > 1)


def test_stable_unit_betas_not_admissible():
    assert not admissible(CylNoiseSpec(SymmetricAlphaStable(1.5), 8, theta=0.0))


def test_compound_poisson_rule():
    assert admissible(CylNoiseSpec(CompoundPoisson(), 8, theta=0.6))
    assert not admissible(CylNoiseSpec(CompoundPoisson(), 8, theta=0.5))


def test_slow_log_tail_never_admissible():
    for theta in (0.5, 2.0, 10.0):
        assert not admissible(CylNoiseSpec(SlowLogTail(1.0), 4, theta=theta))


def test_explicit_betas_undecidable():
    spec = CylNoiseSpec(CompoundPoisson(), 3, betas=np.array([1.0, 0.5, 0.25]))
    with pytest.raises(UndecidableError):
        admissible(spec)


def test_find_weight_minimal():
    # alpha (theta + sigma) > 1 with alpha = 1.5, theta = 0.5 -> sigma > 1/6 -> 0.25
    w = find_weight(CylNoiseSpec(SymmetricAlphaStable(1.5), 8, theta=0.5))
    assert w.sigma == 0.25
    assert find_weight(CylNoiseSpec(SymmetricAlphaStable(1.5), 8, theta=1.0)).sigma == 0.0
    with pytest.raises(ValueError):
        find_weight(CylNoiseSpec(SlowLogTail(1.0), 8))


def test_weight_compatible():
    spec = CylNoiseSpec(SymmetricAlphaStable(1.5), 8, theta=0.5, b_decay=0.25)
    assert weight_compatible(spec, find_weight(spec))
    assert not weight_compatible(CylNoiseSpec(SymmetricAlphaStable(1.5), 8, theta=0.5),
                                 find_weight(spec))


def test_amplitudes():
    spec = CylNoiseSpec(CompoundPoisson(), 4, theta=1.0, b_decay=1.0)
    np.testing.assert_allclose(spec.amplitudes, 1.0 / np.arange(1, 5) ** 2)


def test_noise_increment_shape_and_zero_dt():
    spec = CylNoiseSpec(CompoundPoisson(), 5)
    assert sample_noise_increment(spec, 0.1, 0, size=7).shape == (7, 5)
    assert not np.any(sample_noise_increment(spec, 0.0, 0, size=3))


@pytest.mark.parametrize("fam", [CompoundPoisson(2.0), SymmetricAlphaStable(1.5)])
def test_double_sided_path_nested_and_deterministic(fam):
    spec = CylNoiseSpec(fam, 4)
    a = DoubleSidedPath(spec, 0.2, 0.3, 1e-3, RngStream(9), n_paths=3)
    b = DoubleSidedPath(spec, 0.5, 0.1, 1e-3, RngStream(9), n_paths=3)
    ia, ib = a.increments(), b.increments()
    # common window [-0.2, 0.1] is bit-identical
    assert np.array_equal(ia[:, :300], ib[:, 300:600])
    c = DoubleSidedPath(spec, 0.2, 0.3, 1e-3, RngStream(10), n_paths=3)
    assert not np.array_equal(ia, c.increments())


def test_double_sided_values_anchor_and_increments():
    spec = CylNoiseSpec(CompoundPoisson(5.0), 2)
    p = DoubleSidedPath(spec, 0.1, 0.2, 1e-3, RngStream(1), n_paths=2)
    vals = p.values()
    assert vals.shape == (2, 301, 2)
    assert np.all(vals[:, 100] == 0)
    np.testing.assert_allclose(np.diff(vals, axis=1), p.increments(), atol=1e-12)


def test_compound_poisson_convolution_increment_exact():
    # single step: sum over jumps of beta e^{-lam age} J, reconstructed from cached jumps
    spec = CylNoiseSpec(CompoundPoisson(50.0), 1)
    p = DoubleSidedPath(spec, 0.0, 0.064, 1e-3, RngStream(2), n_paths=1)
    lam = np.array([7.0])
    conv = p.convolution_increments(lam)
    path, step, mode, age, sizes = p._chunk(0, 0)
    ref = np.zeros(64)
    np.add.at(ref, step, np.exp(-7.0 * age) * sizes)
    np.testing.assert_allclose(conv[0, :, 0], ref, rtol=1e-14, atol=1e-300)


def test_stable_convolution_increment_variance_scale():
    # alpha = 2 limit check is not available, so compare scale with the closed form
    fam = SymmetricAlphaStable(1.5)
    lam, dt = 4.0, 0.01
    expected = ((1 - math.exp(-1.5 * lam * dt)) / (1.5 * lam)) ** (1 / 1.5)
    assert fam.convolution_scale(lam, dt) == pytest.approx(expected, rel=1e-14)
    assert fam.convolution_scale(0.0, dt) == pytest.approx(dt ** (1 / 1.5), rel=1e-12)


def test_path_rejects_bad_grid():
    spec = CylNoiseSpec(CompoundPoisson(), 2)
    with pytest.raises(ValueError):
        DoubleSidedPath(spec, 0.0105, 0.1, 1e-3, 0)
    with pytest.raises(ValueError):
        DoubleSidedPath(CylNoiseSpec(SlowLogTail(1.0), 2), 0.0, 0.1, 1e-3, 0)
