import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from levy_spde.spectral import (GrowthLaw, SpectralOperator, WeightSequence, eigen_sum_finite,
                                inverse_eigen_sum, make_dirichlet_laplacian, make_power_law,
                                make_shifted_neumann, project, semigroup_apply)


def test_dirichlet_eigenvalues():
    op = make_dirichlet_laplacian(8)
    np.testing.assert_allclose(op.lambdas, (math.pi * np.arange(1, 9)) ** 2, rtol=1e-15)
    assert op.omega == pytest.approx(math.pi ** 2)
    assert op.basis == "sine"


def test_dirichlet_length_scaling():
    op = make_dirichlet_laplacian(3, length=2.0)
    np.testing.assert_allclose(op.lambdas, (math.pi * np.arange(1, 4) / 2.0) ** 2)


def test_shifted_neumann_gap_is_shift():
    op = make_shifted_neumann(5, shift=0.3)
    assert op.omega == pytest.approx(0.3)
    assert op.lambdas[1] == pytest.approx(math.pi ** 2 + 0.3)
    with pytest.raises(ValueError):
        make_shifted_neumann(5, shift=0.0)


def test_operator_validation():
    law = GrowthLaw(1.0, 1.0)
    with pytest.raises(ValueError):
        SpectralOperator(np.array([1.0, 1.0]), law)
    with pytest.raises(ValueError):
        SpectralOperator(np.array([1.0, 2.5]), law)
    with pytest.raises(ValueError):
        SpectralOperator(np.array([-1.0]), GrowthLaw(-1.0, 1.0))


def test_semigroup_is_exact_exponential():
    op = make_dirichlet_laplacian(4)
    x = np.array([1.0, -2.0, 0.5, 3.0])
    np.testing.assert_allclose(semigroup_apply(op, 0.01, x), x * np.exp(-op.lambdas * 0.01),
                               rtol=1e-15)
    assert np.array_equal(semigroup_apply(op, 0.0, x), x)
    with pytest.raises(ValueError):
        semigroup_apply(op, -0.1, x)


@settings(max_examples=50, deadline=None)
@given(st.floats(0, 2), st.floats(0, 2), st.lists(st.floats(-10, 10), min_size=4, max_size=4))
def test_semigroup_property(s, t, x):
    op = make_dirichlet_laplacian(4)
    a = semigroup_apply(op, s + t, x)
    b = semigroup_apply(op, s, semigroup_apply(op, t, x))
    np.testing.assert_allclose(a, b, rtol=1e-12, atol=1e-300)
    # contraction at rate omega
    assert np.linalg.norm(a) <= math.exp(-op.omega * (s + t)) * np.linalg.norm(x) * (1 + 1e-12)


def test_project():
    x = np.arange(1.0, 7.0).reshape(2, 3)
    assert np.array_equal(project(x, 1), [[1, 0, 0], [4, 0, 0]])
    assert np.array_equal(project(x, 3), x)
    assert np.array_equal(project(x, 0), np.zeros_like(x))


def test_inverse_eigen_sum_dirichlet():
    # sum 1 / (pi k)^2 = 1/6
    assert inverse_eigen_sum(make_dirichlet_laplacian(8)) == pytest.approx(1 / 6, rel=1e-14)


def test_inverse_eigen_sum_shifted_neumann():
    d = 0.5
    a = math.sqrt(d) / math.pi
    # 1/d + pi^-2 sum_{j>=1} 1/(j^2 + a^2), the latter (pi a coth(pi a) - 1) / (2 a^2)
    ref = 1 / d + (math.pi * a / math.tanh(math.pi * a) - 1) / (2 * a * a) / math.pi ** 2
    assert inverse_eigen_sum(make_shifted_neumann(4, shift=d)) == pytest.approx(ref, rel=1e-9)


def test_eigen_sum_divergent_power_law():
    op = make_power_law(10, gamma=1.0)
    assert not eigen_sum_finite(op)
    assert inverse_eigen_sum(op) == math.inf
    assert eigen_sum_finite(make_power_law(10, gamma=1.01))


def test_weight_sequence_norm():
    w = WeightSequence(1.0)
    assert w.norm([1.0, 2.0, 3.0]) == pytest.approx(math.sqrt(3.0))
    assert WeightSequence(0.0).norm([3.0, 4.0]) == pytest.approx(5.0)
