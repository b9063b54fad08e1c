"""Diagonal linear operators in eigencoordinates.

``SpectralOperator`` stores the eigenvalues ``lambda_k > 0`` of ``-A`` for
``k = 1..N`` together with a symbolic growth law
``lambda_k = c * (k - offset)**gamma + shift``. Series admissibility is decided
from the growth law, never from the truncated eigenvalues.
"""
from dataclasses import dataclass
import math

import numpy as np
from scipy import special


@dataclass(frozen=True)
class GrowthLaw:
    c: float
    gamma: float
    offset: int = 0
    shift: float = 0.0

    def __call__(self, k):
        k = np.asarray(k, dtype=float)
        return self.c * (k - self.offset) ** self.gamma + self.shift


@dataclass(frozen=True, eq=False)
class SpectralOperator:
    """Eigenvalues of ``-A`` on a 1-d interval of the given ``length``.

    ``basis`` names the eigenfunctions used for collocation: ``"sine"``
    (Dirichlet) or ``"cosine"`` (Neumann).
    """

    lambdas: np.ndarray
    growth_law: GrowthLaw
    length: float = 1.0
    basis: str = "sine"
    kind: str = "dirichlet"

    def __post_init__(self):
        lam = np.asarray(self.lambdas, dtype=float)
        lam.setflags(write=False)
        object.__setattr__(self, "lambdas", lam)
        if lam.ndim != 1 or lam.size == 0:
            raise ValueError("need at least one eigenvalue")
        if np.any(lam <= 0):
            raise ValueError("A must be strictly negative: all lambda_k > 0")
        if np.any(np.diff(lam) <= 0):
            raise ValueError("eigenvalues must be strictly increasing")
        expected = self.growth_law(np.arange(1, lam.size + 1))
        if not np.allclose(lam, expected, rtol=1e-12, atol=0):
            raise ValueError("eigenvalues disagree with the growth law")

    @property
    def dim(self):
        return self.lambdas.size

    @property
    def omega(self):
        """Spectral gap: ``|e^{tA} x| <= e^{-omega t} |x|``."""
        return float(self.lambdas[0])

    def decay(self, t):
        return np.exp(-self.lambdas * t)


def make_dirichlet_laplacian(N, length=1.0):
    """``lambda_k = (pi k / length)**2``, ``k = 1..N``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if not length > 0:
        raise ValueError("length must be positive")
    law = GrowthLaw(c=(math.pi / length) ** 2, gamma=2.0)
    return SpectralOperator(law(np.arange(1, N + 1)), law, length, "sine", "dirichlet")


def make_shifted_neumann(N, length=1.0, shift=1.0):
    """Neumann Laplacian shifted by ``shift > 0``: ``(pi (k-1) / length)**2 + shift``."""
    if N < 1:
        raise ValueError("N must be at least 1")
    if not shift > 0:
        raise ValueError("the shift must be positive for A to be strictly negative")
    law = GrowthLaw(c=(math.pi / length) ** 2, gamma=2.0, offset=1, shift=float(shift))
    return SpectralOperator(law(np.arange(1, N + 1)), law, length, "cosine", "neumann-shifted")


def make_power_law(N, c=1.0, gamma=1.0, length=1.0):
    """Synthetic operator ``lambda_k = c k**gamma`` with a sine basis."""
    if N < 1:
        raise ValueError("N must be at least 1")
    law = GrowthLaw(c=float(c), gamma=float(gamma))
    return SpectralOperator(law(np.arange(1, N + 1)), law, length, "sine", "power")


def semigroup_apply(op, t, x):
    """``e^{tA} x`` coordinatewise; ``x`` may carry leading batch axes."""
    if t < 0:
        raise ValueError("the semigroup is only defined for t >= 0")
    x = np.asarray(x, dtype=float)
    if t == 0:
        return x.copy()
    return x * op.decay(t)


def project(x, n):
    """Galerkin projection onto the first ``n`` modes (last axis)."""
    if n < 0:
        raise ValueError("n must be non-negative")
    out = np.array(x, dtype=float, copy=True)
    out[..., n:] = 0.0
    return out


def eigen_sum_finite(op):
    """Whether ``sum_k 1/lambda_k`` converges (p-series test on the growth law)."""
    return op.growth_law.gamma > 1.0


def inverse_eigen_sum(op, terms=10**6):
    """Value of the full series ``sum_{k>=1} 1/lambda_k`` (``inf`` if divergent)."""
    law = op.growth_law
    if not eigen_sum_finite(op):
        return math.inf
    if law.shift == 0 and law.offset == 0:
        return float(special.zeta(law.gamma)) / law.c
    k = np.arange(1, terms + 1, dtype=float)
    head = float(np.sum(1.0 / law(k)))
    # integral tail estimate, accurate to O(terms**-gamma)
    tail = ((terms + 0.5 - law.offset) ** (1.0 - law.gamma)) / (law.c * (law.gamma - 1.0))
    return head + tail


@dataclass(frozen=True)
class WeightSequence:
    """Weights ``rho_k = k**(-sigma)`` defining the space ``l^2_rho``."""

    sigma: float = 0.0

    def __call__(self, k):
        return np.asarray(k, dtype=float) ** (-self.sigma)

    def norm(self, x):
        x = np.asarray(x, dtype=float)
        rho = self(np.arange(1, x.shape[-1] + 1))
        return np.sqrt(np.sum((rho * x) ** 2, axis=-1))
