"""Scalar symmetric pure-jump Levy laws.

Three families are shipped:

* :class:`CompoundPoisson` -- finite Levy measure with a bounded symmetric
  jump law. All moments are finite, so it is the family used for moment tests.
* :class:`SymmetricAlphaStable` -- ``psi(h) = (scale * |h|)**alpha``.
* :class:`SlowLogTail` -- Levy density ``c / (|y| log(|y|)**2)`` on ``|y| > e``.
  Its log-moment diverges; only the characteristic exponent and symbolic
  checks are supported.

All laws have no Gaussian part and no drift, so they are determined by the
characteristic exponent ``psi(h) = int (1 - cos(h y)) nu(dy)``.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import integrate, special

from .errors import UnsupportedSampling
from .rng import as_generator

QUAD_EPSABS = 1e-10


@dataclass(frozen=True)
class DiscreteJumps:
    """Symmetric discrete jump law, ``P(J = values[i]) = weights[i]``."""

    values: tuple = (-1.0, 1.0)
    weights: tuple = (0.5, 0.5)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        w = np.asarray(self.weights, dtype=float)
        if v.shape != w.shape or v.ndim != 1 or v.size == 0:
            raise ValueError("values and weights must be 1-d of equal length")
        if np.any(w < 0) or not math.isclose(w.sum(), 1.0, rel_tol=1e-12):
            raise ValueError("weights must be a probability vector")
        # symmetry: the law of -J equals the law of J
        order = np.argsort(v)
        rev = np.argsort(-v)
        if not (np.allclose(v[order], -v[rev]) and np.allclose(w[order], w[rev])):
            raise ValueError("jump law must be symmetric")

    @property
    def bound(self):
        return float(np.max(np.abs(self.values)))

    @property
    def second_moment(self):
        v = np.asarray(self.values)
        return float(np.dot(self.weights, v * v))

    def one_minus_cf(self, z):
        z = np.asarray(z, dtype=float)
        v = np.asarray(self.values)
        w = np.asarray(self.weights)
        return np.tensordot(1.0 - np.cos(np.multiply.outer(z, v)), w, axes=([-1], [0]))

    def sample(self, gen, n):
        return gen.choice(np.asarray(self.values, dtype=float), size=n, p=self.weights)


@dataclass(frozen=True)
class UniformJumps:
    """Jumps uniform on ``[-halfwidth, halfwidth]``."""

    halfwidth: float = 1.0

    def __post_init__(self):
        if not self.halfwidth > 0:
            raise ValueError("halfwidth must be positive")

    @property
    def bound(self):
        return float(self.halfwidth)

    @property
    def second_moment(self):
        return self.halfwidth ** 2 / 3.0

    def one_minus_cf(self, z):
        z = np.asarray(z, dtype=float)
        return 1.0 - np.sinc(z * self.halfwidth / np.pi)

    def sample(self, gen, n):
        return gen.uniform(-self.halfwidth, self.halfwidth, size=n)


@dataclass(frozen=True)
class CompoundPoisson:
    """Jumps arrive at ``rate`` per unit time with sizes drawn from ``jumps``."""

    rate: float = 1.0
    jumps: object = field(default_factory=DiscreteJumps)

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("rate must be positive")

    def char_exponent(self, h):
        return self.rate * self.jumps.one_minus_cf(h)

    def small_jump_integral(self):
        if isinstance(self.jumps, DiscreteJumps):
            v = np.asarray(self.jumps.values)
            return self.rate * float(np.dot(self.jumps.weights, np.minimum(1.0, v * v)))
        a = self.jumps.halfwidth
        # E[min(1, J^2)] for J ~ U(-a, a)
        inner = a * a / 3.0 if a <= 1 else (1.0 / 3.0 + (a - 1.0)) / a
        return self.rate * inner

    def log_moment_finite(self):
        return True

    def sample_ou_convolution(self, lam, beta, dt, gen, size):
        lam, beta, dt = (np.broadcast_to(np.asarray(a, dtype=float), size) for a in (lam, beta, dt))
        counts = gen.poisson(self.rate * dt)
        flat = counts.ravel()
        total = int(flat.sum())
        if total == 0:
            return np.zeros(size)
        idx = np.repeat(np.arange(flat.size), flat)
        dt_j = dt.ravel()[idx]
        # time elapsed between the jump and the end of the interval
        age = gen.uniform(0.0, 1.0, size=total) * dt_j
        sizes = self.jumps.sample(gen, total)
        w = beta.ravel()[idx] * np.exp(-lam.ravel()[idx] * age) * sizes
        return np.bincount(idx, weights=w, minlength=flat.size).reshape(size)


def _stable_tail_integral(alpha):
    # int_0^inf (1 - cos u) u^(-1-alpha) du
    if math.isclose(alpha, 1.0):
        return math.pi / 2.0
    return special.gamma(1.0 - alpha) * math.cos(math.pi * alpha / 2.0) / alpha


def standard_stable(alpha, gen, size):
    """Chambers-Mallows-Stuck draw with characteristic function ``exp(-|h|**alpha)``."""
    v = gen.uniform(-np.pi / 2, np.pi / 2, size=size)
    if alpha == 1.0:
        return np.tan(v)
    w = gen.standard_exponential(size=size)
    return (np.sin(alpha * v) / np.cos(v) ** (1.0 / alpha)
            * (np.cos(v - alpha * v) / w) ** ((1.0 - alpha) / alpha))


@dataclass(frozen=True)
class SymmetricAlphaStable:
    """``psi(h) = (scale |h|)**alpha`` with ``0 < alpha < 2``."""

    alpha: float = 1.5
    scale: float = 1.0

    def __post_init__(self):
        if not 0 < self.alpha < 2:
            raise ValueError("alpha must lie in (0, 2)")
        if not self.scale > 0:
            raise ValueError("scale must be positive")

    @property
    def levy_constant(self):
        """``C`` in ``nu(dy) = C |y|^(-1-alpha) dy``."""
        return self.scale ** self.alpha / (2.0 * _stable_tail_integral(self.alpha))

    def levy_density(self, y):
        y = np.abs(np.asarray(y, dtype=float))
        return self.levy_constant * y ** (-1.0 - self.alpha)

    def char_exponent(self, h):
        return (self.scale * np.abs(np.asarray(h, dtype=float))) ** self.alpha

    def small_jump_integral(self):
        a = self.alpha
        return 2.0 * self.levy_constant * (1.0 / (2.0 - a) + 1.0 / a)

    def log_moment_finite(self):
        return True

    def convolution_scale(self, lam, dt):
        """``(int_0^dt exp(-alpha lam u) du)**(1/alpha)``, ``lam = 0`` allowed."""
        lam = np.asarray(lam, dtype=float)
        dt = np.asarray(dt, dtype=float)
        al = self.alpha * lam
        safe = np.where(al > 0, al, 1.0)
        mass = np.where(al > 0, -np.expm1(-safe * dt) / safe, dt)
        return mass ** (1.0 / self.alpha)

    def sample_ou_convolution(self, lam, beta, dt, gen, size):
        z = standard_stable(self.alpha, gen, size)
        return np.asarray(beta) * self.scale * self.convolution_scale(lam, dt) * z


@dataclass(frozen=True)
class SlowLogTail:
    """Levy density ``c / (|y| log(|y|)**2)`` on ``|y| > e`` (total mass ``2c``)."""

    c: float = 1.0

    def __post_init__(self):
        if not self.c > 0:
            raise ValueError("c must be positive")

    def levy_density(self, y):
        y = np.abs(np.asarray(y, dtype=float))
        out = np.zeros_like(y)
        mask = y > np.e
        out[mask] = self.c / (y[mask] * np.log(y[mask]) ** 2)
        return out

    def char_exponent(self, h):
        h = np.abs(np.asarray(h, dtype=float))
        out = np.zeros_like(h)
        for i, hv in np.ndenumerate(h):
            if hv == 0:
                continue
            f = lambda y: 1.0 / (y * np.log(y) ** 2)
            cos_part, _ = integrate.quad(f, np.e, np.inf, weight="cos", wvar=hv,
                                         epsabs=QUAD_EPSABS, limlst=200)
            # int_e^inf dy / (y log^2 y) = 1
            out[i] = 2.0 * self.c * (1.0 - cos_part)
        return out if out.ndim else float(out)

    def small_jump_integral(self):
        return 2.0 * self.c

    def log_moment_finite(self):
        # int_e^inf log(y) dy / (y log^2 y) = int dy / (y log y) diverges
        return False

    def sample_ou_convolution(self, lam, beta, dt, gen, size):
        raise UnsupportedSampling("SlowLogTail supports symbolic checks only")


LevyFamily = CompoundPoisson | SymmetricAlphaStable | SlowLogTail


def char_exponent(family, h):
    """Characteristic exponent ``psi(h) >= 0``; ``E exp(i h L(t)) = exp(-t psi(h))``."""
    return family.char_exponent(h)


def sample_increment(family, dt, rng, size=None):
    """Draw ``L(t + dt) - L(t)``; exactly zero when ``dt == 0``."""
    shape = () if size is None else size
    if np.all(np.asarray(dt) == 0):
        out = np.zeros(np.broadcast_shapes(np.shape(dt), shape))
        return out if out.ndim else 0.0
    out = family.sample_ou_convolution(0.0, 1.0, dt, as_generator(rng), shape)
    return out if np.ndim(out) else float(out)


def sample_ou_convolution(family, lam, beta, dt, rng, size=None):
    """Exact-in-law draw of ``int_0^dt exp(-lam (dt - s)) beta dL(s)``.

    ``lam``, ``beta`` and ``dt`` broadcast against ``size``; ``lam = 0`` gives
    ``beta`` times a plain increment.
    """
    shape = () if size is None else size
    shape = np.broadcast_shapes(np.shape(lam), np.shape(beta), np.shape(dt), shape)
    if np.any(np.asarray(lam) < 0):
        raise ValueError("lam must be non-negative")
    out = family.sample_ou_convolution(lam, beta, dt, as_generator(rng), shape)
    return out if np.ndim(out) else float(out)


def log_moment_finite(family):
    """Whether ``int_1^inf log(y) nu(dy)`` converges."""
    return family.log_moment_finite()


def convolution_exponent(family, lam, amplitude, h, t=np.inf):
    """``int_0^t psi(exp(-lam u) * amplitude * h) du`` by adaptive quadrature.

    The substitution ``w = exp(-lam u)`` maps ``[0, t]`` to ``[exp(-lam t), 1]``;
    ``t = inf`` is the stationary case. ``lam = 0`` requires finite ``t``.
    """
    z = float(amplitude) * float(h)
    if z == 0.0 or t == 0:
        return 0.0
    if lam == 0:
        if not np.isfinite(t):
            raise ValueError("lam = 0 with infinite horizon diverges")
        return float(t) * float(family.char_exponent(z))
    if isinstance(family, SymmetricAlphaStable):
        a = family.alpha
        mass = 1.0 / (a * lam) if not np.isfinite(t) else -math.expm1(-a * lam * t) / (a * lam)
        return float((family.scale * abs(z)) ** a * mass)
    lower = 0.0 if not np.isfinite(t) else math.exp(-lam * t)
    integrand = lambda w: float(family.char_exponent(w * z)) / (lam * w) if w > 0 else 0.0
    # oscillation count of cos(w z) over [0, 1] sets the subdivision budget
    val, _ = integrate.quad(integrand, lower, 1.0, epsabs=QUAD_EPSABS, epsrel=1e-12,
                            limit=200 + int(abs(z)))
    return val
