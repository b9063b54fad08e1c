"""Cylindrical Levy noise ``B L(t) = sum_k b_k beta_k L^k(t) e_k``.

Amplitudes follow power laws ``beta_k = k**-theta`` and ``b_k = k**-b_decay``
so that series conditions can be decided symbolically. An explicit numeric
``betas`` array is accepted for simulation, but any convergence question about
it raises :class:`~levy_spde.errors.UndecidableError`.
"""
from dataclasses import dataclass, replace
import math

import numpy as np

from .errors import UndecidableError
from .levy1d import CompoundPoisson, SlowLogTail, SymmetricAlphaStable, standard_stable
from .rng import RngStream, as_generator
from .spectral import WeightSequence

SIGMA_STEP = 0.125
SIGMA_MAX = 64.0


@dataclass(frozen=True, eq=False)
class CylNoiseSpec:
    family: object
    n_modes: int
    theta: float = 1.0
    b_decay: float = 0.0
    betas: np.ndarray | None = None

    def __post_init__(self):
        if self.n_modes < 1:
            raise ValueError("n_modes must be at least 1")
        if self.theta < 0 or self.b_decay < 0:
            raise ValueError("decay exponents must be non-negative")
        if self.betas is not None:
            b = np.asarray(self.betas, dtype=float)
            if b.shape != (self.n_modes,) or np.any(b <= 0):
                raise ValueError("explicit betas must be positive, one per mode")
            object.__setattr__(self, "betas", b)

    @property
    def symbolic(self):
        return self.betas is None

    @property
    def beta(self):
        if self.betas is not None:
            return self.betas.copy()
        return np.arange(1, self.n_modes + 1, dtype=float) ** (-self.theta)

    @property
    def b(self):
        return np.arange(1, self.n_modes + 1, dtype=float) ** (-self.b_decay)

    @property
    def amplitudes(self):
        """``b_k * beta_k`` for ``k = 1..n_modes``."""
        return self.b * self.beta

    def with_modes(self, n_modes):
        if self.betas is not None:
            raise ValueError("cannot resize explicit betas")
        return replace(self, n_modes=n_modes)


def _require_symbolic(spec):
    if not spec.symbolic:
        raise UndecidableError("convergence of an arbitrary numeric beta sequence is undecidable")


def admissible(spec):
    """Whether ``L(t)`` lives in ``H``: convergence of
    ``sum_k beta_k^2 int_{|y|<1/beta_k} y^2 nu(dy) + nu(|y| >= 1/beta_k)``.
    """
    _require_symbolic(spec)
    fam, theta = spec.family, spec.theta
    if isinstance(fam, SymmetricAlphaStable):
        # both integrals scale like beta_k^alpha for the stable density
        return fam.alpha * theta > 1.0
    if isinstance(fam, CompoundPoisson):
        # bounded jumps: the tail term vanishes once k^theta exceeds the bound,
        # leaving rate * E[J^2] * sum beta_k^2
        return 2.0 * theta > 1.0
    if isinstance(fam, SlowLogTail):
        # nu(|y| >= k^theta) = 2c / (theta log k) is not summable
        return False
    raise UndecidableError(f"no admissibility rule for {type(fam).__name__}")


def find_weight(spec):
    """Smallest ``sigma`` (multiple of 1/8) so that ``rho_k beta_k`` is admissible."""
    _require_symbolic(spec)
    sigma = 0.0
    while sigma <= SIGMA_MAX:
        if admissible(replace(spec, theta=spec.theta + sigma)):
            return WeightSequence(sigma)
        sigma += SIGMA_STEP
    raise ValueError(f"no power weight makes {type(spec.family).__name__} noise admissible")


def weight_compatible(spec, weight):
    """``sup_k b_k / rho_k < inf`` for power laws, i.e. ``sigma <= b_decay``."""
    return weight.sigma <= spec.b_decay + 1e-15


def sample_noise_increment(spec, dt, rng, size=None):
    """Coordinates ``b_k beta_k (L^k(t + dt) - L^k(t))``, shape ``size + (n_modes,)``."""
    shape = (() if size is None else tuple(np.atleast_1d(size))) + (spec.n_modes,)
    if dt == 0:
        return np.zeros(shape)
    return spec.family.sample_ou_convolution(0.0, spec.amplitudes, dt, as_generator(rng), shape)


def _grid_steps(length, dt, name):
    n = int(round(length / dt))
    if not math.isclose(n * dt, length, rel_tol=1e-9, abs_tol=1e-12):
        raise ValueError(f"{name}={length} is not a multiple of dt={dt}")
    return n


class DoubleSidedPath:
    """Noise for ``n_paths`` trajectories on the grid ``[-xi, T]`` with step ``dt``.

    Global step ``i`` covers ``[i dt, (i + 1) dt]`` for ``-n_past <= i < n_future``.
    Steps are generated in chunks of ``chunk_steps``; each chunk draws from its
    own sub-stream of ``rng``, the future side (``t >= 0``) from one family of
    sub-streams and the past side from an independent one. Consequently noise is
    nested under changes of ``xi`` and ``T``, and every consumer of the same
    ``(rng, n_paths)`` sees bit-identical increments.

    Compound Poisson chunks keep exact jump times inside each step, so
    convolution increments are exact for any ``lambda``. Stable chunks keep one
    unit variate per step and mode; the increment over a step for rate
    ``lambda`` is that variate times the exact stable convolution scale.
    """

    def __init__(self, spec, xi, T, dt, rng, n_paths=1, chunk_steps=64):
        if xi < 0 or T <= 0 or dt <= 0:
            raise ValueError("need xi >= 0, T > 0, dt > 0")
        if isinstance(spec.family, SlowLogTail):
            raise ValueError("SlowLogTail noise cannot be sampled")
        self.spec = spec
        self.dt = float(dt)
        self.n_past = _grid_steps(xi, dt, "xi")
        self.n_future = _grid_steps(T, dt, "T")
        self.rng = rng if isinstance(rng, RngStream) else RngStream(int(rng))
        self.n_paths = int(n_paths)
        self.chunk_steps = int(chunk_steps)
        self._cache = {}

    @property
    def xi(self):
        return self.n_past * self.dt

    @property
    def T(self):
        return self.n_future * self.dt

    @property
    def times(self):
        return self.dt * np.arange(-self.n_past, self.n_future + 1)

    def _chunk(self, side, c):
        key = (side, c)
        if key in self._cache:
            return self._cache[key]
        gen = self.rng.generator(side, c)
        K, P, N = self.chunk_steps, self.n_paths, self.spec.n_modes
        fam = self.spec.family
        if isinstance(fam, CompoundPoisson):
            counts = gen.poisson(fam.rate * K * self.dt, size=(P, N))
            flat = counts.ravel()
            owner = np.repeat(np.arange(flat.size), flat)
            pos = gen.uniform(0.0, K, size=owner.size)
            step = np.minimum(pos.astype(np.int64), K - 1)
            age = (step + 1 - pos) * self.dt
            sizes = fam.jumps.sample(gen, owner.size)
            data = (owner // N, step, owner % N, age, sizes)
        else:
            data = standard_stable(fam.alpha, gen, (P, K, N))
        self._cache[key] = data
        return data

    def _chunk_increments(self, side, c, lambdas):
        K, P, N = self.chunk_steps, self.n_paths, self.spec.n_modes
        amp = self.spec.amplitudes
        fam = self.spec.family
        data = self._chunk(side, c)
        if isinstance(fam, CompoundPoisson):
            path, step, mode, age, sizes = data
            w = amp[mode] * np.exp(-lambdas[mode] * age) * sizes
            flat = (path * K + step) * N + mode
            return np.bincount(flat, weights=w, minlength=P * K * N).reshape(P, K, N)
        scale = amp * fam.scale * fam.convolution_scale(lambdas, self.dt)
        return data * scale

    def convolution_increments(self, lambdas=None, start=None, stop=None):
        """``int_{t_i}^{t_{i+1}} e^{-lambda_k (t_{i+1} - s)} b_k beta_k dL^k(s)``.

        Returns shape ``(n_paths, stop - start, n_modes)`` for global steps
        ``start <= i < stop`` (defaults: the whole grid). ``lambdas=None`` gives
        plain increments.
        """
        N = self.spec.n_modes
        lam = np.zeros(N) if lambdas is None else np.asarray(lambdas, dtype=float)[:N]
        if lam.size != N:
            raise ValueError("need one rate per noise mode")
        start = -self.n_past if start is None else start
        stop = self.n_future if stop is None else stop
        if start < -self.n_past or stop > self.n_future or start > stop:
            raise ValueError("requested steps outside the path grid")
        K = self.chunk_steps
        out = np.empty((self.n_paths, stop - start, N))
        i = start
        while i < stop:
            if i >= 0:
                c, off = divmod(i, K)
                side, base = 0, c * K
            else:
                c = (-i - 1) // K
                side, base = 1, -(c + 1) * K
                off = i - base
            take = min(K - off, stop - i)
            inc = self._chunk_increments(side, c, lam)
            out[:, i - start:i - start + take] = inc[:, off:off + take]
            i += take
        return out

    def increments(self, start=None, stop=None):
        return self.convolution_increments(None, start, stop)

    def values(self):
        """``L-bar`` on the full grid, anchored at ``L-bar(0) = 0``."""
        inc = self.increments()
        past, future = inc[:, :self.n_past], inc[:, self.n_past:]
        P, N = self.n_paths, self.spec.n_modes
        left = -np.cumsum(past[:, ::-1], axis=1)[:, ::-1]
        right = np.cumsum(future, axis=1)
        return np.concatenate([left, np.zeros((P, 1, N)), right], axis=1)


def build_double_sided(spec, xi, T, dt, rng, n_paths=1):
    return DoubleSidedPath(spec, xi, T, dt, rng, n_paths=n_paths)
