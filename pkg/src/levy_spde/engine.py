"""Time integration of ``dX = (AX + Pi_n F_m(Pi_n X)) dt + B dL``.

Scheme: exponential Euler with exact per-mode noise convolution,

    x+ = e^{dt A} (x + dt Pi_n F_m(Pi_n x)) + int_t^{t+dt} e^{(t+dt-s)A} B dL(s),

so the linear part and the noise are exact in law and only the drift carries
an O(dt) error. ``m = inf`` uses ``g`` itself.

The stationary process ``r`` is the solution started at ``-xi`` from
``e^{-lambda xi} Pi_n x`` and driven by the past and future noise of a
:class:`~levy_spde.cylnoise.DoubleSidedPath`; ``X`` starts at ``Pi_n x`` at
time 0 and shares the future noise, and ``v = X - r``.
"""
from dataclasses import dataclass, field, replace
import math
import warnings

import numpy as np

from . import kernels
from .cylnoise import DoubleSidedPath
from .drift import DriftSpec, make_collocation
from .errors import DriftOverflowError, HypothesisViolation
from .rng import RngStream
from .spectral import project

BURN_IN_TARGET = 10.0


class BurnInWarning(UserWarning):
    pass


@dataclass(frozen=True, eq=False)
class SolverConfig:
    op: object
    noise: object
    drift: DriftSpec
    dt: float = 1e-3
    T: float = 1.0
    xi: float = 1.0
    m: float = math.inf
    n: int | None = None
    x0: np.ndarray | None = None

    def __post_init__(self):
        N = self.op.dim
        if self.n is None:
            object.__setattr__(self, "n", N)
        if not 0 <= self.n <= N:
            raise ValueError(f"Galerkin modes n={self.n} must lie in [0, {N}]")
        if self.noise.n_modes < N:
            raise ValueError("noise must provide at least as many modes as the operator")
        if not self.dt > 0 or not self.T > 0 or self.xi < 0:
            raise ValueError("need dt > 0, T > 0, xi >= 0")
        gap = self.op.omega - self.drift.eta
        if not gap > 0:
            raise HypothesisViolation(
                "omega_gt_eta",
                f"A + F must be dissipative: need omega > eta, got omega={self.op.omega:g}, "
                f"eta={self.drift.eta:g}")
        self.drift.kappa(self.m)
        x0 = np.zeros(N) if self.x0 is None else np.asarray(self.x0, dtype=float)
        if x0.shape != (N,):
            raise ValueError(f"x0 must have {N} coefficients")
        object.__setattr__(self, "x0", x0)
        object.__setattr__(self, "_cmap", make_collocation(self.op, oversampling=self.drift.grid_oversampling))

    @property
    def N(self):
        return self.op.dim

    @property
    def gap(self):
        """``omega - eta``, the contraction rate of ``A + F``."""
        return self.op.omega - self.drift.eta

    @property
    def cmap(self):
        return self._cmap

    @property
    def lambdas(self):
        return self.op.lambdas

    def replace(self, **changes):
        return replace(self, **changes)

    def kernel_args(self):
        """Arguments shared by every kernel call, minus state and noise."""
        c = self.cmap
        return dict(decay=self.op.decay(self.dt), dt=self.dt, n=self.n, fwd=c.forward,
                    inv=c.inverse, c=self.drift.coeffs, m=self.m,
                    kappa=self.drift.kappa(self.m), linear=self.drift.linear)


@dataclass
class PathSample:
    """States on a time grid; ``states`` has shape ``(n_times, n_paths, N)``."""

    times: np.ndarray
    states: np.ndarray
    tag: str = "X"
    stream: RngStream | None = None
    info: dict = field(default_factory=dict)

    @property
    def n_paths(self):
        return self.states.shape[1]

    def at(self, t):
        """States at the grid time nearest to ``t``, shape ``(n_paths, N)``."""
        return self.states[int(np.argmin(np.abs(self.times - t)))]

    def norms(self):
        return np.linalg.norm(self.states, axis=-1)


def drift_term(config, x):
    """``Pi_n F_m(Pi_n x)`` for ``x`` of shape ``(..., N)``."""
    from .drift import yosida_drift

    return yosida_drift(config.drift, config.cmap, config.m, x, config.n)


def step(config, x, noise_increment, dt=None):
    """One exponential-Euler step; ``noise_increment`` is the exact convolution increment."""
    dt = config.dt if dt is None else dt
    x = np.asarray(x, dtype=float)
    decay = config.op.decay(dt)
    if config.drift.linear:
        return decay * x + noise_increment
    return decay * (x + dt * drift_term(config, x)) + noise_increment


def integrate(config, x0, path, start, stop, record_stride=1, backend=None):
    """Advance ``x0`` (shape ``(n_paths, N)``) over global steps ``start..stop-1``.

    Returns the recorded grid times (multiples of ``record_stride * dt``) and
    states of shape ``(n_times, n_paths, N)``.
    """
    args = config.kernel_args()
    N = config.N
    x = np.array(np.broadcast_to(x0, (path.n_paths, N)), dtype=float)
    rec_t, rec_x = [], []
    if start % record_stride == 0:
        rec_t.append(start)
        rec_x.append(x.copy())
    i = start
    K = path.chunk_steps
    while i < stop:
        j = min(stop, (i // K + 1) * K)
        conv = path.convolution_increments(config.lambdas, i, j)[:, :, :N]
        with np.errstate(over="ignore", invalid="ignore"):
            states = kernels.exp_euler_chunk(x, conv, backend=backend, **args)
        if not np.all(np.isfinite(states)):
            raise DriftOverflowError(
                f"non-finite state between steps {i} and {j}; reduce dt={config.dt}")
        idx = np.arange(i + 1, j + 1)
        keep = np.flatnonzero(idx % record_stride == 0)
        if keep.size:
            rec_t.extend(idx[keep])
            rec_x.extend(np.moveaxis(states[:, keep], 1, 0))
        x = states[:, -1]
        i = j
    times = np.asarray(rec_t, dtype=float) * config.dt
    return times, np.stack(rec_x)


def solve_path(config, path, record_stride=1, x0=None, backend=None):
    """``X`` on ``[0, T]`` from ``Pi_n x0`` driven by the future noise of ``path``."""
    x0 = config.x0 if x0 is None else np.asarray(x0, dtype=float)
    start = project(x0, config.n)
    times, states = integrate(config, start, path, 0, path.n_future, record_stride, backend)
    return PathSample(times, states, "X", path.rng)


def stationary_initial(config, xi):
    return project(config.x0, config.n) * config.op.decay(xi)


def stationary_path(config, path, record_stride=1, include_past=False, backend=None):
    """Approximation of the stationary process ``r`` on ``[0, T]``.

    Integrates from ``-xi`` (the path's burn-in) starting at ``e^{-lambda xi} Pi_n x``.
    Warns with :class:`BurnInWarning` when ``xi (omega - eta) < 10``.
    """
    xi = path.xi
    if xi * config.gap < BURN_IN_TARGET:
        warnings.warn(f"burn-in xi={xi:g} gives xi*(omega-eta)={xi * config.gap:.3g} < "
                      f"{BURN_IN_TARGET:g}; r may not have reached stationarity",
                      BurnInWarning, stacklevel=2)
    r0 = stationary_initial(config, xi)
    times, states = integrate(config, r0, path, -path.n_past, path.n_future,
                              record_stride, backend)
    if not include_past:
        keep = times >= -1e-12
        times, states = times[keep], states[keep]
    return PathSample(times, states, "r", path.rng)


def picard_stationary(config, path, k_iters):
    """Picard iterates for ``r`` on the full grid ``[-xi, T]``.

    Iterate 0 is the constant path ``x0``; iterate ``k+1`` is the left-endpoint
    quadrature of ``e^{(t+xi)A} r(-xi) + int_{-xi}^t e^{(t-s)A} Pi_n F_m Pi_n(r_k(s)) ds``
    plus the exact noise convolution. ``info["residuals"]`` holds the sup-distance
    between successive iterates.
    """
    if k_iters < 0:
        raise ValueError("k_iters must be non-negative")
    N = config.N
    conv = path.convolution_increments(config.lambdas)[:, :, :N]
    P, S, _ = conv.shape
    times = path.times
    r = np.array(np.broadcast_to(config.x0, (S + 1, P, N)), dtype=float)
    decay, dt = config.op.decay(config.dt), config.dt
    r_init = stationary_initial(config, path.xi)
    residuals = []
    for _ in range(k_iters):
        d = drift_term(config, r[:-1]) if not config.drift.linear else np.zeros((S, P, N))
        new = np.empty_like(r)
        new[0] = r_init
        for i in range(S):
            new[i + 1] = decay * (new[i] + dt * d[i]) + conv[:, i]
        residuals.append(float(np.max(np.abs(new - r))))
        r = new
    return PathSample(times, r, "r", path.rng, info={"residuals": residuals})


def decompose(config, rng, n_paths=1, record_stride=1, path=None, backend=None):
    """``(X, r, v)`` with shared future noise and ``v = X - r`` on the grid of ``[0, T]``."""
    if path is None:
        if not isinstance(rng, RngStream):
            rng = RngStream(int(rng))
        path = DoubleSidedPath(config.noise, config.xi, config.T, config.dt, rng, n_paths)
    X = solve_path(config, path, record_stride, backend=backend)
    r = stationary_path(config, path, record_stride, backend=backend)
    v = PathSample(X.times, X.states - r.states, "v", path.rng)
    return X, r, v


def ensemble(config, M, seed, func, batch_size=256, threads=1):
    """Run ``func(stream, n_paths)`` over batches; batch ``j`` uses stream index ``j``.

    Batches have fixed size independent of ``threads``, and results are returned
    in batch order, so output is identical for any thread count.
    """
    sizes = [min(batch_size, M - s) for s in range(0, M, batch_size)]
    jobs = [(RngStream(int(seed), j), sz) for j, sz in enumerate(sizes)]
    if threads <= 1 or len(jobs) == 1:
        return [func(s, sz) for s, sz in jobs]
    from concurrent.futures import ThreadPoolExecutor

    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda job: func(*job), jobs))


def ensemble_decompose(config, M, seed, record_stride=1, batch_size=256, threads=1,
                       parts=("X", "r", "v")):
    """Concatenate :func:`decompose` over an ensemble of ``M`` trajectories."""

    def run(stream, n_paths):
        X, r, v = decompose(config, stream, n_paths, record_stride)
        return {"X": X, "r": r, "v": v}

    batches = ensemble(config, M, seed, run, batch_size, threads)
    out = {}
    for tag in parts:
        first = batches[0][tag]
        states = np.concatenate([b[tag].states for b in batches], axis=1)
        out[tag] = PathSample(first.times, states, tag, RngStream(int(seed)))
    return out


def ensemble_solve(config, M, seed, record_stride=1, batch_size=256, threads=1, x0=None):
    def run(stream, n_paths):
        path = DoubleSidedPath(config.noise, 0.0, config.T, config.dt, stream, n_paths)
        return solve_path(config, path, record_stride, x0=x0)

    batches = ensemble(config, M, seed, run, batch_size, threads)
    states = np.concatenate([b.states for b in batches], axis=1)
    return PathSample(batches[0].times, states, "X", RngStream(int(seed)))


def ensemble_stationary(config, M, seed, record_stride=1, batch_size=256, threads=1):
    def run(stream, n_paths):
        path = DoubleSidedPath(config.noise, config.xi, config.T, config.dt, stream, n_paths)
        return stationary_path(config, path, record_stride)

    batches = ensemble(config, M, seed, run, batch_size, threads)
    states = np.concatenate([b.states for b in batches], axis=1)
    return PathSample(batches[0].times, states, "r", RngStream(int(seed)))


def moment_summary(sample):
    """Rows ``(t, E|v|^2, E|v|^4, se2, se4)`` over the ensemble axis."""
    sq = np.sum(sample.states ** 2, axis=-1)
    q = sq ** 2
    M = sq.shape[1]
    return np.column_stack([
        sample.times, sq.mean(axis=1), q.mean(axis=1),
        sq.std(axis=1, ddof=1) / math.sqrt(M), q.std(axis=1, ddof=1) / math.sqrt(M),
    ])
