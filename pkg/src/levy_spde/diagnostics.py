"""Statistical checks on Monte Carlo ensembles.

All pass/fail thresholds derive from the sample count: the two-sample
Kolmogorov-Smirnov 95% critical value ``1.36 sqrt((Ma + Mb) / (Ma Mb))`` and
CF bands of ``3 / sqrt(M)`` per real component.
"""
from dataclasses import dataclass, field
import math

import numpy as np
from scipy import stats

from .engine import decompose, ensemble, ensemble_decompose, ensemble_solve
from .errors import HypothesisViolation
from .levy1d import SymmetricAlphaStable
from .ou_invariant import sample_xi
from .rng import RngStream

KS_COEFF_95 = 1.36
CF_BAND = 3.0


def empirical_cf(samples, h):
    """``mean(exp(i h X))``; vectorised over ``h``."""
    x = np.asarray(samples, dtype=float).ravel()
    if x.size < 2:
        raise ValueError("need at least two samples")
    h = np.asarray(h, dtype=float)
    out = np.exp(1j * np.multiply.outer(h, x)).mean(axis=-1)
    return out if out.ndim else complex(out)


def ks_threshold(ma, mb):
    return KS_COEFF_95 * math.sqrt((ma + mb) / (ma * mb))


def ks_two_sample(a, b):
    """Sup-distance of the empirical CDFs and whether it is below the 95% threshold."""
    a = np.sort(np.asarray(a, dtype=float).ravel())
    b = np.sort(np.asarray(b, dtype=float).ravel())
    grid = np.concatenate([a, b])
    cdf_a = np.searchsorted(a, grid, side="right") / a.size
    cdf_b = np.searchsorted(b, grid, side="right") / b.size
    stat = float(np.max(np.abs(cdf_a - cdf_b)))
    return stat, stat < ks_threshold(a.size, b.size)


@dataclass
class LineFit:
    slope: float
    intercept: float
    r_squared: float
    slope_stderr: float
    n_points: int

    def __iter__(self):
        return iter((self.slope, self.intercept, self.r_squared))


def decay_rate_fit(times, values, floor=0.0):
    """Least-squares line through ``(t, log value)`` over points with ``value > floor``.

    Unpacks as ``(slope, intercept, r_squared)``.
    """
    t = np.asarray(times, dtype=float)
    v = np.asarray(values, dtype=float)
    floor = np.broadcast_to(np.asarray(floor, dtype=float), v.shape)
    use = np.isfinite(v) & (v > 0) & (v > floor)
    if use.sum() < 3:
        raise ValueError("need at least 3 points above the noise floor")
    t, y = t[use], np.log(v[use])
    tm, ym = t.mean(), y.mean()
    sxx = np.sum((t - tm) ** 2)
    slope = float(np.sum((t - tm) * (y - ym)) / sxx)
    intercept = float(ym - slope * tm)
    resid = y - (intercept + slope * t)
    sst = np.sum((y - ym) ** 2)
    r2 = 1.0 if sst == 0 else float(1.0 - np.sum(resid ** 2) / sst)
    dof = t.size - 2
    se = float(math.sqrt(np.sum(resid ** 2) / dof / sxx)) if dof > 0 else 0.0
    return LineFit(slope, intercept, r2, se, int(t.size))


@dataclass
class StationarityReport:
    marginal: list = field(default_factory=list)   # (t, lag, mode, stat, threshold, pass)
    joint: list = field(default_factory=list)      # (t, lag, shift, u1, u2, diff, band, pass)

    @property
    def pass_rate(self):
        rows = self.marginal + self.joint
        return float(np.mean([r[-1] for r in rows])) if rows else 1.0

    @property
    def passed(self):
        return all(r[-1] for r in self.marginal) and all(r[-1] for r in self.joint)


def _state_at(sample, t):
    i = int(np.argmin(np.abs(sample.times - t)))
    if abs(sample.times[i] - t) > 1e-9 + 1e-9 * abs(t):
        raise ValueError(f"time {t} is not on the recorded grid")
    return sample.states[i]


def stationarity_test(sample, lags, t0=0.0, modes=(0,), shift=None, u_grid=(-1.0, 1.0)):
    """KS between marginals at ``t0`` and ``t0 + lag`` per mode, plus a joint
    two-time CF comparison of ``(r_1(t), r_1(t + lag))`` between ``t0`` and
    ``t0 + shift``.
    """
    M = sample.n_paths
    if M < 1000:
        raise ValueError("stationarity checks need at least 1000 trajectories")
    rep = StationarityReport()
    base = _state_at(sample, t0)
    for lag in lags:
        later = _state_at(sample, t0 + lag)
        for k in modes:
            if lag == 0:
                rep.marginal.append((t0, lag, k, 0.0, ks_threshold(M, M), True))
                continue
            stat, ok = ks_two_sample(base[:, k], later[:, k])
            rep.marginal.append((t0, lag, k, stat, ks_threshold(M, M), ok))
    if shift is not None:
        band = CF_BAND * math.sqrt(2.0 / M)
        k = modes[0]
        for lag in lags:
            a1, a2 = base[:, k], _state_at(sample, t0 + lag)[:, k]
            b1, b2 = _state_at(sample, t0 + shift)[:, k], _state_at(sample, t0 + shift + lag)[:, k]
            for u1 in u_grid:
                for u2 in u_grid:
                    ca = np.exp(1j * (u1 * a1 + u2 * a2)).mean()
                    cb = np.exp(1j * (u1 * b1 + u2 * b2)).mean()
                    diff = max(abs(ca.real - cb.real), abs(ca.imag - cb.imag))
                    rep.joint.append((t0, lag, shift, u1, u2, float(diff), band, diff < band))
    return rep


# ---------------------------------------------------------------- mixing

@dataclass(frozen=True)
class TestFunction:
    name: str
    lipschitz: float

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.name == "tanh_mode1":
            return np.tanh(x[..., 0])
        if self.name == "clipped_norm":
            return np.minimum(np.linalg.norm(x, axis=-1), 1.0)
        if self.name == "constant":
            return np.full(x.shape[:-1], 0.5)
        raise ValueError(f"unknown test function {self.name!r}")


PSI_LIBRARY = {
    "tanh_mode1": TestFunction("tanh_mode1", 1.0),
    "clipped_norm": TestFunction("clipped_norm", 1.0),
    "constant": TestFunction("constant", 0.0),
}


@dataclass
class MixingReport:
    """Estimated ``|P_t psi(x) - mu(psi)|`` on ``times`` and its exponential fit.

    ``rate`` is the fitted exponent with a 95% interval ``rate_ci``; ``c_x`` is the
    bound-function estimate ``max_t gap(t) e^{(omega - eta) t} / ||psi||_Lip`` over
    the fitted times. Both candidate exponents ``omega + eta`` and
    ``omega - eta`` are reported; only the latter is asserted by the checks.
    """

    psi: str
    x: np.ndarray
    times: np.ndarray
    gap: np.ndarray
    stderr: np.ndarray
    rate: float
    rate_ci: tuple
    c_x: float
    c_x_stderr: float
    fitted: np.ndarray
    exponent_plus: float
    exponent_minus: float
    notes: str = ("the stated mixing exponent omega + eta and the contraction "
                  "rate omega - eta disagree when eta != 0; only omega - eta is asserted")


def check_mixing_hypotheses(config, M=2000, seed=0, record_stride=50):
    """Monte Carlo estimate of ``sup_t E(|L_A(t)| + |F(L_A(t))|)``.

    Refuses stable noise, whose first moment of ``|F(L_A)|`` is infinite for any
    nonlinear polynomial drift.
    """
    from .drift import zero_drift, apply_drift

    if isinstance(config.noise.family, SymmetricAlphaStable):
        raise HypothesisViolation(
            "mixing_moments", "moment condition on L_A and F(L_A) needs finite-moment noise")
    lin = config.replace(drift=zero_drift(), x0=np.zeros(config.N))
    ou = ensemble_solve(lin, M, seed, record_stride)
    la = ou.states
    fl = apply_drift(config.drift, config.cmap, la, config.n)
    vals = np.linalg.norm(la, axis=-1).mean(axis=1) + np.linalg.norm(fl, axis=-1).mean(axis=1)
    return float(np.max(vals))


def _coupled_gap(config, psi, x, M, seed, record_stride, threads=1):
    cfg = config.replace(x0=np.asarray(x, dtype=float))

    def run(stream, n):
        X, r, _ = decompose(cfg, stream, n, record_stride)
        return X.times, psi(X.states) - psi(r.states)

    res = ensemble(cfg, M, seed, run, threads=threads)
    times = res[0][0]
    diffs = np.concatenate([d for _, d in res], axis=1)
    return times, diffs.mean(axis=1), diffs.std(axis=1, ddof=1) / math.sqrt(M)


def mixing_estimate(config, psi, x, times=None, M=1000, seed=0, record_stride=20, threads=1):
    """Estimate the approach of ``P_t psi(x)`` to ``mu(psi)``.

    ``mu(psi)`` is represented by the coupled stationary process ``r`` sharing
    the noise of ``X``, so ``P_t psi(x) - mu(psi) = E[psi(X_t) - psi(r_t)]``
    estimated with far lower variance than two independent ensembles.
    """
    psi = PSI_LIBRARY[psi] if isinstance(psi, str) else psi
    t, gap, se = _coupled_gap(config, psi, x, M, seed, record_stride, threads)
    if times is not None:
        idx = [int(np.argmin(np.abs(t - s))) for s in times]
        t, gap, se = t[idx], gap[idx], se[idx]
    absgap = np.abs(gap)
    fitted = absgap > CF_BAND * se
    if psi.lipschitz == 0 or fitted.sum() < 3:
        rate, ci = math.nan, (math.nan, math.nan)
    else:
        fit = decay_rate_fit(t[fitted], absgap[fitted])
        rate = -fit.slope
        q = stats.t.ppf(0.975, max(fit.n_points - 2, 1))
        ci = (rate - q * fit.slope_stderr, rate + q * fit.slope_stderr)
    rho = config.gap
    if psi.lipschitz == 0 or not fitted.any():
        c_x, c_se = 0.0, 0.0
    else:
        scaled = absgap * np.exp(rho * t) / psi.lipschitz
        scaled[~fitted] = -np.inf
        j = int(np.argmax(scaled))
        c_x, c_se = float(scaled[j]), float(se[j] * math.exp(rho * t[j]) / psi.lipschitz)
    return MixingReport(psi.name, np.asarray(x, dtype=float), t, gap, se, rate, ci, c_x, c_se,
                        fitted, config.op.omega + config.drift.eta, rho)


@dataclass
class BoundRegression:
    norms: np.ndarray
    c_values: np.ndarray
    c_stderr: np.ndarray
    intercept: float
    slope: float
    C: float
    consistent: bool


def bound_function_regression(config, psi, xs, M=1000, seed=0, record_stride=20):
    """Estimate ``c(x)`` at several initial points and test ``c(x) <= C (|x| + 1)``.

    ``C = max(a, b, 0)`` from the least-squares line ``c ~ a + b |x|``;
    consistency allows each estimate a ``3 sigma`` Monte Carlo margin.
    """
    reps = [mixing_estimate(config, psi, x, None, M, seed, record_stride) for x in xs]
    norms = np.array([np.linalg.norm(x) for x in xs])
    c = np.array([r.c_x for r in reps])
    se = np.array([r.c_x_stderr for r in reps])
    b, a = np.polyfit(norms, c, 1)
    C = max(a, b, 0.0)
    ok = bool(np.all(c <= C * (norms + 1.0) + CF_BAND * se + 1e-12))
    return BoundRegression(norms, c, se, float(a), float(b), float(C), ok)


# ---------------------------------------------------------------- law equality

@dataclass
class LawEqualityReport:
    rows: list  # (mode, pair, stat, threshold, pass)

    @property
    def passed(self):
        return all(r[-1] for r in self.rows)


def invariant_law_equality(config, M=2000, seed=0, modes=(0, 1, 2), enforce_horizon=True,
                           threads=1):
    """Per-mode KS between ``X(T)`` from ``x0``, ``r(0)`` and (linear case) ``xi``."""
    if enforce_horizon and config.gap * config.T < 10:
        raise HypothesisViolation(
            "horizon", f"(omega - eta) T = {config.gap * config.T:.3g} < 10; X(T) is still transient")
    stride = int(round(config.T / config.dt))
    parts = ensemble_decompose(config, M, seed, stride, threads=threads, parts=("X", "r"))
    xT = parts["X"].states[-1]
    r0 = parts["r"].states[0]
    samples = {"X(T)": xT, "r(0)": r0}
    if config.drift.linear:
        samples["xi"] = sample_xi(config.op, config.noise, RngStream(int(seed), 10**9), M)
    names = list(samples)
    rows = []
    for k in modes:
        for i in range(len(names)):
            for j in range(i + 1, len(names)):
                a, b = samples[names[i]][:, k], samples[names[j]][:, k]
                stat, ok = ks_two_sample(a, b)
                rows.append((k + 1, f"{names[i]}~{names[j]}", stat, ks_threshold(a.size, b.size), ok))
    return LawEqualityReport(rows)
