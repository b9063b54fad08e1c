"""Hot numeric kernels, each in a numba and a pure-numpy flavour.

The public names (``resolvent``, ``yosida_values``, ``drift_eval``,
``exp_euler_chunk``) dispatch on :data:`levy_spde._accel.USE_NUMBA`. The
``*_numpy`` and ``*_numba`` variants stay importable so both can be compared.

Polynomial coefficients are stored in ascending order, ``g(u) = sum c[i] u**i``.
A Yosida parameter ``m = inf`` means the unregularised drift ``g``.
"""
import numpy as np

from ._accel import USE_NUMBA, njit

NEWTON_TOL = 1e-12
NEWTON_MAXITER = 200


# ---------------------------------------------------------------- numpy path

def poly_numpy(c, u):
    out = np.zeros_like(u, dtype=float) + c[-1]
    for coef in c[-2::-1]:
        out = out * u + coef
    return out


def poly_deriv_numpy(c, u):
    d = np.arange(1, len(c)) * np.asarray(c[1:])
    if d.size == 0:
        return np.zeros_like(u, dtype=float)
    return poly_numpy(d, u)


def resolvent_numpy(x, c, m, kappa):
    """Solve ``y - g(y)/m = x`` elementwise by bracketed Newton.

    ``kappa = 1 - eta/m > 0`` is a lower bound on the slope of the left-hand
    side, which yields the initial bracket.
    """
    shape = np.shape(x)
    x = np.asarray(x, dtype=float).ravel()
    r = -(-c[0] / m - x) / kappa
    lo = np.minimum(0.0, r)
    hi = np.maximum(0.0, r)
    y = np.clip(x, lo, hi)
    active = hi > lo
    for _ in range(NEWTON_MAXITER):
        if not active.any():
            break
        ya, la, ha = y[active], lo[active], hi[active]
        f = ya - poly_numpy(c, ya) / m - x[active]
        la = np.where(f < 0, ya, la)
        ha = np.where(f > 0, ya, ha)
        d = 1.0 - poly_deriv_numpy(c, ya) / m
        yn = ya - f / d
        out = ~((yn > la) & (yn < ha))
        yn = np.where(out, 0.5 * (la + ha), yn)
        yn = np.where(f == 0, ya, yn)
        done = (np.abs(yn - ya) <= NEWTON_TOL * np.maximum(1.0, np.abs(yn))) | (f == 0) \
            | (ha - la <= NEWTON_TOL * np.maximum(1.0, np.abs(yn)))
        y[active], lo[active], hi[active] = yn, la, ha
        idx = np.flatnonzero(active)
        active[idx[done]] = False
    return y.reshape(shape)


def yosida_values_numpy(u, c, m, kappa):
    if np.isinf(m):
        return poly_numpy(c, u)
    return poly_numpy(c, resolvent_numpy(u, c, m, kappa))


def drift_eval_numpy(x, n, fwd, inv, c, m, kappa):
    """``Pi_n inv(g_m(fwd(Pi_n x)))`` for ``x`` of shape ``(M, N)``."""
    out = np.zeros_like(x)
    if n == 0:
        return out
    u = x[:, :n] @ fwd[:, :n].T
    vals = yosida_values_numpy(u, c, m, kappa)
    out[:, :n] = vals @ inv[:n].T
    return out


def exp_euler_chunk_numpy(x, conv, decay, dt, n, fwd, inv, c, m, kappa, linear):
    """Advance ``x`` through ``conv.shape[1]`` steps; returns all states."""
    M, K, N = conv.shape
    out = np.empty((M, K, N))
    x = np.array(x, dtype=float, copy=True)
    for s in range(K):
        if linear:
            x = decay * x + conv[:, s]
        else:
            x = decay * (x + dt * drift_eval_numpy(x, n, fwd, inv, c, m, kappa)) + conv[:, s]
        out[:, s] = x
    return out


# ---------------------------------------------------------------- numba path

@njit
def _poly(c, u):
    acc = c[c.shape[0] - 1]
    for i in range(c.shape[0] - 2, -1, -1):
        acc = acc * u + c[i]
    return acc


@njit
def _poly_deriv(c, u):
    nc = c.shape[0]
    if nc < 2:
        return 0.0
    acc = (nc - 1) * c[nc - 1]
    for i in range(nc - 2, 0, -1):
        acc = acc * u + i * c[i]
    return acc


@njit
def _resolvent_scalar(x, c, m, kappa):
    r = -(-c[0] / m - x) / kappa
    lo = min(0.0, r)
    hi = max(0.0, r)
    if not hi > lo:
        return lo
    y = min(max(x, lo), hi)
    for _ in range(NEWTON_MAXITER):
        f = y - _poly(c, y) / m - x
        if f == 0.0:
            return y
        if f < 0.0:
            lo = y
        else:
            hi = y
        d = 1.0 - _poly_deriv(c, y) / m
        yn = y - f / d
        if not (yn > lo and yn < hi):
            yn = 0.5 * (lo + hi)
        tol = NEWTON_TOL * max(1.0, abs(yn))
        if abs(yn - y) <= tol or hi - lo <= tol:
            return yn
        y = yn
    return y


@njit
def _g_m(u, c, m, kappa, regularised):
    if regularised:
        return _poly(c, _resolvent_scalar(u, c, m, kappa))
    return _poly(c, u)


@njit
def resolvent_numba(x, c, m, kappa):
    flat = x.ravel()
    out = np.empty(flat.shape[0])
    for i in range(flat.shape[0]):
        out[i] = _resolvent_scalar(flat[i], c, m, kappa)
    return out.reshape(x.shape)


@njit
def yosida_values_numba(u, c, m, kappa):
    flat = u.ravel()
    out = np.empty(flat.shape[0])
    reg = not np.isinf(m)
    for i in range(flat.shape[0]):
        out[i] = _g_m(flat[i], c, m, kappa, reg)
    return out.reshape(u.shape)


@njit
def _drift_row(xp, n, fwd, inv, c, m, kappa, reg, grid, d):
    G = fwd.shape[0]
    for j in range(G):
        s = 0.0
        for k in range(n):
            s += fwd[j, k] * xp[k]
        grid[j] = _g_m(s, c, m, kappa, reg)
    for k in range(n):
        s = 0.0
        for j in range(G):
            s += inv[k, j] * grid[j]
        d[k] = s
    for k in range(n, d.shape[0]):
        d[k] = 0.0


@njit
def drift_eval_numba(x, n, fwd, inv, c, m, kappa):
    M, N = x.shape
    out = np.zeros((M, N))
    grid = np.empty(fwd.shape[0])
    reg = not np.isinf(m)
    for p in range(M):
        _drift_row(x[p], n, fwd, inv, c, m, kappa, reg, grid, out[p])
    return out


@njit
def exp_euler_chunk_numba(x, conv, decay, dt, n, fwd, inv, c, m, kappa, linear):
    M, K, N = conv.shape
    out = np.empty((M, K, N))
    grid = np.empty(fwd.shape[0])
    d = np.zeros(N)
    xp = np.empty(N)
    reg = not np.isinf(m)
    for p in range(M):
        for k in range(N):
            xp[k] = x[p, k]
        for s in range(K):
            if linear:
                for k in range(N):
                    xp[k] = decay[k] * xp[k] + conv[p, s, k]
            else:
                _drift_row(xp, n, fwd, inv, c, m, kappa, reg, grid, d)
                for k in range(N):
                    xp[k] = decay[k] * (xp[k] + dt * d[k]) + conv[p, s, k]
            for k in range(N):
                out[p, s, k] = xp[k]
    return out


# ---------------------------------------------------------------- dispatch

def _f64(a):
    return np.ascontiguousarray(a, dtype=np.float64)


def resolvent(x, c, m, kappa):
    x, c = np.asarray(x, dtype=float), _f64(c)
    if USE_NUMBA:
        return resolvent_numba(_f64(x), c, float(m), float(kappa))
    return resolvent_numpy(x, c, m, kappa)


def yosida_values(u, c, m, kappa):
    u, c = np.asarray(u, dtype=float), _f64(c)
    if USE_NUMBA:
        return yosida_values_numba(_f64(u), c, float(m), float(kappa))
    return yosida_values_numpy(u, c, m, kappa)


def drift_eval(x, n, fwd, inv, c, m, kappa):
    args = (_f64(x), int(n), _f64(fwd), _f64(inv), _f64(c), float(m), float(kappa))
    return drift_eval_numba(*args) if USE_NUMBA else drift_eval_numpy(*args)


def exp_euler_chunk(x, conv, decay, dt, n, fwd, inv, c, m, kappa, linear, backend=None):
    use_numba = USE_NUMBA if backend is None else backend == "numba"
    args = (_f64(x), _f64(conv), _f64(decay), float(dt), int(n), _f64(fwd), _f64(inv),
            _f64(c), float(m), float(kappa), bool(linear))
    return exp_euler_chunk_numba(*args) if use_numba else exp_euler_chunk_numpy(*args)


BACKEND = "numba" if USE_NUMBA else "numpy"
