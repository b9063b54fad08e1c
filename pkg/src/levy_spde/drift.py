"""Dissipative Nemytskii drift ``F(u)(s) = g(u(s))`` and its Yosida regularisation.

``g`` is a real polynomial of odd degree with negative leading coefficient, so
``g'`` is bounded above by ``eta`` and ``(g(u) - g(v))(u - v) <= eta (u - v)**2``.
The zero polynomial is accepted and marks the linear case ``F = 0``.

A pointwise map acts on eigencoordinates through a :class:`CollocationMap`:
coefficients are evaluated on an interior grid, ``g`` is applied there, and the
result is projected back by the discrete orthogonality of the eigenfunctions.
"""
from dataclasses import dataclass
import math

import numpy as np

from . import kernels
from .errors import DriftOverflowError, HypothesisViolation


def _trim(coeffs):
    c = np.asarray(coeffs, dtype=float)
    if c.ndim != 1:
        raise ValueError("coefficients must be 1-d")
    nz = np.flatnonzero(c)
    return c[: nz[-1] + 1] if nz.size else np.zeros(1)


def one_sided_constant(coeffs):
    """``eta = sup_u g'(u)`` for ascending ``coeffs``."""
    c = _trim(coeffs)
    deg = c.size - 1
    if deg == 0:
        if c[0] != 0:
            raise ValueError("a nonzero constant drift is not dissipative in the required sense")
        return 0.0
    if deg % 2 == 0 or c[-1] >= 0:
        raise ValueError("g must have odd degree and negative leading coefficient")
    d1 = np.polynomial.polynomial.polyder(c)
    if deg == 1:
        return float(d1[0])
    crit = np.polynomial.polynomial.polyroots(np.polynomial.polynomial.polyder(d1))
    real = crit[np.abs(crit.imag) <= 1e-9 * np.maximum(1.0, np.abs(crit))].real
    return float(np.max(np.polynomial.polynomial.polyval(real, d1)))


@dataclass(frozen=True, eq=False)
class DriftSpec:
    """Polynomial ``g`` (ascending coefficients) and grid oversampling factor."""

    coeffs: np.ndarray
    grid_oversampling: int = 4

    def __post_init__(self):
        c = _trim(self.coeffs)
        c.setflags(write=False)
        object.__setattr__(self, "coeffs", c)
        object.__setattr__(self, "_eta", one_sided_constant(c))
        if self.grid_oversampling < 1:
            raise ValueError("grid_oversampling must be at least 1")

    @property
    def eta(self):
        return self._eta

    @property
    def linear(self):
        """True when ``g`` is identically zero."""
        return not np.any(self.coeffs)

    @property
    def degree(self):
        return self.coeffs.size - 1

    def g(self, u):
        return kernels.poly_numpy(self.coeffs, np.asarray(u, dtype=float))

    def kappa(self, m):
        """Lower slope bound ``1 - eta/m`` of ``y -> y - g(y)/m``."""
        if math.isinf(m):
            return 1.0
        if not m > self.eta or m <= 0:
            raise HypothesisViolation(
                "yosida_m_gt_eta",
                f"resolvent of g is not single-valued for m={m} <= eta={self.eta}")
        return 1.0 - self.eta / m


def cubic_drift(c=0.0):
    """``g(u) = -u**3 + c u``; ``eta = c``."""
    return DriftSpec(np.array([0.0, c, 0.0, -1.0]))


def zero_drift():
    return DriftSpec(np.zeros(1))


@dataclass(frozen=True, eq=False)
class CollocationMap:
    """Dense transforms between ``N`` coefficients and ``G`` grid values.

    ``forward`` has shape ``(G, N)``; ``inverse`` has shape ``(N, G)`` and is the
    discrete-orthogonality quadrature, so ``inverse @ forward = I`` whenever
    ``G >= N``.
    """

    points: np.ndarray
    forward: np.ndarray
    inverse: np.ndarray

    @property
    def dim(self):
        return self.forward.shape[1]

    @property
    def grid_size(self):
        return self.forward.shape[0]


def make_collocation(op, grid_size=None, oversampling=4):
    N, ell = op.dim, op.length
    G = oversampling * N if grid_size is None else int(grid_size)
    if G < N:
        raise ValueError("grid must have at least as many points as modes")
    k = np.arange(1, N + 1)
    if op.basis == "sine":
        s = ell * np.arange(1, G + 1) / (G + 1)
        fwd = math.sqrt(2.0 / ell) * np.sin(np.pi * np.outer(s, k) / ell)
        inv = (ell / (G + 1)) * fwd.T
    elif op.basis == "cosine":
        s = ell * (np.arange(G) + 0.5) / G
        fwd = math.sqrt(2.0 / ell) * np.cos(np.pi * np.outer(s, k - 1) / ell)
        fwd[:, 0] = 1.0 / math.sqrt(ell)
        inv = (ell / G) * fwd.T
    else:
        raise ValueError(f"unknown basis {op.basis!r}")
    for a in (s, fwd, inv):
        a.setflags(write=False)
    return CollocationMap(s, np.ascontiguousarray(fwd), np.ascontiguousarray(inv))


def _check_finite(a):
    if not np.all(np.isfinite(a)):
        raise DriftOverflowError("non-finite drift values; reduce the time step")
    return a


def _as_batch(x):
    x = np.asarray(x, dtype=float)
    return x.reshape(-1, x.shape[-1]), x.shape


def apply_drift(spec, cmap, x, n=None):
    """``Pi_n F(Pi_n x)`` in eigencoordinates (last axis of ``x``)."""
    return yosida_drift(spec, cmap, math.inf, x, n)


def yosida_scalar(spec, m, x):
    """``F_m(x) = g(J_m x)`` with ``J_m = (I - g/m)^{-1}``; ``m = inf`` gives ``g``."""
    kappa = spec.kappa(m)
    if spec.linear:
        return np.zeros_like(np.asarray(x, dtype=float))
    return kernels.yosida_values(np.asarray(x, dtype=float), spec.coeffs, m, kappa)


def resolvent_scalar(spec, m, x):
    """``J_m x``: the root ``y`` of ``y - g(y)/m = x``."""
    return kernels.resolvent(np.asarray(x, dtype=float), spec.coeffs, m, spec.kappa(m))


def yosida_drift(spec, cmap, m, x, n=None):
    """``Pi_n F_m(Pi_n x)`` through the collocation grid."""
    kappa = spec.kappa(m)
    flat, shape = _as_batch(x)
    n = flat.shape[1] if n is None else min(int(n), flat.shape[1])
    if spec.linear:
        return np.zeros(shape)
    with np.errstate(over="ignore", invalid="ignore"):
        out = kernels.drift_eval(flat, n, cmap.forward, cmap.inverse, spec.coeffs, m, kappa)
    return _check_finite(out).reshape(shape)


def to_grid(cmap, x):
    return np.asarray(x, dtype=float) @ cmap.forward.T


def from_grid(cmap, u):
    return np.asarray(u, dtype=float) @ cmap.inverse.T
