"""Experiment configuration files.

Format: ``[section]`` headers with ``key = value`` lines (``configparser``
syntax, ``#`` comments). Lists are comma separated. Unknown sections or keys
are errors. Sections and keys::

    [experiment]  kind, seed, M, T, dt, xi, n, x0, record_stride, modes, h_grid,
                  tolerance, lag, seeds, min_passes, fit_window, rate_factor,
                  psi, mixing_points, alphas, thetas, yosida_ms, yosida_samples,
                  yosida_range, sweep
    [operator]    kind (dirichlet | neumann-shifted | power), N, length, shift, c, gamma
    [noise]       family (compound-poisson | alpha-stable | slow-log-tail), rate,
                  jump_law (pm1 | discrete | uniform), jump_values, jump_weights,
                  halfwidth, alpha, scale, c, theta, b_decay, n_modes
    [drift]       poly_coeffs (ascending), grid_oversampling, m

``x0`` lists leading eigencoordinates; missing entries are zero. ``sweep`` is a
list of ``n:m`` pairs. ``m = inf`` selects the unregularised drift.
"""
import configparser
from dataclasses import dataclass, field
import math

import numpy as np

from .cylnoise import CylNoiseSpec, admissible
from .drift import DriftSpec
from .engine import SolverConfig
from .errors import ConfigError, HypothesisViolation, UndecidableError
from .levy1d import (CompoundPoisson, DiscreteJumps, SlowLogTail, SymmetricAlphaStable,
                     UniformJumps)
from .spectral import eigen_sum_finite, make_dirichlet_laplacian, make_power_law, \
    make_shifted_neumann

KINDS = ("ou-invariant", "admissibility", "yosida-check", "decompose", "stationarity",
         "mixing", "law-equality", "convergence-sweep")

_INT, _FLOAT, _STR, _FLOATS, _INTS, _PAIRS = "int", "float", "str", "floats", "ints", "pairs"

SCHEMA = {
    "experiment": {
        "kind": _STR, "seed": _INT, "M": _INT, "T": _FLOAT, "dt": _FLOAT, "xi": _FLOAT,
        "n": _INT, "x0": _FLOATS, "record_stride": _INT, "modes": _INTS,
        "h_grid": _FLOATS, "tolerance": _FLOAT, "lag": _FLOAT, "seeds": _INT,
        "min_passes": _INT, "fit_window": _FLOAT, "rate_factor": _FLOAT, "psi": _STR,
        "mixing_points": _FLOATS, "alphas": _FLOATS, "thetas": _FLOATS,
        "yosida_ms": _FLOATS, "yosida_samples": _INT, "yosida_range": _FLOAT,
        "sweep": _PAIRS,
    },
    "operator": {"kind": _STR, "N": _INT, "length": _FLOAT, "shift": _FLOAT, "c": _FLOAT,
                 "gamma": _FLOAT},
    "noise": {"family": _STR, "rate": _FLOAT, "jump_law": _STR, "jump_values": _FLOATS,
              "jump_weights": _FLOATS, "halfwidth": _FLOAT, "alpha": _FLOAT, "scale": _FLOAT,
              "c": _FLOAT, "theta": _FLOAT, "b_decay": _FLOAT, "n_modes": _INT},
    "drift": {"poly_coeffs": _FLOATS, "grid_oversampling": _INT, "m": _FLOAT},
}

EXPERIMENT_DEFAULTS = {
    "seed": 0, "M": 1000, "T": 1.0, "dt": 1e-3, "xi": 2.0, "record_stride": 10,
    "modes": [1, 2, 3], "h_grid": [-3.0, -2.0, -1.0, 1.0, 2.0, 3.0], "tolerance": 0.05,
    "lag": 0.5, "seeds": 1, "min_passes": 1, "fit_window": 0.5, "rate_factor": 0.9,
    "psi": "tanh_mode1", "mixing_points": [0.0, 1.0, 2.0, 4.0],
    "alphas": [0.5, 1.0, 1.5, 1.9], "thetas": [0.4, 0.6, 0.8, 1.2, 2.1],
    "yosida_ms": [1.0, 10.0, 100.0, 1e4], "yosida_samples": 10000, "yosida_range": 5.0,
    "sweep": [(4, 10.0), (8, 100.0), (16, 1000.0)],
}

# kinds that do not simulate the full model and so skip the model hypotheses
_SYMBOLIC_KINDS = ("admissibility", "yosida-check")


def _parse_value(kind, raw, where):
    raw = raw.strip()
    try:
        if kind == _INT:
            return int(raw)
        if kind == _FLOAT:
            return float(raw)
        if kind == _STR:
            return raw
        items = [s.strip() for s in raw.split(",") if s.strip()]
        if kind == _FLOATS:
            return [float(s) for s in items]
        if kind == _INTS:
            return [int(s) for s in items]
        if kind == _PAIRS:
            return [(int(a), float(b)) for a, b in (s.split(":") for s in items)]
    except ValueError as exc:
        raise ConfigError(f"{where}: cannot parse {raw!r} as {kind}") from exc
    raise AssertionError(kind)


def parse_text(text):
    """Parse config text into ``{section: {key: value}}`` with schema types."""
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(text)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc
    out = {}
    for section in cp.sections():
        if section not in SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        keys = SCHEMA[section]
        out[section] = {}
        for key, raw in cp.items(section):
            if key not in keys:
                raise ConfigError(f"unknown key {key!r} in [{section}]")
            out[section][key] = _parse_value(keys[key], raw, f"[{section}] {key}")
    for section in ("experiment", "operator", "noise"):
        if section not in out:
            raise ConfigError(f"missing section [{section}]")
    return out


def build_operator(block):
    kind = block.get("kind", "dirichlet")
    N = block.get("N", 8)
    length = block.get("length", 1.0)
    if kind == "dirichlet":
        return make_dirichlet_laplacian(N, length)
    if kind == "neumann-shifted":
        return make_shifted_neumann(N, length, block.get("shift", 1.0))
    if kind == "power":
        return make_power_law(N, block.get("c", 1.0), block.get("gamma", 1.0), length)
    raise ConfigError(f"unknown operator kind {kind!r}")


def family_from_config(block):
    fam = block.get("family", "compound-poisson")
    if fam == "compound-poisson":
        law = block.get("jump_law", "pm1")
        if law == "pm1":
            jumps = DiscreteJumps()
        elif law == "discrete":
            jumps = DiscreteJumps(tuple(block["jump_values"]), tuple(block["jump_weights"]))
        elif law == "uniform":
            jumps = UniformJumps(block.get("halfwidth", 1.0))
        else:
            raise ConfigError(f"unknown jump_law {law!r}")
        return CompoundPoisson(block.get("rate", 1.0), jumps)
    if fam == "alpha-stable":
        return SymmetricAlphaStable(block.get("alpha", 1.5), block.get("scale", 1.0))
    if fam == "slow-log-tail":
        return SlowLogTail(block.get("c", 1.0))
    raise ConfigError(f"unknown noise family {fam!r}")


def family_to_config(family):
    if isinstance(family, CompoundPoisson):
        block = {"family": "compound-poisson", "rate": family.rate}
        j = family.jumps
        if isinstance(j, UniformJumps):
            block.update(jump_law="uniform", halfwidth=j.halfwidth)
        elif tuple(j.values) == (-1.0, 1.0) and tuple(j.weights) == (0.5, 0.5):
            block["jump_law"] = "pm1"
        else:
            block.update(jump_law="discrete", jump_values=list(j.values),
                         jump_weights=list(j.weights))
        return block
    if isinstance(family, SymmetricAlphaStable):
        return {"family": "alpha-stable", "alpha": family.alpha, "scale": family.scale}
    if isinstance(family, SlowLogTail):
        return {"family": "slow-log-tail", "c": family.c}
    raise TypeError(type(family).__name__)


def dump_blocks(blocks):
    """Inverse of :func:`parse_text` for values produced by it."""
    lines = []
    for section, block in blocks.items():
        lines.append(f"[{section}]")
        for key, value in block.items():
            if isinstance(value, (list, tuple)) and value and isinstance(value[0], tuple):
                text = ", ".join(f"{a}:{b!r}" for a, b in value)
            elif isinstance(value, (list, tuple)):
                text = ", ".join(repr(float(e)) if isinstance(e, float) else str(e) for e in value)
            else:
                text = repr(value) if isinstance(value, float) else str(value)
            lines.append(f"{key} = {text}")
        lines.append("")
    return "\n".join(lines)


@dataclass
class ExperimentConfig:
    kind: str
    params: dict
    op: object
    noise: CylNoiseSpec
    drift: DriftSpec
    m: float = math.inf
    blocks: dict = field(default_factory=dict)

    @property
    def seed(self):
        return self.params["seed"]

    def x0(self):
        N = self.op.dim
        x = np.zeros(N)
        given = np.asarray(self.params.get("x0", []), dtype=float)[:N]
        x[:given.size] = given
        return x

    def solver(self, **changes):
        p = self.params
        kw = dict(op=self.op, noise=self.noise, drift=self.drift, dt=p["dt"], T=p["T"],
                  xi=p["xi"], m=self.m, n=p.get("n"), x0=self.x0())
        kw.update(changes)
        return SolverConfig(**kw)


def from_blocks(blocks):
    exp = dict(EXPERIMENT_DEFAULTS)
    exp.update(blocks["experiment"])
    kind = exp.get("kind")
    if kind not in KINDS:
        raise ConfigError(f"[experiment] kind must be one of {', '.join(KINDS)}; got {kind!r}")
    try:
        op = build_operator(blocks["operator"])
        nb = blocks["noise"]
        noise = CylNoiseSpec(family_from_config(nb), nb.get("n_modes", op.dim),
                             nb.get("theta", 1.0), nb.get("b_decay", 0.0))
        db = blocks.get("drift", {})
        drift = DriftSpec(np.asarray(db.get("poly_coeffs", [0.0]), dtype=float),
                          db.get("grid_oversampling", 4))
    except (ValueError, KeyError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(str(exc)) from exc
    return ExperimentConfig(kind, exp, op, noise, drift, db.get("m", math.inf), blocks)


def load(path):
    with open(path) as fh:
        return from_blocks(parse_text(fh.read()))


def hypothesis_violations(cfg):
    """All structural hypotheses the configuration violates, as ``HypothesisViolation``s."""
    out = []
    if not cfg.op.omega > cfg.drift.eta:
        out.append(HypothesisViolation(
            "omega_gt_eta",
            f"A + F must be maximal dissipative: need omega > eta, got omega={cfg.op.omega:g} "
            f"<= eta={cfg.drift.eta:g}"))
    if not math.isinf(cfg.m) and not cfg.m > cfg.drift.eta:
        out.append(HypothesisViolation(
            "yosida_m_gt_eta", f"Yosida parameter m={cfg.m:g} must exceed eta={cfg.drift.eta:g}"))
    if cfg.kind in _SYMBOLIC_KINDS:
        return out
    if cfg.noise.n_modes < cfg.op.dim:
        out.append(HypothesisViolation("noise_modes", "noise needs at least N modes"))
    if not cfg.noise.family.log_moment_finite():
        out.append(HypothesisViolation(
            "log_moment",
            "Levy measure log-moment int_1^inf log(y) nu(dy) diverges; no invariant measure"))
    if not eigen_sum_finite(cfg.op):
        out.append(HypothesisViolation(
            "inverse_eigen_sum",
            f"sum_k 1/lambda_k diverges (lambda_k ~ k^{cfg.op.growth_law.gamma:g}); "
            "no invariant measure"))
    try:
        ok = admissible(cfg.noise)
    except UndecidableError as exc:
        out.append(HypothesisViolation("noise_admissibility", str(exc)))
    else:
        if not ok:
            out.append(HypothesisViolation(
                "noise_admissibility",
                "cylindrical noise is not H-valued: sum_k [beta_k^2 int_{|y|<1/beta_k} y^2 nu(dy) "
                "+ nu(|y| >= 1/beta_k)] diverges"))
    return out
