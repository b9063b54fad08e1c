"""Experiment kinds dispatched by ``levy-spde run``.

Each runner returns a list of :class:`Check` rows and writes its CSV artifacts
into the output directory. ``summary.csv`` always lists every check as
``check_id, statistic, threshold, pass``.
"""
import csv
from dataclasses import dataclass
import math
import os

import numpy as np

from . import config as cfgmod
from .cylnoise import CylNoiseSpec, DoubleSidedPath, admissible
from .diagnostics import (bound_function_regression, check_mixing_hypotheses, decay_rate_fit,
                          invariant_law_equality, ks_threshold, ks_two_sample,
                          mixing_estimate)
from .drift import yosida_scalar
from .engine import ensemble_decompose, ensemble_solve, ensemble_stationary, moment_summary, \
    solve_path
from .errors import ConfigError, HypothesisViolation
from .levy1d import SymmetricAlphaStable
from .ou_invariant import cf_table, invariant_measure
from .rng import RngStream

CSV_VERSION = "1"


@dataclass
class Check:
    check_id: str
    statistic: float
    threshold: float
    passed: bool


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(path, header, rows):
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_fmt(v) for v in row])


def write_path_csv(path, sample, traj=0):
    N = sample.states.shape[-1]
    header = ["time"] + [f"mode_{k}" for k in range(1, N + 1)]
    rows = [[t, *sample.states[i, traj]] for i, t in enumerate(sample.times)]
    write_csv(path, header, rows)


def run_ou_invariant(cfg, out, threads):
    if not cfg.drift.linear:
        raise ConfigError("ou-invariant requires the zero drift (poly_coeffs = 0)")
    p = cfg.params
    solver = cfg.solver()
    stride = int(round(p["T"] / p["dt"]))
    X = ensemble_solve(solver, p["M"], p["seed"], stride, threads=threads)
    spec = invariant_measure(cfg.op, cfg.noise)
    rows = cf_table(spec, X.states[-1], p["h_grid"])
    write_csv(os.path.join(out, "cf_table.csv"),
              ["mode", "h", "cf_quadrature", "cf_empirical", "abs_error"], rows)
    checks = []
    for k in range(spec.n_modes):
        err = max(r[4] for r in rows if r[0] == k + 1)
        checks.append(Check(f"cf_mode_{k + 1}", err, p["tolerance"], err <= p["tolerance"]))
    return checks


def run_admissibility(cfg, out, threads):
    p = cfg.params
    rows, checks = [], []
    for a in p["alphas"]:
        for th in p["thetas"]:
            spec = CylNoiseSpec(SymmetricAlphaStable(a), cfg.op.dim, theta=th)
            got, want = admissible(spec), a * th > 1
            rows.append((a, th, got, want, got == want))
            checks.append(Check(f"stable_alpha{a:g}_theta{th:g}", float(got), float(want),
                                got == want))
    write_csv(os.path.join(out, "admissibility.csv"),
              ["alpha", "theta", "checker", "analytic", "match"], rows)
    return checks


def run_yosida_check(cfg, out, threads):
    p = cfg.params
    gen = RngStream(p["seed"], 0).generator()
    R = p["yosida_range"]
    x = gen.uniform(-R, R, size=p["yosida_samples"])
    y = gen.uniform(-R, R, size=p["yosida_samples"])
    g = cfg.drift.g(x)
    eta = cfg.drift.eta
    rows, checks, prev = [], [], math.inf
    for m in p["yosida_ms"]:
        fm = yosida_scalar(cfg.drift, m, x)
        fy = yosida_scalar(cfg.drift, m, y)
        viol = int(np.sum(np.abs(fm) > np.abs(g) * (1 + 1e-12) + 1e-300))
        err = float(np.max(np.abs(fm - g)))
        d = x - y
        nz = d != 0
        one_sided = float(np.max((fm - fy)[nz] * d[nz] / d[nz] ** 2))
        # sharp one-sided constant of F_m; equals eta when eta = 0
        bound = eta * m / (m - eta) + 1e-9
        rows.append((m, viol, err, one_sided))
        checks.append(Check(f"bound_m{m:g}", float(viol), 0.0, viol == 0))
        checks.append(Check(f"one_sided_m{m:g}", one_sided, bound, one_sided <= bound))
        checks.append(Check(f"error_decreasing_m{m:g}", err, prev, err < prev))
        prev = err
    write_csv(os.path.join(out, "yosida.csv"),
              ["m", "bound_violations", "max_abs_error", "max_one_sided_quotient"], rows)
    return checks


def run_decompose(cfg, out, threads):
    p = cfg.params
    solver = cfg.solver()
    parts = ensemble_decompose(solver, p["M"], p["seed"], p["record_stride"], threads=threads)
    for tag, sample in parts.items():
        write_path_csv(os.path.join(out, f"path_{tag}.csv"), sample)
    summ = moment_summary(parts["v"])
    write_csv(os.path.join(out, "ensemble_v.csv"),
              ["time", "E|v|^2", "E|v|^4", "stderr_E|v|^2", "stderr_E|v|^4"], summ)
    exact = bool(np.array_equal(parts["X"].states - parts["r"].states, parts["v"].states))
    window = summ[:, 0] <= p["fit_window"] + 1e-12
    fit = decay_rate_fit(summ[window, 0], summ[window, 1])
    bound = -p["rate_factor"] * 2.0 * solver.gap
    return [Check("coupling_exact", float(exact), 1.0, exact),
            Check("decay_slope_E|v|^2", fit.slope, bound, fit.slope <= bound)]


def run_stationarity(cfg, out, threads):
    p = cfg.params
    solver = cfg.solver(T=p["lag"])
    stride = int(round(p["lag"] / p["dt"]))
    rows, passes = [], 0
    for s in range(p["seeds"]):
        r = ensemble_stationary(solver, p["M"], p["seed"] + s, stride, threads=threads)
        a, b = r.states[0], r.states[-1]
        for k in p["modes"]:
            stat, ok = ks_two_sample(a[:, k - 1], b[:, k - 1])
            rows.append((p["seed"] + s, k, stat, ks_threshold(p["M"], p["M"]), ok))
        passes += all(row[-1] for row in rows[-len(p["modes"]):])
    write_csv(os.path.join(out, "stationarity.csv"),
              ["seed", "mode", "ks_statistic", "threshold", "pass"], rows)
    return [Check("stationary_passes", float(passes), float(p["min_passes"]),
                  passes >= p["min_passes"])]


def run_mixing(cfg, out, threads):
    p = cfg.params
    solver = cfg.solver()
    hyp = check_mixing_hypotheses(solver, min(p["M"], 1000), p["seed"])
    rep = mixing_estimate(solver, p["psi"], solver.x0, None, p["M"], p["seed"],
                          p["record_stride"], threads)
    write_csv(os.path.join(out, "mixing.csv"), ["time", "gap", "stderr", "fitted"],
              zip(rep.times, rep.gap, rep.stderr, rep.fitted))
    e1 = np.zeros(solver.N)
    e1[0] = 1.0
    reg = bound_function_regression(solver, p["psi"], [a * e1 for a in p["mixing_points"]],
                                    p["M"], p["seed"], p["record_stride"])
    write_csv(os.path.join(out, "mixing_bound.csv"), ["norm_x", "c_x", "stderr", "C_bound"],
              [(n, c, s, reg.C * (n + 1)) for n, c, s in zip(reg.norms, reg.c_values, reg.c_stderr)])
    target = p["rate_factor"] * solver.gap
    return [Check("moment_hypothesis", hyp, math.inf, bool(np.isfinite(hyp))),
            Check("mixing_rate", rep.rate, target, bool(rep.rate >= target)),
            Check("bound_function_linear_growth", reg.C, 0.0, reg.consistent)]


def run_law_equality(cfg, out, threads):
    p = cfg.params
    rep = invariant_law_equality(cfg.solver(), p["M"], p["seed"],
                                 tuple(k - 1 for k in p["modes"]), threads=threads)
    write_csv(os.path.join(out, "law_equality.csv"),
              ["mode", "pair", "ks_statistic", "threshold", "pass"], rep.rows)
    return [Check(f"ks_mode{r[0]}_{r[1]}", r[2], r[3], r[4]) for r in rep.rows]


def sweep_errors(solver, pairs, M, seed):
    """``|X^{(n)}_m(T) - X^{(2n)}_{2m}(T)|`` (RMS over ``M`` paths) with shared noise."""
    path = DoubleSidedPath(solver.noise, 0.0, solver.T, solver.dt, RngStream(seed), M)
    stride = path.n_future
    errs = []
    for n, m in pairs:
        a = solve_path(solver.replace(n=n, m=m), path, stride).states[-1]
        b = solve_path(solver.replace(n=2 * n, m=2 * m), path, stride).states[-1]
        errs.append(float(np.sqrt(np.mean(np.sum((a - b) ** 2, axis=-1)))))
    return errs


def run_convergence_sweep(cfg, out, threads):
    p = cfg.params
    solver = cfg.solver()
    if 2 * max(n for n, _ in p["sweep"]) > solver.N:
        raise ConfigError("operator N must be at least twice the largest n in the sweep")
    errs = sweep_errors(solver, p["sweep"], p["M"], p["seed"])
    write_csv(os.path.join(out, "convergence.csv"), ["n", "m", "error_vs_2n_2m"],
              [(n, m, e) for (n, m), e in zip(p["sweep"], errs)])
    return [Check(f"decrease_{i}", errs[i], errs[i - 1], errs[i] < errs[i - 1])
            for i in range(1, len(errs))]


RUNNERS = {
    "ou-invariant": run_ou_invariant,
    "admissibility": run_admissibility,
    "yosida-check": run_yosida_check,
    "decompose": run_decompose,
    "stationarity": run_stationarity,
    "mixing": run_mixing,
    "law-equality": run_law_equality,
    "convergence-sweep": run_convergence_sweep,
}


def execute(cfg, out, threads=1):
    os.makedirs(out, exist_ok=True)
    checks = RUNNERS[cfg.kind](cfg, out, threads)
    write_csv(os.path.join(out, "summary.csv"), ["check_id", "statistic", "threshold", "pass"],
              [(c.check_id, c.statistic, c.threshold, c.passed) for c in checks])
    return checks


def validate(config_path):
    """Parse a config and check its hypotheses. Returns ``(exit_code, messages)``."""
    try:
        cfg = cfgmod.load(config_path)
    except (ConfigError, OSError) as exc:
        return 2, [f"config error: {exc}"]
    violations = cfgmod.hypothesis_violations(cfg)
    if violations:
        return 2, [f"hypothesis violated: {v}" for v in violations]
    return 0, [f"ok: {cfg.kind}"]


def run_experiment(config_path, seed=None, out=None, threads=1):
    """Validate and run a config file. Returns ``(exit_code, checks, messages)``.

    Exit codes: 0 all checks pass, 1 a check failed, 2 configuration error.
    """
    try:
        cfg = cfgmod.load(config_path)
    except (ConfigError, OSError) as exc:
        return 2, [], [f"config error: {exc}"]
    if seed is not None:
        cfg.params["seed"] = int(seed)
    violations = cfgmod.hypothesis_violations(cfg)
    if violations:
        return 2, [], [f"hypothesis violated: {v}" for v in violations]
    out = out or os.path.join(os.getcwd(), f"out-{cfg.kind}")
    try:
        checks = execute(cfg, out, threads)
    except HypothesisViolation as exc:
        return 2, [], [f"hypothesis violated: {exc}"]
    except ConfigError as exc:
        return 2, [], [f"config error: {exc}"]
    msgs = [f"{c.check_id}: statistic={c.statistic!r} threshold={c.threshold!r} "
            f"{'PASS' if c.passed else 'FAIL'}" for c in checks]
    return (0 if all(c.passed for c in checks) else 1), checks, msgs
