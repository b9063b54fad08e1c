"""Compare numba and pure-numpy kernels.

Usage: ``python3 benchmarks/bench_kernels.py [--paths P] [--steps K] [--repeat R]``
"""
import argparse
import time

import numpy as np

from levy_spde import kernels
from levy_spde.drift import cubic_drift, make_collocation
from levy_spde.spectral import make_dirichlet_laplacian


def best_of(fn, repeat):
    fn()  # warm-up, includes jit compilation
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--paths", type=int, default=256)
    ap.add_argument("--steps", type=int, default=64)
    ap.add_argument("--modes", type=int, default=8)
    ap.add_argument("--m", type=float, default=100.0)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    op = make_dirichlet_laplacian(args.modes)
    drift = cubic_drift()
    cmap = make_collocation(op)
    c = np.asarray(drift.coeffs, dtype=float)
    kappa = drift.kappa(args.m)
    gen = np.random.default_rng(0)
    x = gen.normal(size=(args.paths, args.modes))
    conv = 0.01 * gen.normal(size=(args.paths, args.steps, args.modes))
    u = gen.uniform(-5, 5, size=100_000)
    decay = op.decay(1e-3)
    n = args.modes

    cases = {
        "yosida_values": (
            lambda: kernels.yosida_values_numpy(u, c, args.m, kappa),
            lambda: kernels.yosida_values_numba(u, c, args.m, kappa)),
        "drift_eval": (
            lambda: kernels.drift_eval_numpy(x, n, cmap.forward, cmap.inverse, c, args.m, kappa),
            lambda: kernels.drift_eval_numba(x, n, cmap.forward, cmap.inverse, c, args.m, kappa)),
        "exp_euler_chunk": (
            lambda: kernels.exp_euler_chunk(x, conv, decay, 1e-3, n, cmap.forward, cmap.inverse,
                                            c, args.m, kappa, False, backend="numpy"),
            lambda: kernels.exp_euler_chunk(x, conv, decay, 1e-3, n, cmap.forward, cmap.inverse,
                                            c, args.m, kappa, False, backend="numba")),
    }
    print(f"{'kernel':<18}{'numpy [ms]':>12}{'numba [ms]':>12}{'speedup':>10}{'max diff':>12}")
    for name, (f_np, f_nb) in cases.items():
        diff = float(np.max(np.abs(f_np() - f_nb())))
        t_np, t_nb = best_of(f_np, args.repeat), best_of(f_nb, args.repeat)
        print(f"{name:<18}{1e3 * t_np:>12.3f}{1e3 * t_nb:>12.3f}{t_np / t_nb:>10.1f}{diff:>12.2e}")


if __name__ == "__main__":
    main()
