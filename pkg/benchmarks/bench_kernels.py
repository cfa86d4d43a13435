"""Compare the numba and numpy kernel backends on representative workloads.

Run with ``python benchmarks/bench_kernels.py [--repeat N]``. Both backends
are called explicitly, so the FRACCASIMIR_DISABLE_NUMBA flag is not needed.
"""
import argparse
import time

import numpy as np

from fraccasimir import kernels
from fraccasimir.epstein import _orthant_shells

RTOL = 1e-12
LEVELS = 20


def _best_of(fn, repeat):
    best = float("inf")
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def workloads():
    rng = np.random.default_rng(12345)
    z = np.exp(rng.uniform(np.log(1e-3), np.log(200.0), 20000))
    yield "log K_nu(z), nu=2.3, 20k points", lambda b: kernels.log_bessel_k_array(
        2.3, z, RTOL, LEVELS, backend=b)

    # Epstein-style block: shells of a 2D lattice, n-sum per shell
    root_q, mult = _orthant_shells((1.0, 1.3), 12.0)
    bb = 2.0 * np.pi * root_q
    cc = np.pi / root_q
    n_max = kernels.n_cutoffs(0.7, bb, RTOL)
    yield f"lattice n-sum, {root_q.size} shells", lambda b: kernels.bessel_nsum(
        0.7, bb, cc, mult, 0.0, n_max, RTOL, LEVELS, backend=b)

    # piston-style block: many frequencies, oscillating phase
    om = np.sqrt(np.arange(1, 3001, dtype=np.float64))
    bp = 2.0 * 0.5 * om
    cp = 0.5 / om
    n_p = kernels.n_cutoffs(1.2, bp, RTOL)
    yield "piston n-sum, 3000 frequencies", lambda b: kernels.bessel_nsum(
        1.2, bp, cp, np.ones(om.size), np.pi * 0.47, n_p, RTOL, LEVELS, backend=b)


def main():
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()
    print(f"{'workload':40s} {'numba [s]':>10s} {'numpy [s]':>10s} {'speedup':>8s} {'max rel diff':>13s}")
    for name, fn in workloads():
        fn("numba")  # compile outside the timed region
        t_nb, r_nb = _best_of(lambda: fn("numba"), args.repeat)
        t_np, r_np = _best_of(lambda: fn("numpy"), args.repeat)
        a = np.atleast_1d(np.asarray(r_nb[0] if isinstance(r_nb, tuple) else r_nb))
        b = np.atleast_1d(np.asarray(r_np[0] if isinstance(r_np, tuple) else r_np))
        diff = float(np.max(np.abs(a - b) / np.maximum(np.abs(b), 1e-300)))
        print(f"{name:40s} {t_nb:10.4f} {t_np:10.4f} {t_np / t_nb:8.1f} {diff:13.2e}")


if __name__ == "__main__":
    main()
