"""Time the numba kernels against their pure-numpy fallbacks.

    python3 benchmarks/bench_kernels.py [--repeat 3]

Each kernel runs once per backend untimed (JIT warm-up), then ``--repeat``
times; the best wall time is reported with the max difference between
backends, which should sit at rounding level.
"""

import argparse
import time

import numpy as np

from mathieu_lattice._accel import HAVE_NUMBA
from mathieu_lattice.kernels import rk4_bragg, rk4_lattice, tridiagonal_eigh


def best_time(fn, repeat):
    fn()
    times = []
    out = None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        times.append(time.perf_counter() - t0)
    return min(times), out


def cases():
    J = 64
    sites = np.arange(-J, J + 1, dtype=float)
    # even parity block of the q=2 operator, the size the spectral solver sees
    d = (np.arange(J + 1, dtype=float)) ** 2
    e = np.full(J, 2.0)
    e[0] *= np.sqrt(2.0)
    c0 = np.zeros(2 * J + 1, complex)
    c0[J] = 1.0
    bond = -1.0 + 2.0 * np.arange(-J, J, dtype=float)
    return {
        f"QL eigensolve (n={J + 1})": lambda b: tridiagonal_eigh(d, e, backend=b)[0],
        f"RK4 lattice (J={J}, 50000 steps)": lambda b: rk4_lattice(c0, sites ** 2, 2.0, 1e-4, 50_000, backend=b),
        f"RK4 Bragg (J={J}, 30000 steps)": lambda b: rk4_bragg(c0, 2.0, bond, 0.0, 1e-4, 30_000, backend=b),
    }


def main():
    parser = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    parser.add_argument("--repeat", type=int, default=3)
    args = parser.parse_args()
    backends = ["numpy"] + (["numba"] if HAVE_NUMBA else [])
    if not HAVE_NUMBA:
        print("numba not installed; timing the numpy fallback only")
    print(f"{'kernel':36s} " + " ".join(f"{b:>10s}" for b in backends) + f" {'speedup':>8s} {'max diff':>9s}")
    for name, fn in cases().items():
        results = {b: best_time(lambda b=b: fn(b), args.repeat) for b in backends}
        cols = " ".join(f"{results[b][0]:9.4f}s" for b in backends)
        if HAVE_NUMBA:
            speedup = results["numpy"][0] / results["numba"][0]
            diff = float(np.max(np.abs(results["numpy"][1] - results["numba"][1])))
            print(f"{name:36s} {cols} {speedup:7.1f}x {diff:9.1e}")
        else:
            print(f"{name:36s} {cols}")


if __name__ == "__main__":
    main()
