#!/usr/bin/env python3
"""Benchmark the numba-jitted grid kernels against the vectorized numpy path.

Both implementations live side by side in giantatoms.kernels, so the
comparison runs in one process.  The first jitted call per kernel pays JIT
compilation (cached on disk afterwards); timings below exclude it.

Usage: python benchmarks/bench_kernels.py [--repeat N]
"""

import argparse
import time

import numpy as np

from giantatoms import _formulas as fm
from giantatoms import kernels as K
from giantatoms._backend import HAVE_NUMBA


def timeit(fn, *args, repeat=5):
    best = np.inf
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn(*args)
        best = min(best, time.perf_counter() - t0)
    return best


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    if not HAVE_NUMBA:
        raise SystemExit("numba unavailable; nothing to compare")

    om0, g = 100.0, 1.0
    p1, p2 = 0.5 * np.pi, 0.25 * np.pi
    z = fm.z_chain(0, om0, g, p1, p2, om0, om0)
    z1, z2, z3, z4, eta, gt = (complex(v) for v in z[:6])

    omega = np.linspace(94.0, 106.0, 20001)
    xg = np.linspace(0.0, 60.0, 20001)
    pg = (np.arange(128) + 0.5) * 2 * np.pi / 128
    kg = np.linspace(94.0, 106.0, 20001)

    cases = [
        ("spectrum_pair (20001 pts)", K.spectrum_pair_numpy,
         K.spectrum_pair_numba, (omega, 2 * om0, eta, gt, z1, z2, z3, z4)),
        ("g2_curve (20001 pts)", K.g2_curve_numpy, K.g2_curve_numba,
         (xg, eta, gt, z1, z2, complex(z[6] * z[7]))),
        ("bound_state_curve (20001 pts)", K.bound_state_curve_numpy,
         K.bound_state_curve_numba, (xg, eta, gt, z1, z2)),
        ("chi_phase_map (128x128)", K.chi_phase_map_numpy,
         K.chi_phase_map_numba, (0, om0, g, pg, pg, om0)),
        ("flux_curve (20001 pts)", K.flux_curve_numpy, K.flux_curve_numba,
         (0, om0, g, p1, p2, kg)),
        ("flux_phase_map (128x128)", K.flux_phase_map_numpy,
         K.flux_phase_map_numba, (0, om0, g, pg, pg, om0)),
    ]

    print(f"{'kernel':32s} {'numpy [ms]':>12s} {'numba [ms]':>12s} {'speedup':>9s}")
    for name, f_np, f_nb, call_args in cases:
        f_nb(*call_args)  # trigger/confirm compilation outside the timing
        t_np = timeit(f_np, *call_args, repeat=args.repeat)
        t_nb = timeit(f_nb, *call_args, repeat=args.repeat)
        print(f"{name:32s} {1e3 * t_np:12.3f} {1e3 * t_nb:12.3f} "
              f"{t_np / t_nb:8.2f}x")


if __name__ == "__main__":
    main()
