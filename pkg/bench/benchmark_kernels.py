#!/usr/bin/env python3
"""Compare the compiled controlled-cycle kernel against the numpy fallback.

Times the dominant inner operation of the protocol engine (the
control-conditioned cyclic permutation) on protocol-shaped states, then a
full protocol run with each implementation.  Run after `pip install -e .`:

    python3 bench/benchmark_kernels.py
"""
from __future__ import annotations

import time

import numpy as np

from nonlocalsim import kernels, model, protocols


def time_call(fn, repeats=5):
    best = float("inf")
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t0)
    return best


def kernel_cases():
    rng = np.random.default_rng(0)
    for d, m, ref in ((1, 4, 2), (1, 8, 2), (2, 4, 2)):
        pair = (d + 1) ** 2
        dims = (ref,) + (d + 1, d + 1) * m + (m, 2)
        total = int(np.prod(dims))
        amps = rng.normal(size=total) + 1j * rng.normal(size=total)
        amps /= np.linalg.norm(amps)
        s_axis = len(dims) - 2
        cycle_axes = tuple(range(1, 1 + 2 * m, 2))  # one party's halves
        yield f"d={d} m={m} ({total:>9} amplitudes)", amps, dims, s_axis, cycle_axes


def main():
    print(f"selected implementation at import: {kernels.IMPLEMENTATION}")
    if kernels.IMPLEMENTATION != "compiled":
        print("note: compiled extension unavailable; comparing fallback against itself")
    print()
    print(f"{'case':<34} {'compiled':>12} {'python':>12} {'speedup':>9}")
    for name, amps, dims, s_axis, cycle_axes in kernel_cases():
        tc = time_call(lambda: kernels.controlled_cycle(amps, dims, s_axis, cycle_axes))
        tp = time_call(lambda: kernels.controlled_cycle(amps, dims, s_axis, cycle_axes, force_python=True))
        print(f"{name:<34} {tc * 1e3:>10.2f}ms {tp * 1e3:>10.2f}ms {tp / tc:>8.2f}x")

    # equivalence spot check
    rng = np.random.default_rng(1)
    dims = (3, 2, 4, 2, 5, 2)
    amps = rng.normal(size=int(np.prod(dims))) + 1j * rng.normal(size=int(np.prod(dims)))
    amps /= np.linalg.norm(amps)
    a = kernels.controlled_cycle(amps, dims, 0, (1, 3, 5))
    b = kernels.controlled_cycle(amps, dims, 0, (1, 3, 5), force_python=True)
    print(f"\nmax |compiled - python| on a mixed-radix case: {np.max(np.abs(a - b)):.2e}")

    # end-to-end protocol run
    print("\nfull protocol run (d=1, m=8, random input):")
    rng = np.random.default_rng(2)
    amps = rng.normal(size=4) + 1j * rng.normal(size=4)
    amps /= np.linalg.norm(amps)
    state = model.PureState(model.make_phi(1).layout, amps)

    t = time_call(lambda: protocols.run_w(state, 1, 8, mode="approx"), repeats=3)
    print(f"  with {kernels.IMPLEMENTATION} kernel: {t:.3f}s")
    print("  (set NONLOCALSIM_PURE_PYTHON=1 and rerun to time the fallback end to end)")


if __name__ == "__main__":
    main()
