"""
A small phase-transition sweep
==============================

Success frequency of exact certification over a coarse (delta, n) grid,
printed as text. The full grid is ``sdpkmeans sweep --out sweep.csv``.
"""

import numpy as np

from sdpkmeans.bench import SweepSpec, frequency_grid, run_sweep

spec = SweepSpec(delta_min=1.5, delta_max=3.5, delta_steps=9, n_min=10, n_max=80, n_steps=4, trials=10)
cells = run_sweep(spec)

for mode in spec.modes:
    grid = frequency_grid(spec, cells, mode)
    print(mode)
    print("   n  " + " ".join("%4.2f" % d for d in spec.deltas()))
    for n, row in zip(spec.ns()[::-1], grid[::-1]):
        print("%4d  " % n + " ".join("%4.1f" % f for f in row))
    print()

# Modes are nested: every corollary success is an operator success, and so on
exact = frequency_grid(spec, cells, "exact-psd")
corollary = frequency_grid(spec, cells, "corollary-bound")
print("corollary <= exact everywhere:", bool(np.all(corollary <= exact)))
