"""
How many pools are needed?
==========================

Evaluate the converse and achievability bounds alongside the heights of
the constructions, then probe random matrices at a tiny size.
"""

import numpy as np

from qgt.limits import bound_sheet, chosen_parameters, random_achievability_sweep

sheet = bound_sheet(2**20, kappa=0.6, delta=0.25, lam=0.7)
for key, value in sheet.to_dict().items():
    print(f"{key:>20}: {value}")

###############################################################################
# The explicit expander design is astronomically large at this size
print({k: f"{v:.3g}" for k, v in chosen_parameters(2**20, 0.6, 0.25, 0.7).items()})

###############################################################################
# Random 0/1 matrices: how often is a given height enough?
heights = np.arange(2, 13)
frac = random_achievability_sweep(8, 2, 0.5, heights, trials=200, seed=0)
for h, f in zip(heights, frac):
    print(f"height {h:2d}: {f:.2f}")
