"""
Stacking the two codes
======================

The combined code runs the basic decoder (Step A) and then corrects its
few remaining errors with the sparse code (Step B).
"""

import numpy as np

from qgt import CodeParams, build_combined, encode, noise_budget
from qgt.combined import decode_combined_detailed
from qgt.expander import search_expander

graph = search_expander(16, 64, 4, 8, 3.5, seed=1)
code = build_combined(CodeParams.direct(16, 1, 1.0, k=4), graph=graph, inner="identity", inner_width=1)
print(code.describe())

rng = np.random.default_rng(3)
e = noise_budget(code)
for trial in range(5):
    x = rng.integers(0, 2, 16)
    y = encode(code, x) + rng.uniform(-e, e, code.height)
    info = decode_combined_detailed(code, y)
    step_a = np.count_nonzero(info.x_step_a != x)
    final = np.count_nonzero(info.x != x)
    print(f"trial {trial}: Step A error {step_a}, corrections {info.step_b_corrections}, final error {final}")
