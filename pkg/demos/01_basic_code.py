"""
The basic Hadamard-Kronecker code
=================================

Build a code for 256 items, measure a random 0/1 vector, add the largest
noise the code certifies, and decode. The Hamming error stays within
``d0``.
"""

import numpy as np

from qgt import CodeParams, build_basic, decode, encode, error_bound, noise_budget
from qgt.basic import decode_basic_detailed

# exponents: allowed errors n^kappa, tolerated noise about n^delta
params = CodeParams.from_exponents(256, kappa=0.75, delta=0.125)
code = build_basic(params)
print(code.describe())

rng = np.random.default_rng(0)
x = rng.integers(0, 2, params.n)
y = encode(code, x)
print(f"{params.n} items measured with {len(y)} pooled sums")

###############################################################################
# Uniform noise at the certified budget
e = noise_budget(code)
noisy = y + rng.uniform(-e, e, len(y))
x_hat = decode(code, noisy)
print(f"budget e = {e:.3f}, Hamming error {np.count_nonzero(x_hat != x)} (bound {error_bound(code)})")

###############################################################################
# The Hadamard layer is undone first, leaving one short segment per block.
# Rounding cleans each segment; a segment outside the inner code's image is
# flagged infeasible and is where the errors concentrate.
info = decode_basic_detailed(code, noisy)
worst = np.abs(info.segments - info.rounded).max()
print(f"{len(info.segments)} segments, worst rounding residual {worst:.3f}, infeasible {int(info.infeasible.sum())}")
