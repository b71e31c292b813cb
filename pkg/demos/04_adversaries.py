"""
Adversarial noise
=================

Each strategy respects the same l-infinity bound but aims at a different
weakness of the decoders. Compare their damage on one basic code.
"""

import numpy as np

from qgt import CodeParams, build_basic, decode, encode, noise_budget
from qgt.adversary import STRATEGIES, NoiseSpec, gen_noise

code = build_basic(CodeParams.from_exponents(256, 0.75, 0.125))
e = noise_budget(code)
rng = np.random.default_rng(4)
x = rng.integers(0, 2, 256)
y = encode(code, x)

for strategy in STRATEGIES:
    noise = gen_noise(NoiseSpec(e, strategy, seed=9), code, x)
    err = np.count_nonzero(decode(code, y + noise) != x)
    print(f"{strategy:>17}: max |noise| {np.abs(noise).max():.3f}, Hamming error {err}")

###############################################################################
# Past the budget the guarantee lapses; the segment attack finds it first
for scale in (1, 2, 4, 8):
    noise = gen_noise(NoiseSpec(scale * e, "segment-attack"), code, x)
    print(f"{scale}x budget: error {np.count_nonzero(decode(code, y + noise) != x)}")
