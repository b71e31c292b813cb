"""
Expanders and the sparse code
=============================

A sparse code needs an unbalanced bipartite expander. Search for one,
verify its expansion by brute force, then use it to recover k-sparse
vectors with sparse matching pursuit.
"""

import numpy as np

from qgt import CodeParams, build_scqgt, decode, encode
from qgt.expander import achieved_profile, decompose, induced_matrix, search_expander, verify_expansion

# 16 left vertices, 64 right, degree 4; every set of <= 8 has >= 3.5|S| neighbours
graph = search_expander(16, 64, 4, 8, 3.5, seed=1)
ok, witness = verify_expansion(graph)
print("verified:", ok, "| worst |N(S)|/|S| per size:", np.round(achieved_profile(graph, 8), 2))

###############################################################################
# The induced matrix splits into one block per edge slot
b = induced_matrix(graph)
blocks = decompose(b, graph.degree)
print("blocks:", len(blocks), "each with column sums", set(blocks[0].to_dense().sum(axis=0)))

###############################################################################
# Noiseless and noisy recovery of a 4-sparse vector
code = build_scqgt(CodeParams.direct(16, 1, 1.0, k=4), graph=graph)
rng = np.random.default_rng(2)
x = np.zeros(16, dtype=np.int64)
x[rng.choice(16, 4, replace=False)] = 1
y = encode(code, x)
print("noiseless exact:", np.array_equal(decode(code, y), x))
e = code.detect_scale * code.params.e
x_hat = decode(code, y + rng.uniform(-e, e, len(y)))
print(f"noise {e:.3f}: Hamming error {np.count_nonzero(x_hat != x)} (bound {4 * code.params.d0})")
