"""
Exhaustive detecting checks
===========================

A matrix is ``(d0, e)``-detecting when any two 0/1 vectors that differ in
at least ``d0`` places have measurements at least ``2e`` apart in the max
norm. For small widths this is checked by enumeration.
"""

import numpy as np

from qgt import CodeParams, build_basic
from qgt.linalg import sylvester_hadamard
from qgt.oracle import is_detecting, min_margin, min_margin_pairs

h4 = sylvester_hadamard(2).entries
for lo in (1, 2):
    report = min_margin(h4, lo, 4)
    print(f"H4, difference weight {lo}..4: min margin {report.min_linf}, witness {report.witness}")

###############################################################################
# A built code: the ternary search and the pairwise search agree
code = build_basic(CodeParams.direct(12, 6, 1.0))
q = code.matrix()
print("height", q.shape[0], "| ternary", min_margin(q, 6).min_linf, "| pairwise", min_margin_pairs(q, 6))
print("advertised e", round(code.detect_e, 3), "passes:", is_detecting(q, 6, code.detect_e))
