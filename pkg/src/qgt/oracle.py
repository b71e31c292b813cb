"""Brute-force ground truth for the detecting property.

A matrix ``Q`` is ``(n, d0, e)``-detecting when every ternary ``d`` (every
``d = a - b`` for binary ``a != b``) with ``||d||_0 >= d0`` has
``||Q d||_inf >= 2 e``. The oracle enumerates ternary vectors by weight,
then lexicographic support, then sign pattern; only patterns whose first
nonzero is ``+1`` are visited since ``d`` and ``-d`` score the same.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from .linalg import BinaryMatrix, TernaryMatrix

MAX_FULL_COLS = 16
MAX_CAPPED_COLS = 24
MAX_VECTORS = 10**8
_CHUNK = 1 << 22


class InstanceTooLarge(ValueError):
    pass


@dataclass
class DetectReport:
    min_linf: float
    witness: np.ndarray | None
    pairs_checked: int
    weight_range: tuple[int, int]

    def to_dict(self) -> dict:
        return {
            "min_linf": self.min_linf,
            "witness": None if self.witness is None else [int(v) for v in self.witness],
            "pairs_checked": self.pairs_checked,
            "weight_range": list(self.weight_range),
        }


def as_dense(q) -> np.ndarray:
    if isinstance(q, (BinaryMatrix, TernaryMatrix)):
        return q.to_dense().astype(np.int64)
    if hasattr(q, "matrix"):
        return as_dense(q.matrix())
    return np.asarray(q, dtype=np.int64)


def _sign_patterns(w: int) -> np.ndarray:
    """All sign vectors of length ``w`` with first entry +1, '+' before '-'."""
    if w == 0:
        return np.ones((1, 0), dtype=np.int64)
    rest = np.array(list(itertools.product((1, -1), repeat=w - 1)), dtype=np.int64)
    rest = rest.reshape(2 ** (w - 1), w - 1)
    return np.hstack([np.ones((len(rest), 1), dtype=np.int64), rest])


def _check_size(n: int, lo: int, hi: int) -> None:
    total = sum(math.comb(n, w) * 2**w for w in range(lo, hi + 1))
    if n <= MAX_FULL_COLS and total <= MAX_VECTORS:
        return
    if n <= MAX_CAPPED_COLS and total <= MAX_VECTORS:
        return
    raise InstanceTooLarge(f"{n} columns with weights {lo}..{hi}: {total} vectors")


def min_margin(q, weight_lo: int, weight_hi: int | None = None, stop_below: float | None = None) -> DetectReport:
    """Exact ``min ||Q d||_inf`` over ternary ``d`` with weight in range.

    With ``stop_below`` set, returns as soon as a vector scoring below it
    is found (the report then holds that vector, not the global minimum).
    """
    a = as_dense(q)
    n = a.shape[1]
    hi = n if weight_hi is None else min(weight_hi, n)
    lo = max(1, weight_lo)
    _check_size(n, lo, hi)
    cols = a.T.astype(np.int32)
    best, witness, checked = math.inf, None, 0
    for w in range(lo, hi + 1):
        signs = _sign_patterns(w).astype(np.int32)
        per_chunk = max(1, _CHUNK // (len(signs) * max(1, a.shape[0])))
        combos = itertools.combinations(range(n), w)
        while True:
            chunk = np.array(list(itertools.islice(combos, per_chunk)), dtype=np.int64)
            if not len(chunk):
                break
            images = np.einsum("cwr,sw->csr", cols[chunk], signs)
            scores = np.abs(images).max(axis=2) if a.shape[0] else np.zeros(images.shape[:2])
            checked += scores.size
            idx = int(np.argmin(scores))
            val = float(scores.flat[idx])
            if val < best:
                c, s = divmod(idx, len(signs))
                best = val
                witness = np.zeros(n, dtype=np.int64)
                witness[chunk[c]] = signs[s]
                if stop_below is not None and best < stop_below:
                    return DetectReport(best, witness, checked, (lo, hi))
    return DetectReport(best, witness, checked, (lo, hi))


def is_detecting(q, d0: int, e: float, sparsity_cap: int | None = None) -> bool:
    """True iff ``||Q d||_inf >= 2e`` for all ternary ``d`` with ``d0 <= ||d||_0 <= cap``."""
    rep = min_margin(q, d0, sparsity_cap, stop_below=2 * e)
    return rep.min_linf >= 2 * e - 1e-12


def min_margin_pairs(q, weight_lo: int, weight_hi: int | None = None) -> float:
    """Independent check over binary pairs ``(a, b)`` with Hamming distance in range."""
    a = as_dense(q)
    n = a.shape[1]
    hi = n if weight_hi is None else weight_hi
    if n > 12:
        raise InstanceTooLarge("pairwise enumeration is limited to 12 columns")
    idx = np.arange(1 << n, dtype=np.int64)
    xs = (idx[:, None] >> np.arange(n)) & 1
    images = (xs @ a.T).astype(np.int32)
    best = math.inf
    step = max(1, (1 << 22) // ((1 << n) * max(1, a.shape[0])))
    for start in range(0, 1 << n, step):
        block = idx[start : start + step]
        dist = np.bitwise_count(block[:, None] ^ idx[None, :])
        ok = (dist >= weight_lo) & (dist <= hi)
        if not ok.any():
            continue
        diff = np.abs(images[block][:, None, :] - images[None, :, :]).max(axis=2)
        best = min(best, float(diff[ok].min()))
    return best
