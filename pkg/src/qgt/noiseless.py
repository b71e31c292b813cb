"""Noiseless coin-weighing detecting matrices and their exact decoders.

Two schemes are available:

``identity``
    Weigh every item on its own; height equals width.

``recursive-split``
    Start from a small detecting matrix ``A`` (h x d) and grow it with

        [[A,     A,  I_h],
         [A, J - A,    0],
         [0,   1^T,    0]]

    which is (2h + 1) x (2d + h). For items ``(u, v, w)`` the measurements
    are ``Au + Av + w``, ``Au - Av + |v|`` and ``|v|``, so ``w`` falls out
    as a parity, then ``Av`` and ``Au`` are recovered and decoded one level
    down. Each level roughly doubles the height while the width-to-height
    ratio grows by about 1/2, giving heights of order 2d / log2(d).

Any width is supported: a native matrix is truncated to its first ``d``
columns, which keeps it detecting (dropped items are pinned to zero).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import BinaryMatrix, FormatError, format_matrix, parse_matrix

SCHEMES = ("identity", "recursive-split")
MAX_VERIFY_WIDTH = 22
_MAX_LEVELS = 24

# Small detecting matrices found by exhaustive search; every one is
# re-verified in the test suite.
_BASES = {
    "i1": np.array([[1]]),
    "i2": np.eye(2, dtype=np.int64),
    "b34": np.array([[1, 1, 1, 0], [1, 0, 0, 1], [0, 0, 1, 1]]),
    "b45": np.array(
        [[0, 1, 0, 1, 0], [0, 0, 0, 1, 1], [0, 1, 1, 0, 0], [1, 1, 0, 0, 1]]
    ),
    "b57": np.array(
        [
            [1, 0, 1, 0, 1, 1, 0],
            [1, 1, 0, 0, 0, 1, 0],
            [1, 1, 1, 1, 1, 0, 0],
            [1, 0, 0, 1, 1, 0, 1],
            [1, 1, 1, 0, 0, 0, 1],
        ]
    ),
    "b69": np.array(
        [
            [1, 0, 0, 0, 0, 1, 0, 0, 1],
            [0, 0, 0, 0, 1, 0, 1, 1, 1],
            [1, 0, 0, 1, 1, 1, 1, 1, 0],
            [0, 1, 0, 1, 1, 1, 1, 0, 1],
            [1, 0, 1, 0, 1, 0, 1, 0, 1],
            [1, 1, 0, 1, 1, 0, 0, 1, 1],
        ]
    ),
}


class InfeasibleMeasurement(ValueError):
    """No binary vector reproduces the given measurement exactly."""


class WidthTooLarge(ValueError):
    pass


def _grow(a: np.ndarray) -> np.ndarray:
    h, d = a.shape
    top = np.hstack([a, a, np.eye(h, dtype=np.int64)])
    mid = np.hstack([a, 1 - a, np.zeros((h, h), dtype=np.int64)])
    bottom = np.concatenate([np.zeros(d), np.ones(d), np.zeros(h)])[None, :]
    return np.vstack([top, mid, bottom]).astype(np.int64)


def native_dims(base: str, levels: int) -> list[tuple[int, int]]:
    """(height, width) of a base after 0..levels growth steps."""
    h, d = _BASES[base].shape
    dims = [(h, d)]
    for _ in range(levels):
        h, d = 2 * h + 1, 2 * d + h
        dims.append((h, d))
    return dims


def recursive_height(d: int) -> int:
    """Height the recursive-split scheme uses for width ``d``."""
    return _plan(d)[2]


def _plan(d: int) -> tuple[str, int, int]:
    """Pick (base, levels, height) with the smallest height covering ``d``."""
    best = ("identity", 0, d)
    for base in _BASES:
        for levels, (h, w) in enumerate(native_dims(base, _MAX_LEVELS)):
            if h >= best[2]:
                break
            if w >= d:
                best = (base, levels, h)
                break
    return best


@dataclass(frozen=True, eq=False)
class NoiselessCode:
    width: int
    matrix: BinaryMatrix
    scheme: str
    base: str = "identity"
    levels: int = 0

    @property
    def height(self) -> int:
        return self.matrix.rows

    @property
    def native_width(self) -> int:
        if self.base == "identity":
            return self.width
        return native_dims(self.base, self.levels)[-1][1]

    def encode(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        return self.matrix.to_dense().astype(np.int64) @ x


def build_noiseless(d: int, scheme: str = "recursive-split") -> NoiselessCode:
    if d < 1:
        raise ValueError("width must be at least 1")
    if scheme not in SCHEMES:
        raise ValueError(f"unsupported scheme {scheme!r}; expected one of {SCHEMES}")
    if scheme == "identity":
        return NoiselessCode(d, BinaryMatrix.from_dense(np.eye(d, dtype=np.int8)), scheme)
    base, levels, _ = _plan(d)
    if base == "identity":
        return NoiselessCode(d, BinaryMatrix.from_dense(np.eye(d, dtype=np.int8)), scheme)
    a = _BASES[base]
    for _ in range(levels):
        a = _grow(a)
    return NoiselessCode(d, BinaryMatrix.from_dense(a[:, :d]), scheme, base, levels)


# -- decoding ----------------------------------------------------------------

_TABLES: dict[str, tuple[np.ndarray, np.ndarray, int]] = {}


def _base_table(base: str):
    if base not in _TABLES:
        a = _BASES[base]
        h, d = a.shape
        xs = (np.arange(1 << d)[:, None] >> np.arange(d)) & 1
        keys = (xs @ a.T) @ (d + 1) ** np.arange(h)
        order = np.argsort(keys)
        _TABLES[base] = (keys[order], xs[order], d)
    return _TABLES[base]


def _decode_base(base: str, y: np.ndarray):
    keys, xs, d = _base_table(base)
    bad = ((y < 0) | (y > d)).any(axis=1)
    yc = np.clip(y, 0, d)
    k = yc @ (d + 1) ** np.arange(y.shape[1])
    pos = np.minimum(np.searchsorted(keys, k), len(keys) - 1)
    bad |= keys[pos] != k
    return xs[pos], bad


def _decode_native(base: str, levels: int, y: np.ndarray):
    if levels == 0:
        return _decode_base(base, y)
    h, d = native_dims(base, levels - 1)[-1]
    y1, y2, s = y[:, :h], y[:, h : 2 * h], y[:, 2 * h : 2 * h + 1]
    t = y1 - y2 + s
    w = t % 2
    av = (t - w) // 2
    au = y2 - s + av
    xuv, bad = _decode_native(base, levels - 1, np.vstack([au, av]))
    n = y.shape[0]
    bad = bad[:n] | bad[n:] | (s[:, 0] < 0) | (s[:, 0] > d)
    return np.hstack([xuv[:n], xuv[n:], w]), bad


def decode_batch(code: NoiselessCode, y) -> tuple[np.ndarray, np.ndarray]:
    """Decode each row of ``y``; returns ``(x, infeasible_mask)``.

    Rows flagged infeasible are returned as all-zeros.
    """
    y = np.asarray(y, dtype=np.int64)
    if y.ndim != 2 or y.shape[1] != code.height:
        raise ValueError(f"expected rows of length {code.height}")
    if code.base == "identity":
        x = y.copy()
        bad = ~np.isin(y, (0, 1)).all(axis=1)
    else:
        x, bad = _decode_native(code.base, code.levels, y)
        bad |= x[:, code.width :].any(axis=1)
        x = x[:, : code.width]
        m = code.matrix.to_dense().astype(np.int64)
        bad |= (x @ m.T != y).any(axis=1)
    x = np.where(bad[:, None], 0, x)
    return x.astype(np.int64), bad


def decode_noiseless(code: NoiselessCode, y) -> np.ndarray:
    y = np.asarray(y)
    x, bad = decode_batch(code, y[None, :])
    if bad[0]:
        raise InfeasibleMeasurement("no binary vector matches the measurement")
    return x[0]


# -- verification --------------------------------------------------------------


def _ternary_half(cols: np.ndarray):
    """All ternary combinations of the given columns, as (vectors, images)."""
    k = cols.shape[1]
    t = np.zeros((1, k), dtype=np.int64)
    for j in range(k):
        reps = t.shape[0]
        t = np.repeat(t, 3, axis=0)
        t[:, j] = np.tile([-1, 0, 1], reps)
    return t, t @ cols.T


def verify_injective(m) -> tuple[bool, np.ndarray | None]:
    """Check ``m @ t != 0`` for every nonzero ternary ``t``.

    Meet-in-the-middle: split the columns in two halves and look for
    ``A1 t1 == -A2 t2``. Returns ``(ok, witness)``.
    """
    a = m.to_dense() if isinstance(m, BinaryMatrix) else np.asarray(m)
    a = a.astype(np.int64)
    d = a.shape[1]
    if d > MAX_VERIFY_WIDTH:
        raise WidthTooLarge(f"width {d} exceeds {MAX_VERIFY_WIDTH}")
    half = d // 2
    t1, img1 = _ternary_half(a[:, :half])
    t2, img2 = _ternary_half(a[:, half:])
    # void views make rows hashable for a sorted join
    v1 = np.ascontiguousarray(img1).view([("", img1.dtype)] * img1.shape[1]).ravel()
    v2 = np.ascontiguousarray(-img2).view([("", img2.dtype)] * img2.shape[1]).ravel()
    order = np.argsort(v2, kind="stable")
    v2s = v2[order]
    pos = np.searchsorted(v2s, v1, side="left")
    pos_r = np.searchsorted(v2s, v1, side="right")
    for i in np.nonzero(pos_r - pos)[0]:
        for p in range(pos[i], pos_r[i]):
            t = np.concatenate([t1[i], t2[order[p]]])
            if t.any():
                nz = t[np.nonzero(t)[0][0]]
                return False, t * nz
    return True, None


def injective_by_images(m) -> bool:
    """Independent check: all 2^d binary inputs have distinct images."""
    a = m.to_dense() if isinstance(m, BinaryMatrix) else np.asarray(m)
    d = a.shape[1]
    if d > MAX_VERIFY_WIDTH:
        raise WidthTooLarge(f"width {d} exceeds {MAX_VERIFY_WIDTH}")
    xs = (np.arange(1 << d, dtype=np.int64)[:, None] >> np.arange(d)) & 1
    return len(np.unique(xs @ a.T.astype(np.int64), axis=0)) == (1 << d)


# -- serialization -------------------------------------------------------------


def format_code(code: NoiselessCode) -> str:
    return f"SCHEME {code.scheme}\n" + format_matrix(code.matrix)


def parse_code(text_or_lines) -> NoiselessCode:
    lines = text_or_lines.splitlines() if isinstance(text_or_lines, str) else list(text_or_lines)
    if not lines or not lines[0].startswith("SCHEME "):
        raise FormatError("missing SCHEME line")
    scheme = lines[0].split(maxsplit=1)[1].strip()
    matrix = parse_matrix(lines[1:])
    code = build_noiseless(matrix.cols, scheme)
    if code.matrix != matrix:
        raise FormatError(f"matrix does not match the {scheme} construction of width {matrix.cols}")
    return code
