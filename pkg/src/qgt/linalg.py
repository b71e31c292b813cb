"""Exact integer matrix kernels used by every construction.

Binary pooling matrices are stored bit-packed, ternary matrices as int8.
All arithmetic on measurement vectors is carried out in int64 and checked
against overflow instead of silently wrapping.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MAX_HADAMARD_LOG2 = 20
MAX_KRON_ENTRIES = 1 << 26
_INT_LIMIT = 1 << 62


class SizeError(ValueError):
    """Requested object exceeds a supported size limit."""


class FormatError(ValueError):
    """Malformed matrix or vector text."""


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class BinaryMatrix:
    """{0,1} matrix with row-major bit-packed storage."""

    rows: int
    cols: int
    bits: np.ndarray  # uint8, shape (rows, ceil(cols / 8))

    @classmethod
    def from_dense(cls, a) -> "BinaryMatrix":
        a = np.asarray(a)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if a.size and not np.isin(a, (0, 1)).all():
            raise ValueError("binary matrix entries must be 0 or 1")
        packed = np.packbits(a.astype(np.uint8), axis=1)
        return cls(a.shape[0], a.shape[1], _readonly(packed))

    def to_dense(self) -> np.ndarray:
        if self.cols == 0:
            return np.zeros((self.rows, 0), dtype=np.int8)
        out = np.unpackbits(self.bits, axis=1, count=self.cols)
        return out.astype(np.int8)

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    def __eq__(self, other) -> bool:
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.bits, other.bits)

    def __repr__(self) -> str:
        return f"BinaryMatrix({self.rows}x{self.cols})"


@dataclass(frozen=True, eq=False)
class TernaryMatrix:
    """{-1,0,+1} matrix."""

    entries: np.ndarray  # int8, 2-D

    def __post_init__(self):
        a = np.asarray(self.entries)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        if a.size and not np.isin(a, (-1, 0, 1)).all():
            raise ValueError("ternary matrix entries must be -1, 0 or 1")
        object.__setattr__(self, "entries", _readonly(a.astype(np.int8)))

    @property
    def rows(self) -> int:
        return self.entries.shape[0]

    @property
    def cols(self) -> int:
        return self.entries.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    def to_dense(self) -> np.ndarray:
        return self.entries

    def __eq__(self, other) -> bool:
        if not isinstance(other, TernaryMatrix):
            return NotImplemented
        return np.array_equal(self.entries, other.entries)

    def __repr__(self) -> str:
        return f"TernaryMatrix({self.rows}x{self.cols})"


def dense(a) -> np.ndarray:
    """Dense integer view of a BinaryMatrix, TernaryMatrix or array."""
    if isinstance(a, (BinaryMatrix, TernaryMatrix)):
        return a.to_dense()
    return np.asarray(a)


def sylvester_hadamard(log2_size: int) -> TernaryMatrix:
    """Sylvester Hadamard matrix of order ``2**log2_size``.

    Entry (i, j) is ``(-1) ** popcount(i & j)``, which is the same matrix as
    the repeated Kronecker power of ``[[1, 1], [1, -1]]``.
    """
    if log2_size < 0:
        raise ValueError("log2_size must be nonnegative")
    if log2_size > MAX_HADAMARD_LOG2:
        raise SizeError(f"log2_size {log2_size} exceeds {MAX_HADAMARD_LOG2}")
    size = 1 << log2_size
    idx = np.arange(size, dtype=np.int64)
    anded = idx[:, None] & idx[None, :]
    parity = np.zeros_like(anded)
    while anded.any():
        parity ^= anded & 1
        anded >>= 1
    return TernaryMatrix((1 - 2 * parity).astype(np.int8))


def is_power_of_two(m: int) -> bool:
    return m > 0 and (m & (m - 1)) == 0


def fwht(v, axis: int = 0) -> np.ndarray:
    """Unnormalized fast Walsh-Hadamard transform, i.e. ``H_M @ v``.

    Integer input stays in exact int64 arithmetic; floating input is
    transformed in double precision. ``axis`` selects the transformed axis
    for batched input.
    """
    a = np.asarray(v)
    m = a.shape[axis]
    if not is_power_of_two(m):
        raise ValueError(f"length {m} is not a power of two")
    if np.issubdtype(a.dtype, np.integer) or a.dtype == bool:
        a = a.astype(np.int64)
        if a.size and int(np.abs(a).max()) * m >= _INT_LIMIT:
            raise OverflowError("fwht result would exceed the int64 guard")
    else:
        a = a.astype(np.float64)
    a = np.moveaxis(a, axis, 0)
    rest = a.shape[1:]
    h = 1
    while h < m:
        b = a.reshape(m // (2 * h), 2, h, *rest)
        a = np.stack((b[:, 0] + b[:, 1], b[:, 0] - b[:, 1]), axis=1).reshape(m, *rest)
        h *= 2
    return np.moveaxis(a, 0, axis).copy()


def kronecker(a, b) -> TernaryMatrix:
    a, b = dense(a), dense(b)
    total = a.shape[0] * b.shape[0] * a.shape[1] * b.shape[1]
    if total > MAX_KRON_ENTRIES:
        raise SizeError(f"Kronecker product with {total} entries is too large")
    return TernaryMatrix(np.kron(a.astype(np.int8), b.astype(np.int8)))


def split_signed(p) -> tuple[BinaryMatrix, BinaryMatrix]:
    """Positive and negative parts ``(Q1, Q2)`` with ``Q1 - Q2 == P``."""
    p = dense(p)
    return BinaryMatrix.from_dense(p > 0), BinaryMatrix.from_dense(p < 0)


def mat_vec(a, x) -> np.ndarray:
    """Exact integer product ``A @ x``."""
    m = dense(a).astype(np.int64)
    x = np.asarray(x)
    if x.ndim != 1 or m.shape[1] != x.shape[0]:
        raise ValueError(f"dimension mismatch: {m.shape} @ {x.shape}")
    if not (np.issubdtype(x.dtype, np.integer) or x.dtype == bool):
        raise TypeError("mat_vec expects an integer vector")
    x = x.astype(np.int64)
    if m.size and x.size:
        bound = int(np.abs(m).max(axis=1).max()) * int(np.abs(x).sum())
        if bound >= _INT_LIMIT:
            raise OverflowError("mat_vec result would exceed the int64 guard")
    return m @ x


# -- QGTMAT v1 text format --------------------------------------------------

_TERNARY_CHARS = {-1: "-", 0: "0", 1: "+"}
_TERNARY_VALUES = {"-": -1, "0": 0, "+": 1}


def format_matrix(m) -> str:
    if isinstance(m, BinaryMatrix):
        a, tag = m.to_dense(), "B"
        lines = ["".join("1" if v else "0" for v in row) for row in a]
    elif isinstance(m, TernaryMatrix):
        a, tag = m.entries, "T"
        lines = ["".join(_TERNARY_CHARS[int(v)] for v in row) for row in a]
    else:
        raise TypeError("expected BinaryMatrix or TernaryMatrix")
    header = f"QGTMAT v1 {a.shape[0]} {a.shape[1]} {tag}"
    return "\n".join([header, *lines]) + "\n"


def parse_matrix(text_or_lines):
    """Parse QGTMAT v1 text (a string or an iterator of lines)."""
    lines = text_or_lines.splitlines() if isinstance(text_or_lines, str) else text_or_lines
    it = iter(lines)
    header = next(it, "").split()
    if len(header) != 5 or header[:2] != ["QGTMAT", "v1"] or header[4] not in "BT":
        raise FormatError(f"bad QGTMAT header: {' '.join(header)!r}")
    rows, cols, tag = int(header[2]), int(header[3]), header[4]
    table = {"0": 0, "1": 1} if tag == "B" else _TERNARY_VALUES
    data = np.zeros((rows, cols), dtype=np.int8)
    for r in range(rows):
        line = next(it, None)
        if line is None:
            raise FormatError(f"expected {rows} rows, got {r}")
        line = line.strip()
        if len(line) != cols:
            raise FormatError(f"row {r} has {len(line)} entries, expected {cols}")
        try:
            data[r] = [table[c] for c in line]
        except KeyError as exc:
            raise FormatError(f"invalid character {exc} in row {r}") from None
    return BinaryMatrix.from_dense(data) if tag == "B" else TernaryMatrix(data)
