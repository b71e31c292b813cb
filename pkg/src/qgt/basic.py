"""Basic construction: pooling matrix built from ``H (x) M`` and its decoder.

``P = H_hs (x) M_w`` is ternary; it is split into its positive and negative
parts ``Q1 - Q2 = P`` which are stacked, and the last ``n_bar - n`` columns
are dropped. Decoding subtracts the two halves to get ``P x + noise``,
peels the Hadamard factor one butterfly level at a time and finally rounds
and decodes each length-``w`` segment with the noiseless inner code.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .linalg import BinaryMatrix, fwht, kronecker, split_signed, sylvester_hadamard
from .noiseless import NoiselessCode, build_noiseless, decode_batch
from .params import CodeParams, ParameterError

_DENSE_LIMIT = 1 << 24


def round_half_away(v) -> np.ndarray:
    """Round to the nearest integer, ties away from zero."""
    v = np.asarray(v, dtype=np.float64)
    return (np.sign(v) * np.floor(np.abs(v) + 0.5)).astype(np.int64)


def deconstruct_level(y, n_levels: int) -> np.ndarray:
    """Apply ``n_levels`` half-sum/half-difference butterfly levels.

    Level one maps the halves ``(u, l)`` of the whole vector to
    ``((u + l) / 2, (u - l) / 2)``; each further level acts on every block
    produced by the previous one. The result equals
    ``(H_{2^t} (x) I) y / 2^t``.
    """
    y = np.asarray(y, dtype=np.float64)
    if n_levels < 0:
        raise ValueError("n_levels must be nonnegative")
    size = y.shape[0]
    if size % (1 << n_levels):
        raise ValueError(f"length {size} is not divisible by 2**{n_levels}")
    out = y.copy()
    for level in range(n_levels):
        blocks = out.reshape(1 << level, 2, -1)
        u, l = blocks[:, 0], blocks[:, 1]
        out = np.stack(((u + l) / 2, (u - l) / 2), axis=1).reshape(size)
    return out


@dataclass(frozen=True, eq=False)
class BasicCode:
    params: CodeParams
    inner: NoiselessCode
    hadamard_log2: int
    _dense: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def width(self) -> int:
        return self.inner.width

    @property
    def hadamard_size(self) -> int:
        return 1 << self.hadamard_log2

    @property
    def n_bar(self) -> int:
        return self.hadamard_size * self.inner.width

    @property
    def p_rows(self) -> int:
        return self.hadamard_size * self.inner.height

    @property
    def height(self) -> int:
        return 2 * self.p_rows

    # Certified guarantees from the energy argument -------------------------

    @property
    def detect_margin(self) -> int:
        """Lower bound on ``min ||Q d||_inf`` over ternary ``d`` with ``||d||_0 >= d0``.

        At least ``ceil(d0 / w)`` segments of ``d`` are nonzero, each
        contributing ``hs * ||M d_i||^2 >= hs`` to ``||P d||^2``; spreading
        that over ``hs * h`` rows bounds ``||P d||_inf`` and, since
        ``P d = Q1 d - Q2 d`` is an integer vector, ``||Q d||_inf`` is at
        least half of it, rounded up.
        """
        segs = math.ceil(self.params.d0 / self.width)
        p_min = math.ceil(math.sqrt(segs / self.inner.height) - 1e-12)
        return max(1, math.ceil(max(p_min, 1) / 2))

    @property
    def detect_e(self) -> float:
        """Noise bound for which the code is certified ``(n, d0, e)``-detecting."""
        return self.detect_margin / 2

    @property
    def noise_budget(self) -> float:
        """Largest ``||noise||_inf`` for which ``decode_basic`` is certified.

        The subtracted noise has energy at most ``4 e^2 hs h``; after full
        deconstruction this drops to ``4 e^2 h``. A segment can only be
        wrong when it carries energy ``>= 1/4``, and then costs at most
        ``w`` errors, so ``16 e^2 h w <= d0`` keeps the error within ``d0``.
        """
        return math.sqrt(self.params.d0 / (16 * self.inner.height * self.width))

    # Dense views (small codes only) ----------------------------------------

    def p_matrix(self):
        if self.p_rows * self.n_bar > _DENSE_LIMIT:
            raise MemoryError("code too large for a dense view")
        if "p" not in self._dense:
            h = sylvester_hadamard(self.hadamard_log2)
            self._dense["p"] = kronecker(h, self.inner.matrix)
        return self._dense["p"]

    def _split(self):
        if "q" not in self._dense:
            p = self.p_matrix().entries[:, : self.n]
            self._dense["q"] = split_signed(p)
        return self._dense["q"]

    @property
    def q1(self) -> BinaryMatrix:
        return self._split()[0]

    @property
    def q2(self) -> BinaryMatrix:
        return self._split()[1]

    def matrix(self) -> BinaryMatrix:
        """The stacked pooling matrix ``[Q1; Q2]`` with ``n`` columns."""
        if "full" not in self._dense:
            q1, q2 = self._split()
            self._dense["full"] = BinaryMatrix.from_dense(np.vstack([q1.to_dense(), q2.to_dense()]))
        return self._dense["full"]

    def describe(self) -> dict:
        return {
            "kind": "basic",
            "n": self.n,
            "inner_scheme": self.inner.scheme,
            "inner_width": self.width,
            "inner_height": self.inner.height,
            "hadamard_size": self.hadamard_size,
            "n_bar": self.n_bar,
            "height": self.height,
            "d0": self.params.d0,
            "detect_e": self.detect_e,
            "noise_budget": self.noise_budget,
        }


def _next_pow2_log(x: float) -> int:
    return max(0, math.ceil(math.log2(x) - 1e-12)) if x > 1 else 0


def build_basic(
    params: CodeParams,
    inner: str = "recursive-split",
    inner_width: int | None = None,
    hadamard_log2: int | None = None,
) -> BasicCode:
    """Build the basic code; widths follow the exponent rounding unless given."""
    if params.epsilon < -1e-12:
        raise ParameterError(f"need 2*delta <= kappa (epsilon={params.epsilon:.4g})")
    n = params.n
    eps = max(params.epsilon, 0.0)
    if inner_width is None:
        inner_width = max(1, math.ceil(n ** (eps / 2) - 1e-9))
    if hadamard_log2 is None:
        hadamard_log2 = max(_next_pow2_log(n ** (1 - eps / 2)), _next_pow2_log(n / inner_width))
    if (1 << hadamard_log2) * inner_width < n:
        raise ParameterError(
            f"2**{hadamard_log2} * {inner_width} = {(1 << hadamard_log2) * inner_width} < n = {n}"
        )
    return BasicCode(params, build_noiseless(inner_width, inner), hadamard_log2)


def encode_basic(code: BasicCode, x) -> np.ndarray:
    """Measurements ``[Q1 x; Q2 x]`` via one batched Walsh-Hadamard transform."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != code.n:
        raise ValueError(f"expected a length-{code.n} vector")
    if not np.isin(x, (0, 1)).all():
        raise ValueError("items must be binary")
    xb = np.zeros(code.n_bar, dtype=np.int64)
    xb[: code.n] = x
    blocks = xb.reshape(code.hadamard_size, code.width)
    z = blocks @ code.inner.matrix.to_dense().T.astype(np.int64)
    total = z.sum(axis=0)
    hz = fwht(z, axis=0)
    pos = (total + hz) // 2
    neg = (total - hz) // 2
    return np.concatenate([pos.ravel(), neg.ravel()])


@dataclass
class BasicDecodeInfo:
    x: np.ndarray
    segments: np.ndarray  # real segment values after deconstruction
    rounded: np.ndarray
    infeasible: np.ndarray  # per-segment mask


def decode_basic_detailed(code: BasicCode, y) -> BasicDecodeInfo:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (code.height,):
        raise ValueError(f"expected {code.height} measurements, got {y.shape}")
    diff = y[: code.p_rows] - y[code.p_rows :]
    segs = deconstruct_level(diff, code.hadamard_log2).reshape(code.hadamard_size, code.inner.height)
    rounded = round_half_away(segs)
    xs, bad = decode_batch(code.inner, rounded)
    return BasicDecodeInfo(xs.ravel()[: code.n], segs, rounded, bad)


def decode_basic(code: BasicCode, y) -> np.ndarray:
    """Recover ``x`` (to within ``d0`` errors under the noise budget)."""
    return decode_basic_detailed(code, y).x
