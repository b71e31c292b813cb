"""Noise generators with an exact l-infinity budget.

``zero``, ``uniform`` and ``const-sign`` are oblivious. The other two look
at the code and the true data:

``segment-attack``
    Plants ties at 1/2 after the decoder's Hadamard inversion, using
    windows carrying a flat-spectrum (bent) sign pattern so the pre-image
    stays within budget. On basic codes one window per inner row lands on
    distinct segments; on SCQGT blocks the window is aimed at the
    neighbours of an absent item.

``confusion-attack``
    Samples ternary differences ``d`` near the distance threshold that keep
    ``x - d`` binary, picks the one with the smallest ``||R d||_inf`` and
    adds ``-R d / 2`` (clipped), steering the measurement to the midpoint
    between ``x`` and ``x - d``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import codec
from .basic import BasicCode
from .combined import CombinedCode
from .linalg import fwht
from .scqgt import ScqgtCode

STRATEGIES = ("zero", "uniform", "const-sign", "segment-attack", "confusion-attack")


@dataclass(frozen=True)
class NoiseSpec:
    bound: float
    strategy: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.bound < 0:
            raise ValueError("noise bound must be nonnegative")
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; expected one of {STRATEGIES}")

    @classmethod
    def parse(cls, text: str) -> "NoiseSpec":
        """``<strategy>:<e>[:seed]``"""
        parts = text.split(":")
        if len(parts) not in (2, 3):
            raise ValueError(f"expected <strategy>:<e>[:seed], got {text!r}")
        seed = int(parts[2]) if len(parts) == 3 else 0
        return cls(float(parts[1]), parts[0], seed)

    def __str__(self) -> str:
        return f"{self.strategy}:{self.bound:g}:{self.seed}"


def _flat_pattern(m: int) -> tuple[np.ndarray, int]:
    """A +-1 vector of length ``m`` (power of two) and ``max |H_m u|``.

    For ``m = 4^j`` this is the bent function ``(-1)^(a.b)``, whose
    transform is flat at ``sqrt(m)``; odd powers repeat it twice.
    """
    bits = m.bit_length() - 1
    half = bits // 2
    side = 1 << half
    a = np.arange(side)
    dots = np.zeros((side, side), dtype=np.int64)
    anded = a[:, None] & a[None, :]
    while anded.any():
        dots ^= anded & 1
        anded = anded >> 1
    u = (1 - 2 * dots).ravel()
    if bits % 2:
        u = np.concatenate([u, u])
    return u, int(np.abs(fwht(u)).max())


def _window_size(limit: float, cap: int) -> int:
    """Largest power-of-two window whose flat pattern peaks at or below ``limit``."""
    m = 0
    size = 1
    while size <= cap:
        if _flat_pattern(size)[1] <= limit + 1e-12:
            m = size
        size *= 2
    return m


def _segment_attack_basic(code: BasicCode, x, bound: float) -> np.ndarray:
    hs, h = code.hadamard_size, code.inner.height
    # noise n_u = nu / 2, n_l = -nu / 2 with nu = H (tie pattern)
    m = _window_size(4 * bound, hs)
    nu_tilde = np.zeros((hs, h))
    if m:
        u, _ = _flat_pattern(m)
        xb = np.zeros(code.n_bar, dtype=np.int64)
        xb[: code.n] = x
        truth = xb.reshape(hs, code.width) @ code.inner.matrix.to_dense().T.astype(np.int64)
        for r in range(h):
            start = (r * m) % hs
            seg = slice(start, start + m)
            # +1/2 always rounds away from the truth; -1/2 only where truth is 0
            sign = 1 if (u > 0).sum() >= ((u < 0) & (truth[seg, r] == 0)).sum() else -1
            nu_tilde[seg, r] = 0.5 * sign * u
    nu = fwht(nu_tilde, axis=0).ravel()
    noise = np.concatenate([nu / 2, -nu / 2])
    return np.clip(noise, -bound, bound)


def _segment_attack_scqgt(code: ScqgtCode, x, bound: float, rng) -> np.ndarray:
    m_size = code.m
    m = _window_size(bound, m_size)
    noise = np.zeros((code.degree, m_size))
    if m:
        u, _ = _flat_pattern(m)
        absent = np.nonzero(np.asarray(x) == 0)[0]
        target = int(rng.choice(absent)) if len(absent) else 0
        for i in range(code.degree):
            p = int(code.graph.adjacency[target, i])
            start = (p // m) * m
            tie = np.zeros(m_size)
            tie[start : start + m] = 0.5 * u * u[p - start]
            noise[i] = fwht(tie)
    return np.clip(noise.ravel(), -bound, bound)


def _confusion_attack(code, x, bound: float, rng, samples: int = 200) -> np.ndarray:
    x = np.asarray(x, dtype=np.int64)
    n = len(x)
    d0 = code.params.d0
    weights = [w for w in (d0 - 1, d0, d0 + 1) if 1 <= w <= n]
    y_true = codec.encode(code, x)
    best, best_val = None, math.inf
    for _ in range(samples):
        w = int(rng.choice(weights))
        support = rng.choice(n, size=w, replace=False)
        other = x.copy()
        other[support] = 1 - other[support]
        if isinstance(code, ScqgtCode) and np.count_nonzero(other) > code.params.k:
            continue
        diff = y_true - codec.encode(code, other)
        val = np.abs(diff).max()
        if val < best_val:
            best, best_val = diff, val
    if best is None:
        return np.zeros(len(y_true))
    return np.clip(-best / 2, -bound, bound)


def gen_noise(spec: NoiseSpec, code, x_true, rows: int | None = None) -> np.ndarray:
    """Noise for one measurement of ``x_true``; ``||noise||_inf <= spec.bound`` always."""
    height = code.height
    if rows is not None and rows != height:
        raise ValueError(f"rows {rows} != code height {height}")
    rng = np.random.default_rng(spec.seed)
    e = spec.bound
    s = spec.strategy
    if s == "zero" or e == 0:
        noise = np.zeros(height)
    elif s == "uniform":
        noise = rng.uniform(-e, e, height)
    elif s == "const-sign":
        noise = e * (1 - 2 * (np.arange(height) % 2))
    elif s == "segment-attack":
        if isinstance(code, BasicCode):
            noise = _segment_attack_basic(code, x_true, e)
        elif isinstance(code, ScqgtCode):
            noise = _segment_attack_scqgt(code, x_true, e, rng)
        elif isinstance(code, CombinedCode):
            noise = np.concatenate(
                [
                    _segment_attack_basic(code.part_m, x_true, e),
                    _segment_attack_scqgt(code.part_q, x_true, e, rng),
                ]
            )
        else:
            raise TypeError(f"unsupported code {type(code).__name__}")
    elif s == "confusion-attack":
        noise = _confusion_attack(code, x_true, e, rng)
    else:
        raise ValueError(f"unknown strategy {s!r}")
    noise = np.asarray(noise, dtype=np.float64)
    assert np.abs(noise).max(initial=0.0) <= e, "noise exceeds its budget"
    return noise


def worst_case_signs(code, x_true, bound: float, decode=None, max_rows: int = 20):
    """Enumerate all ``2^rows`` noise vectors with entries ``+-bound``.

    Returns ``(worst_hamming_error, noise)``. Extreme-magnitude sign patterns
    are a heuristic worst case, not a proof of one.
    """
    height = code.height
    if height > max_rows:
        raise ValueError(f"{height} rows exceed the enumeration limit {max_rows}")
    decode = decode or (lambda y: codec.decode(code, y))
    x_true = np.asarray(x_true)
    y = codec.encode(code, x_true).astype(np.float64)
    worst, worst_noise = -1, None
    for signs in itertools.product((-1.0, 1.0), repeat=height):
        noise = bound * np.array(signs)
        err = int(np.count_nonzero(decode(y + noise) != x_true))
        if err > worst:
            worst, worst_noise = err, noise
    return worst, worst_noise
