"""Stacked scheme ``R = [M; Q]``: basic code for the bulk, SCQGT for the rest.

Step A decodes the basic slice, leaving a residual ``p = x - x_hat`` that is
at most ``k``-sparse. Step B re-encodes ``x_hat`` through ``Q``, decodes the
difference ``Q p + noise`` in ternary mode and adds the correction.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .basic import BasicCode, build_basic, decode_basic, encode_basic
from .expander import BipartiteExpander, ExpanderProvider
from .params import CodeParams, ParameterError
from .scqgt import ScqgtCode, _top, build_scqgt, decode_scqgt_detailed, encode_scqgt


@dataclass(frozen=True, eq=False)
class CombinedCode:
    params: CodeParams
    part_m: BasicCode
    part_q: ScqgtCode

    @property
    def n(self) -> int:
        return self.params.n

    @property
    def heights(self) -> tuple[int, int]:
        return (self.part_m.height, self.part_q.height)

    @property
    def height(self) -> int:
        return sum(self.heights)

    @property
    def noise_budget(self) -> float:
        """Noise bound under which Step A is certified to leave a ``k``-sparse residual."""
        return self.part_m.noise_budget

    def matrix(self) -> np.ndarray:
        return np.vstack([self.part_m.matrix().to_dense().astype(np.int64), self.part_q.matrix()])

    def describe(self) -> dict:
        return {
            "kind": "combined",
            "n": self.n,
            "d0": self.params.d0,
            "k": self.params.k,
            "heights": list(self.heights),
            "height": self.height,
            "part_m": self.part_m.describe(),
            "part_q": self.part_q.describe(),
        }


def build_combined(
    params: CodeParams,
    provider: ExpanderProvider | None = None,
    graph: BipartiteExpander | None = None,
    n_right: int | None = None,
    degree: int | None = None,
    expansion: float | None = None,
    inner: str = "recursive-split",
    inner_width: int | None = None,
    hadamard_log2: int | None = None,
) -> CombinedCode:
    """Basic code for threshold ``k`` stacked on an SCQGT code for ``(d0, k)``."""
    if params.d0 > params.k:
        raise ParameterError(f"need d0 <= k, got d0={params.d0}, k={params.k}")
    m_params = replace(params, d0=params.k, kappa=params.lam)
    part_m = build_basic(m_params, inner, inner_width, hadamard_log2)
    part_q = build_scqgt(
        params, provider, n_right=n_right, degree=degree, expansion=expansion, graph=graph
    )
    return CombinedCode(params, part_m, part_q)


def encode_combined(code: CombinedCode, x) -> np.ndarray:
    return np.concatenate([encode_basic(code.part_m, x), encode_scqgt(code.part_q, np.asarray(x))])


@dataclass
class CombinedDecodeInfo:
    x: np.ndarray
    x_step_a: np.ndarray
    correction: np.ndarray  # ternary estimate of p

    @property
    def step_b_corrections(self) -> int:
        return int(np.count_nonzero(self.correction))


def decode_combined_detailed(code: CombinedCode, y) -> CombinedDecodeInfo:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (code.height,):
        raise ValueError(f"expected {code.height} measurements, got {y.shape}")
    s_a = code.part_m.height
    x_hat = decode_basic(code.part_m, y[:s_a])
    z = y[s_a:] - encode_scqgt(code.part_q, x_hat)
    p = decode_scqgt_detailed(code.part_q, z, ternary=True).x
    if np.count_nonzero(p) > 2 * code.params.k:
        p = _top(p, 2 * code.params.k)
    return CombinedDecodeInfo(np.clip(x_hat + p, 0, 1), x_hat, p)


def decode_combined(code: CombinedCode, y) -> np.ndarray:
    return decode_combined_detailed(code, y).x
