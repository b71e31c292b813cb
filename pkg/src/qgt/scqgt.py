"""Sparse pooling matrices ``Q = [H_M B_1; ...; H_M B_D]`` and their decoder.

``B_1 + ... + B_D`` is the induced matrix of a bipartite expander, split so
that each ``B_i`` has a single one per column. Decoding inverts each
Hadamard block, rounds to integers and hands the stacked
``B_i x + integer noise`` system to sparse matching pursuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .basic import round_half_away
from .expander import BipartiteExpander, ExpanderProvider, decompose, induced_matrix, random_provider
from .linalg import BinaryMatrix, fwht, is_power_of_two, sylvester_hadamard
from .params import CodeParams, ParameterError

_DENSE_LIMIT = 1 << 24


class GraphError(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class ScqgtCode:
    params: CodeParams
    graph: BipartiteExpander
    _dense: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n(self) -> int:
        return self.graph.n_left

    @property
    def m(self) -> int:
        return self.graph.n_right

    @property
    def degree(self) -> int:
        return self.graph.degree

    @property
    def had_log2(self) -> int:
        return self.m.bit_length() - 1

    @property
    def height(self) -> int:
        return self.m * self.degree

    @property
    def detect_scale(self) -> float:
        """``sqrt(1 - 2 eps) / 2``: the noise factor the construction is rated for."""
        return math.sqrt(max(0.0, 1 - 2 * self.params.epsilon)) / 2

    @property
    def weight_cap(self) -> int:
        """Largest difference weight the expansion argument covers."""
        return min(self.graph.k_bound, self.n)

    @property
    def detect_margin(self) -> float:
        """``sqrt((2A - D) / D * d0)``: certified ``min ||Q d||_inf`` for ``d0 <= ||d||_0 <= K``."""
        g = self.graph
        return math.sqrt((2 * g.expansion - g.degree) / g.degree * self.params.d0)

    @property
    def detect_e(self) -> float:
        return self.detect_margin / 2

    @property
    def blocks_b(self) -> list[BinaryMatrix]:
        if "b" not in self._dense:
            self._dense["b"] = decompose(induced_matrix(self.graph), self.degree)
        return self._dense["b"]

    def blocks_d(self) -> list[np.ndarray]:
        """Dense ``D_i = H_M B_i`` (small codes only)."""
        if self.height * self.n > _DENSE_LIMIT:
            raise MemoryError("code too large for a dense view")
        if "d" not in self._dense:
            h = sylvester_hadamard(self.had_log2).entries.astype(np.int64)
            self._dense["d"] = [h @ b.to_dense().astype(np.int64) for b in self.blocks_b]
        return self._dense["d"]

    def matrix(self) -> np.ndarray:
        """Dense stacked ``Q`` (entries in {-1, 0, 1})."""
        return np.vstack(self.blocks_d())

    def describe(self) -> dict:
        g = self.graph
        return {
            "kind": "scqgt",
            "n": self.n,
            "graph": list(g.params),
            "height": self.height,
            "d0": self.params.d0,
            "k": self.params.k,
            "detect_scale": self.detect_scale,
            "detect_e": self.detect_e,
        }


def build_scqgt(
    params: CodeParams,
    provider: ExpanderProvider | None = None,
    n_right: int | None = None,
    degree: int | None = None,
    k_bound: int | None = None,
    expansion: float | None = None,
    graph: BipartiteExpander | None = None,
) -> ScqgtCode:
    """Build from an explicit ``graph`` or ask ``provider`` for one."""
    if graph is None:
        if None in (n_right, degree, expansion):
            raise ParameterError("need a graph or (n_right, degree, expansion)")
        k_bound = 2 * params.k if k_bound is None else k_bound
        provider = provider or random_provider(seed=0)
        graph = provider(params.n, n_right, degree, k_bound, expansion)
    if graph.n_left != params.n:
        raise GraphError(f"graph has {graph.n_left} left vertices, expected {params.n}")
    if not is_power_of_two(graph.n_right):
        raise GraphError(f"right side {graph.n_right} is not a power of two")
    if not graph.verified:
        raise GraphError("graph expansion has not been verified")
    if not 2 * graph.expansion > graph.degree:
        raise GraphError(f"need A > D/2, got A={graph.expansion}, D={graph.degree}")
    if graph.k_bound < min(2 * params.k, params.n):
        raise GraphError(f"need K >= 2k = {2 * params.k}, got K={graph.k_bound}")
    return ScqgtCode(params, graph)


def _expander_apply(graph: BipartiteExpander, x: np.ndarray) -> np.ndarray:
    """Stacked ``B_i x`` as a (D, M) integer array."""
    out = np.zeros((graph.degree, graph.n_right), dtype=np.int64)
    for i in range(graph.degree):
        np.add.at(out[i], graph.adjacency[:, i], x)
    return out


def encode_scqgt(code: ScqgtCode, x) -> np.ndarray:
    """Stacked block measurements; block ``i`` is ``fwht(B_i x)``."""
    x = np.asarray(x)
    if x.ndim != 1 or x.shape[0] != code.n:
        raise ValueError(f"expected a length-{code.n} vector")
    if not (np.issubdtype(x.dtype, np.integer) or x.dtype == bool):
        raise TypeError("encode_scqgt expects an integer vector")
    folded = _expander_apply(code.graph, x.astype(np.int64))
    return fwht(folded, axis=1).ravel()


def _top(v: np.ndarray, count: int) -> np.ndarray:
    """Keep the ``count`` largest magnitudes (ties to lower index)."""
    if count >= len(v):
        return v.copy()
    order = np.lexsort((np.arange(len(v)), -np.abs(v)))
    out = np.zeros_like(v)
    keep = order[:count]
    out[keep] = v[keep]
    return out


@dataclass
class SmpResult:
    x: np.ndarray
    residuals: list  # l1 residual of every accepted iterate, starting at x = 0
    iterations: int


def smp(
    graph: BipartiteExpander, y_star, k: int, max_iters: int | None = None
) -> SmpResult:
    """Sparse matching pursuit over the expander system ``y*_i = B_i x + n*_i``.

    Each round forms the residual, estimates every coordinate by the (lower)
    median of the residual over its ``D`` neighbours, keeps the ``2k``
    largest estimates, adds them and prunes back to ``k`` entries. Stops
    when the l1 residual no longer improves.
    """
    y = np.asarray(y_star, dtype=np.int64).reshape(graph.degree, graph.n_right)
    if max_iters is None:
        max_iters = 2 * math.ceil(math.log2(1 + np.abs(y).sum())) + 10
    mid = (graph.degree - 1) // 2
    x = np.zeros(graph.n_left, dtype=np.int64)
    best = int(np.abs(y).sum())
    residuals = [best]
    it = 0
    for it in range(1, max_iters + 1):
        r = y - _expander_apply(graph, x)
        votes = r[np.arange(graph.degree)[None, :], graph.adjacency]
        c = np.sort(votes, axis=1)[:, mid]
        cand = _top(x + _top(c, 2 * k), k)
        res = int(np.abs(y - _expander_apply(graph, cand)).sum())
        if res >= best:
            break
        x, best = cand, res
        residuals.append(res)
        if res == 0:
            break
    return SmpResult(x, residuals, it)


@dataclass
class ScqgtDecodeInfo:
    x: np.ndarray
    y_bar: np.ndarray  # (D, M) real
    y_star: np.ndarray  # (D, M) integer
    smp: SmpResult


def decode_scqgt_detailed(code: ScqgtCode, y, ternary: bool = False, k: int | None = None) -> ScqgtDecodeInfo:
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (code.height,):
        raise ValueError(f"expected {code.height} measurements, got {y.shape}")
    blocks = y.reshape(code.degree, code.m)
    y_bar = fwht(blocks, axis=1) / code.m
    y_star = round_half_away(y_bar)
    res = smp(code.graph, y_star, code.params.k if k is None else k)
    lo = -1 if ternary else 0
    return ScqgtDecodeInfo(np.clip(res.x, lo, 1), y_bar, y_star, res)


def decode_scqgt(code: ScqgtCode, y, ternary: bool = False) -> np.ndarray:
    """Decode to {0,1}^N, or {-1,0,1}^N with ``ternary=True``."""
    return decode_scqgt_detailed(code, y, ternary).x

