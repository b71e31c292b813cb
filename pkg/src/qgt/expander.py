"""Left-regular bipartite expanders: sampling, brute-force verification, matrices.

A graph is an ``(N, M, D, K, A)``-expander when every left set ``S`` with
``|S| <= K`` has at least ``A |S|`` distinct right neighbours.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, replace
from typing import Callable

import numpy as np

from .linalg import BinaryMatrix, FormatError

MAX_SUBSETS = 10**7


class ExpansionError(ValueError):
    """Sampling gave up; carries the best ``(K, A)`` actually achieved."""

    def __init__(self, message, best_k=0, best_a=0.0, best_graph=None):
        super().__init__(message)
        self.best_k = best_k
        self.best_a = best_a
        self.best_graph = best_graph


class InstanceTooLarge(ValueError):
    pass


@dataclass(frozen=True, eq=False)
class BipartiteExpander:
    n_left: int
    n_right: int
    degree: int
    k_bound: int
    expansion: float
    adjacency: np.ndarray  # (n_left, degree), each row sorted and distinct
    verified: bool = False

    def __post_init__(self):
        adj = np.sort(np.asarray(self.adjacency, dtype=np.int64), axis=1)
        if adj.shape != (self.n_left, self.degree):
            raise ValueError(f"adjacency shape {adj.shape} != ({self.n_left}, {self.degree})")
        if adj.size and (adj.min() < 0 or adj.max() >= self.n_right):
            raise ValueError("neighbour index out of range")
        if self.degree > 1 and (np.diff(adj, axis=1) == 0).any():
            raise ValueError("left vertices need distinct neighbours")
        adj.setflags(write=False)
        object.__setattr__(self, "adjacency", adj)

    @property
    def params(self) -> tuple:
        return (self.n_left, self.n_right, self.degree, self.k_bound, self.expansion)

    def neighbours(self, subset) -> np.ndarray:
        return np.unique(self.adjacency[list(subset)])

    def __eq__(self, other):
        if not isinstance(other, BipartiteExpander):
            return NotImplemented
        return self.params == other.params and np.array_equal(self.adjacency, other.adjacency)


ExpanderProvider = Callable[[int, int, int, int, float], BipartiteExpander]


def _subset_count(n: int, k: int) -> int:
    return sum(math.comb(n, s) for s in range(1, k + 1))


def _masks(g: BipartiteExpander) -> np.ndarray:
    words = (g.n_right + 63) // 64
    masks = np.zeros((g.n_left, words), dtype=np.uint64)
    for i, row in enumerate(g.adjacency):
        for j in row:
            masks[i, j // 64] |= np.uint64(1) << np.uint64(j % 64)
    return masks


def _by_size(g: BipartiteExpander, k: int):
    """Yield ``(size, subsets, neighbourhood_sizes)`` for sizes 1..k.

    Subsets are generated in lexicographic order and their neighbourhoods
    are kept as OR-ed bitmasks, extended one vertex at a time.
    """
    masks = _masks(g)
    combos = np.arange(g.n_left, dtype=np.int64)[:, None]
    unions = masks.copy()
    for size in range(1, k + 1):
        if size > 1:
            last = combos[:, -1]
            ext = g.n_left - 1 - last
            keep = ext > 0
            combos, unions, last, ext = combos[keep], unions[keep], last[keep], ext[keep]
            rep = np.repeat(np.arange(len(combos)), ext)
            start = np.repeat(np.cumsum(ext) - ext, ext)
            new = last[rep] + 1 + (np.arange(len(rep)) - start)
            combos = np.hstack([combos[rep], new[:, None]])
            unions = unions[rep] | masks[new]
        if not len(combos):
            return
        yield size, combos, np.bitwise_count(unions).sum(axis=1).astype(np.int64)


def verify_expansion(g: BipartiteExpander, k: int | None = None, a: float | None = None):
    """Exhaustively check ``|Gamma(S)| >= a |S|`` for all ``|S| <= k``.

    Every size is checked. Returns ``(ok, violating_subset_or_None)``.
    """
    k = g.k_bound if k is None else k
    a = g.expansion if a is None else a
    k = min(k, g.n_left)
    if _subset_count(g.n_left, k) > MAX_SUBSETS:
        raise InstanceTooLarge(f"C({g.n_left}, <= {k}) exceeds {MAX_SUBSETS} subsets")
    for size, combos, counts in _by_size(g, k):
        bad = np.nonzero(counts < a * size - 1e-9)[0]
        if len(bad):
            return False, tuple(int(v) for v in combos[bad[0]])
    return True, None


def expansion_by_sorting(g: BipartiteExpander, k: int, a: float) -> bool:
    """Slow independent check: sort-merge neighbour counting per subset."""
    for size in range(1, min(k, g.n_left) + 1):
        for s in itertools.combinations(range(g.n_left), size):
            merged = sorted(int(v) for i in s for v in g.adjacency[i])
            distinct = sum(1 for j, v in enumerate(merged) if j == 0 or v != merged[j - 1])
            if distinct < a * size - 1e-9:
                return False
    return True


def achieved_profile(g: BipartiteExpander, k: int) -> list[float]:
    """``min |Gamma(S)| / |S|`` for each size 1..k."""
    return [float(counts.min()) / size for size, _, counts in _by_size(g, min(k, g.n_left))]


def sample_expansion(g: BipartiteExpander, k: int, a: float, samples: int, seed=None):
    """Randomised refutation for graphs too large to enumerate.

    Returns ``(False, subset)`` when a sampled set violates expansion and
    ``(None, None)`` otherwise; a sample can refute but never certify.
    """
    rng = np.random.default_rng(seed)
    for _ in range(samples):
        size = int(rng.integers(1, min(k, g.n_left) + 1))
        s = np.sort(rng.choice(g.n_left, size=size, replace=False))
        if len(g.neighbours(s)) < a * size - 1e-9:
            return False, tuple(int(v) for v in s)
    return None, None


def random_expander(
    n_left: int,
    n_right: int,
    degree: int,
    k_bound: int,
    expansion: float,
    seed=None,
    max_attempts: int = 200,
) -> BipartiteExpander:
    """Sample left-regular graphs until one verifies."""
    if degree > n_right:
        raise ValueError(f"degree {degree} exceeds the {n_right} right vertices")
    rng = np.random.default_rng(seed)
    best_k, best_a, best_graph = 0, 0.0, None
    impossible = min(k_bound, n_left) * expansion > n_right
    for attempt in range(max_attempts):
        adj = np.sort(rng.random((n_left, n_right)).argsort(axis=1)[:, :degree], axis=1)
        g = BipartiteExpander(n_left, n_right, degree, k_bound, expansion, adj)
        ok, _ = verify_expansion(g)
        if ok:
            return replace(g, verified=True)
        profile = achieved_profile(g, k_bound)
        reach = next((i for i, r in enumerate(profile) if r < expansion - 1e-9), len(profile))
        if (reach, min(profile)) > (best_k, best_a):
            best_k, best_a, best_graph = reach, min(profile), g
        if impossible:
            break
    raise ExpansionError(
        f"no ({n_left},{n_right},{degree},{k_bound},{expansion}) expander after "
        f"{attempt + 1} attempts; best K={best_k}, min ratio={best_a:.3g}",
        best_k,
        best_a,
        best_graph,
    )


def _deficit(g: BipartiteExpander, k: int, a: float):
    """Total expansion shortfall and per-vertex blame over all ``|S| <= k``."""
    total = 0.0
    blame = np.zeros(g.n_left)
    for size, combos, counts in _by_size(g, k):
        short = np.maximum(a * size - counts, 0)
        bad = short > 1e-9
        if bad.any():
            total += float(short[bad].sum())
            np.add.at(blame, combos[bad].ravel(), np.repeat(short[bad], size))
    return total, blame


def search_expander(
    n_left: int,
    n_right: int,
    degree: int,
    k_bound: int,
    expansion: float,
    seed=None,
    max_steps: int = 5000,
) -> BipartiteExpander:
    """Min-conflicts local search for a verifying graph.

    Starts from a random left-regular graph and repeatedly re-draws the
    neighbourhood of a vertex that takes part in violating sets, keeping
    the move when the total shortfall does not grow. The result is checked
    by :func:`verify_expansion` before being flagged.
    """
    if degree > n_right:
        raise ValueError(f"degree {degree} exceeds the {n_right} right vertices")
    if _subset_count(n_left, min(k_bound, n_left)) > MAX_SUBSETS:
        raise InstanceTooLarge("instance too large for exhaustive verification")
    rng = np.random.default_rng(seed)
    adj = np.sort(rng.random((n_left, n_right)).argsort(axis=1)[:, :degree], axis=1)
    g = BipartiteExpander(n_left, n_right, degree, k_bound, expansion, adj)
    score, blame = _deficit(g, k_bound, expansion)
    for _ in range(max_steps):
        if score == 0:
            break
        weights = blame / blame.sum()
        v = int(rng.choice(n_left, p=weights))
        trial = g.adjacency.copy()
        trial[v] = np.sort(rng.choice(n_right, size=degree, replace=False))
        cand = BipartiteExpander(n_left, n_right, degree, k_bound, expansion, trial)
        s, b = _deficit(cand, k_bound, expansion)
        if s <= score:
            g, score, blame = cand, s, b
    if score > 0 or not verify_expansion(g)[0]:
        profile = achieved_profile(g, k_bound)
        reach = next((i for i, r in enumerate(profile) if r < expansion - 1e-9), len(profile))
        raise ExpansionError(
            f"local search found no ({n_left},{n_right},{degree},{k_bound},{expansion}) "
            f"expander in {max_steps} steps",
            reach,
            min(profile),
            g,
        )
    return replace(g, verified=True)


def random_provider(seed=None, max_attempts: int = 200) -> ExpanderProvider:
    def provide(n_left, n_right, degree, k_bound, expansion):
        return random_expander(n_left, n_right, degree, k_bound, expansion, seed, max_attempts)

    return provide


def search_provider(seed=None, max_steps: int = 5000) -> ExpanderProvider:
    def provide(n_left, n_right, degree, k_bound, expansion):
        return search_expander(n_left, n_right, degree, k_bound, expansion, seed, max_steps)

    return provide


def all_subsets_graph(n_right: int, degree: int) -> BipartiteExpander:
    """One left vertex per ``degree``-subset of the right side, in lex order.

    ``all_subsets_graph(4, 2)`` is a (6, 4, 2, 2, 1)-expander.
    """
    adj = np.array(list(itertools.combinations(range(n_right), degree)), dtype=np.int64)
    return BipartiteExpander(len(adj), n_right, degree, 1, 1, adj)


def with_claim(g: BipartiteExpander, k: int, a: float) -> BipartiteExpander:
    """Attach an expansion claim, setting ``verified`` only if it checks out."""
    ok, _ = verify_expansion(g, k, a)
    return replace(g, k_bound=k, expansion=a, verified=ok)


def induced_matrix(g: BipartiteExpander) -> BinaryMatrix:
    b = np.zeros((g.n_right, g.n_left), dtype=np.int8)
    b[g.adjacency, np.arange(g.n_left)[:, None]] = 1
    return BinaryMatrix.from_dense(b)


def decompose(b, degree: int) -> list[BinaryMatrix]:
    """Split a column-``degree``-regular matrix into one-per-column parts.

    Part ``i`` keeps, in each column, the ``i``-th smallest row index among
    that column's ones.
    """
    a = b.to_dense() if isinstance(b, BinaryMatrix) else np.asarray(b)
    weights = a.sum(axis=0)
    if (weights != degree).any():
        j = int(np.nonzero(weights != degree)[0][0])
        raise ValueError(f"column {j} has {int(weights[j])} ones, expected {degree}")
    rows = np.sort(np.nonzero(a.T)[1].reshape(a.shape[1], degree), axis=1)
    parts = []
    for i in range(degree):
        p = np.zeros_like(a, dtype=np.int8)
        p[rows[:, i], np.arange(a.shape[1])] = 1
        parts.append(BinaryMatrix.from_dense(p))
    return parts


# -- QGTEXP v1 -------------------------------------------------------------------


def _fmt_num(v) -> str:
    return str(int(v)) if float(v).is_integer() else repr(float(v))


def format_graph(g: BipartiteExpander) -> str:
    head = (
        f"QGTEXP v1 {g.n_left} {g.n_right} {g.degree} {g.k_bound} "
        f"{_fmt_num(g.expansion)} {int(g.verified)}"
    )
    body = [" ".join(str(int(v)) for v in row) for row in g.adjacency]
    return "\n".join([head, *body]) + "\n"


def parse_graph(text_or_lines, reverify: bool = True) -> BipartiteExpander:
    """Parse QGTEXP v1; a ``verified`` flag is re-checked unless told otherwise."""
    lines = text_or_lines.splitlines() if isinstance(text_or_lines, str) else list(text_or_lines)
    head = lines[0].split() if lines else []
    if len(head) != 8 or head[:2] != ["QGTEXP", "v1"]:
        raise FormatError(f"bad QGTEXP header: {' '.join(head)!r}")
    n, m, d, k = (int(v) for v in head[2:6])
    a, flag = float(head[6]), head[7] == "1"
    rows = [ln.split() for ln in lines[1 : 1 + n]]
    if len(rows) != n or any(len(r) != d for r in rows):
        raise FormatError(f"expected {n} lines of {d} neighbour indices")
    g = BipartiteExpander(n, m, d, k, a, np.array(rows, dtype=np.int64).reshape(n, d))
    if flag:
        if reverify and not verify_expansion(g)[0]:
            raise FormatError("graph is flagged verified but fails the expansion check")
        g = replace(g, verified=True)
    return g
