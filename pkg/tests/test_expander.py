import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qgt.expander import (
    BipartiteExpander,
    ExpansionError,
    InstanceTooLarge,
    achieved_profile,
    all_subsets_graph,
    decompose,
    expansion_by_sorting,
    format_graph,
    induced_matrix,
    parse_graph,
    random_expander,
    sample_expansion,
    search_expander,
    verify_expansion,
    with_claim,
)
from qgt.linalg import BinaryMatrix, FormatError


def random_graph(rng, n=None, m=None, d=None):
    n = n or int(rng.integers(2, 9))
    m = m or int(rng.integers(3, 12))
    d = d or int(rng.integers(1, min(m, 4) + 1))
    adj = np.sort(rng.random((n, m)).argsort(axis=1)[:, :d], axis=1)
    return BipartiteExpander(n, m, d, n, 1.0, adj)


@pytest.fixture(scope="module")
def fig1():
    return with_claim(all_subsets_graph(4, 2), 2, 1)


def test_fig1_instance(fig1):
    assert fig1.params == (6, 4, 2, 2, 1)
    assert fig1.verified
    b = induced_matrix(fig1).to_dense()
    assert b.shape == (4, 6)
    assert (b.sum(axis=0) == 2).all()
    for i, j in itertools.combinations(range(6), 2):
        assert (b[:, i] | b[:, j]).sum() >= 2


def test_fig1_demanding_a2(fig1):
    ok, witness = verify_expansion(fig1, 2, 2)
    # every pair of distinct 2-subsets of a 4-set covers 3 or 4 points
    assert not ok
    assert len(fig1.neighbours(witness)) < 2 * len(witness)
    assert expansion_by_sorting(fig1, 2, 2) is False


def test_single_vertex_sets(rng):
    for _ in range(20):
        g = random_graph(rng)
        assert verify_expansion(g, 1, g.degree)[0]
        assert not verify_expansion(g, 1, g.degree + 0.5)[0]


def test_matching_examples():
    g = random_expander(4, 4, 1, 1, 1, seed=0)
    assert g.verified
    # distinctness over all of [N] forces a perfect matching
    matching = random_expander(4, 4, 1, 4, 1, seed=0)
    assert sorted(matching.adjacency[:, 0].tolist()) == [0, 1, 2, 3]
    perm = BipartiteExpander(3, 3, 1, 3, 1, np.array([[2], [0], [1]]))
    b = induced_matrix(perm).to_dense()
    assert b.tolist() == [[0, 1, 0], [0, 0, 1], [1, 0, 0]]
    assert decompose(induced_matrix(perm), 1) == [induced_matrix(perm)]


def test_random_expander_desk():
    g = random_expander(6, 4, 2, 2, 1, seed=3)
    assert g.verified and verify_expansion(g)[0]


def test_random_expander_impossible():
    with pytest.raises(ExpansionError) as info:
        random_expander(6, 2, 2, 2, 2, seed=0)
    assert info.value.best_k <= 1
    with pytest.raises(ValueError):
        random_expander(4, 2, 3, 1, 1)


def test_search_expander_finds_tight_instance():
    g = search_expander(8, 32, 4, 4, 3.5, seed=1)
    assert g.verified and expansion_by_sorting(g, 4, 3.5)
    assert min(achieved_profile(g, 4)) >= 3.5


def test_verify_rejects_huge():
    g = BipartiteExpander(40, 64, 2, 20, 1.0, np.tile([0, 1], (40, 1)))
    with pytest.raises(InstanceTooLarge):
        verify_expansion(g)


def test_bitset_agrees_with_sort_merge(rng):
    for _ in range(100):
        g = random_graph(rng)
        k = int(rng.integers(1, g.n_left + 1))
        a = float(rng.choice([1.0, 1.5, 2.0, 2.5, 3.0]))
        assert verify_expansion(g, k, a)[0] == expansion_by_sorting(g, k, a)


def test_sampler_never_certifies(rng):
    for _ in range(50):
        g = random_graph(rng)
        k = int(rng.integers(1, g.n_left + 1))
        a = float(rng.choice([1.0, 2.0, 3.0]))
        verdict, subset = sample_expansion(g, k, a, 200, seed=int(rng.integers(1 << 30)))
        assert verdict in (False, None)
        if verdict is False:
            assert not verify_expansion(g, k, a)[0]
            assert len(g.neighbours(subset)) < a * len(subset)


def test_adjacency_validation():
    with pytest.raises(ValueError):
        BipartiteExpander(2, 4, 2, 1, 1, np.array([[0, 0], [1, 2]]))
    with pytest.raises(ValueError):
        BipartiteExpander(2, 4, 2, 1, 1, np.array([[0, 4], [1, 2]]))
    g = BipartiteExpander(2, 4, 2, 1, 1, np.array([[3, 0], [2, 1]]))
    assert g.adjacency.tolist() == [[0, 3], [1, 2]]
    with pytest.raises(ValueError):
        g.adjacency[0, 0] = 1


def test_decompose_rule():
    b = np.array([[1, 0, 1], [1, 1, 0], [0, 1, 1]])
    parts = decompose(BinaryMatrix.from_dense(b), 2)
    assert parts[0].to_dense().tolist() == [[1, 0, 1], [0, 1, 0], [0, 0, 0]]
    assert parts[1].to_dense().tolist() == [[0, 0, 0], [1, 0, 0], [0, 1, 1]]
    with pytest.raises(ValueError):
        decompose(BinaryMatrix.from_dense([[1, 0], [1, 0]]), 2)


@settings(max_examples=50)
@given(st.integers(0, 2**32 - 1))
def test_decompose_recomposes(seed):
    g = random_graph(np.random.default_rng(seed))
    b = induced_matrix(g)
    parts = decompose(b, g.degree)
    assert len(parts) == g.degree
    total = sum(p.to_dense().astype(int) for p in parts)
    assert np.array_equal(total, b.to_dense())
    for p in parts:
        assert (p.to_dense().sum(axis=0) == 1).all()


def test_graph_file_round_trip(desk_graph):
    text = format_graph(desk_graph)
    assert text.startswith("QGTEXP v1 16 64 4 8 3.5 1\n")
    back = parse_graph(text)
    assert back == desk_graph and back.verified


def test_graph_file_rejects_false_claim(fig1):
    text = format_graph(fig1).replace("QGTEXP v1 6 4 2 2 1 1", "QGTEXP v1 6 4 2 2 2 1")
    with pytest.raises(FormatError):
        parse_graph(text)
    assert not parse_graph(text, reverify=False).expansion == 1
    with pytest.raises(FormatError):
        parse_graph("QGTEXP v1 2 4 2 1 1 0\n0 1\n")
