import numpy as np
import pytest

from conftest import load_graph
from qgt.basic import encode_basic
from qgt.combined import build_combined, decode_combined, decode_combined_detailed, encode_combined
from qgt.oracle import min_margin
from qgt.params import CodeParams, ParameterError
from qgt.scqgt import encode_scqgt


@pytest.fixture(scope="module")
def desk(desk_graph):
    return build_combined(CodeParams.direct(16, 1, 1.0, 4), graph=desk_graph, inner="identity", inner_width=1)


@pytest.fixture(scope="module")
def small():
    return build_combined(CodeParams.direct(12, 2, 1.0, 3), graph=load_graph("desk_12_64_4_6"))


def test_heights(desk):
    assert desk.heights == (desk.part_m.height, desk.part_q.height)
    assert desk.height == sum(desk.heights) == desk.matrix().shape[0]
    assert desk.part_m.n == desk.part_q.n == 16
    assert desk.part_m.params.d0 == desk.params.k


def test_degenerate_k_equals_d0():
    code = build_combined(CodeParams.direct(16, 4, 1.0, 4), graph=load_graph("desk_16_64_4_8"))
    assert code.part_m.params.d0 == code.part_q.params.d0 == 4


def test_build_rejects_d0_above_k(desk_graph):
    with pytest.raises(ParameterError):
        build_combined(CodeParams(16, 5, 1.0, 4, 0.5, 0.0, 0.6), graph=desk_graph)


def test_coverage_on_stacked_matrix(small):
    r = small.matrix()
    m = small.part_m.matrix().to_dense()
    q = small.part_q.matrix()
    whole = min_margin(r, 2)
    assert whole.min_linf >= 2 * small.part_q.detect_e
    d = whole.witness
    assert whole.min_linf == max(np.abs(m @ d).max(), np.abs(q @ d).max())
    # each part covers its own range of difference weights
    assert min_margin(q, 2, 6).min_linf >= 2 * small.part_q.detect_e
    assert min_margin(m, 3).min_linf >= 2 * small.part_m.detect_e


def test_encode(desk, rng):
    assert not encode_combined(desk, np.zeros(16, dtype=int)).any()
    r = desk.matrix()
    for _ in range(10):
        x = rng.integers(0, 2, 16)
        y = encode_combined(desk, x)
        s = desk.part_m.height
        assert np.array_equal(y[:s], encode_basic(desk.part_m, x))
        assert np.array_equal(y[s:], encode_scqgt(desk.part_q, x))
        assert np.array_equal(y, r @ x)


def test_zero_noise_exact(desk, rng):
    for _ in range(50):
        x = rng.integers(0, 2, 16)
        info = decode_combined_detailed(desk, encode_combined(desk, x))
        assert np.array_equal(info.x, x)
        assert np.array_equal(info.x_step_a, x)
        assert info.step_b_corrections == 0


def test_noise_on_q_slice_only(desk, rng):
    s = desk.part_m.height
    e = desk.part_q.detect_scale * desk.params.e
    for _ in range(100):
        x = rng.integers(0, 2, 16)
        y = encode_combined(desk, x).astype(float)
        y[s:] += rng.uniform(-e, e, desk.part_q.height)
        info = decode_combined_detailed(desk, y)
        assert np.array_equal(info.x_step_a, x)
        assert info.step_b_corrections == 0
        assert np.array_equal(info.x, x)


def test_step_b_repairs_step_a(desk, rng):
    e = desk.noise_budget
    worst_a = 0
    for _ in range(200):
        x = rng.integers(0, 2, 16)
        y = encode_combined(desk, x) + rng.choice([-e, e], desk.height)
        info = decode_combined_detailed(desk, y)
        residual = x - info.x_step_a
        worst_a = max(worst_a, np.count_nonzero(residual))
        assert np.count_nonzero(residual) <= desk.params.k
        assert np.count_nonzero(info.x != x) <= 4 * desk.params.d0
    print(f"largest Step-A residual: {worst_a}")


def test_length_mismatch(desk):
    with pytest.raises(ValueError):
        decode_combined(desk, np.zeros(desk.height + 1))
