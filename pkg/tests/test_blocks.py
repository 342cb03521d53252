import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import helpers
from schursim import blocks, dense
from schursim.blocks import GENERATOR_KINDS
from schursim.irreps import WeightVector, enumerate_weight_vectors


def block_residual(op, dense_mat, n):
    worst = 0.0
    for m, blk in op.blocks.items():
        ref = dense.project_block(dense_mat, n, m)
        worst = max(worst, float(np.max(np.abs(blk - ref))))
    return worst


# ---------------------------------------------------------------------------
# frozen examples


def test_collective_x_block_n4_m1():
    root2_over_4 = math.sqrt(2.0) / 4.0
    expect = np.array(
        [
            [0.0, root2_over_4, 0.0],
            [root2_over_4, 0.0, root2_over_4],
            [0.0, root2_over_4, 0.0],
        ]
    )
    np.testing.assert_allclose(blocks.generator_block("sum_x", 4, 1), expect, atol=1e-15)


def test_collective_zz_block_n5_symmetric_sector():
    # (n^2 - n - 4nh + 4h^2) / (n(n-1)) at h = q for the m = 0 block
    got = blocks.generator_block("sum_zz", 5, 0)
    np.testing.assert_allclose(got, np.diag([1.0, 0.2, -0.2, -0.2, 0.2, 1.0]), atol=1e-15)


def test_global_y_blocks_n3():
    m0 = blocks.generator_block("global_y", 3, 0)
    expect0 = np.zeros((4, 4), dtype=complex)
    expect0[0, 3] = 1j
    expect0[1, 2] = -1j
    expect0[2, 1] = 1j
    expect0[3, 0] = -1j
    np.testing.assert_allclose(m0, expect0, atol=1e-14)
    m1 = blocks.generator_block("global_y", 3, 1)
    np.testing.assert_allclose(m1, np.array([[0, 1j], [-1j, 0]]), atol=1e-14)


def test_twirled_xz_word_n4_symmetric_sector():
    a = 1.0 / (2.0 * math.sqrt(6.0))
    expect = np.zeros((5, 5))
    expect[0, 1] = expect[1, 0] = 0.5
    expect[1, 2] = expect[2, 1] = a
    expect[2, 3] = expect[3, 2] = -a
    expect[3, 4] = expect[4, 3] = -0.5
    got = blocks.twirl_block(4, WeightVector(1, 0, 1), 0)
    np.testing.assert_allclose(got, expect, atol=1e-14)


# ---------------------------------------------------------------------------
# dense cross-checks


@pytest.mark.parametrize("n", [2, 3, 4, 5, 6])
def test_generators_match_dense(n):
    for kind in GENERATOR_KINDS:
        op = blocks.generator(kind, n)
        ref = helpers.dense_collective(kind, n)
        assert block_residual(op, ref, n) < 1e-12, kind


@pytest.mark.parametrize("n", [4, 5])
def test_two_local_matches_ordered_pair_mean(n):
    for p in "IXYZ":
        for q in "IXYZ":
            op = blocks.two_local(p, q, n)
            ref = helpers.mean_two(p, q, n)
            assert block_residual(op, ref, n) < 1e-12, (p, q)


def test_two_local_rejects_junk():
    with pytest.raises(ValueError):
        blocks.two_local("X", "Q", 4)
    with pytest.raises(ValueError):
        blocks.two_local("X", "Y", 1)


@pytest.mark.parametrize("n", [4, 5])
def test_twirl_blocks_match_dense(n):
    for kvec in enumerate_weight_vectors(n, k_max=3):
        op = blocks.twirl_operator(n, kvec)
        ref = dense.symmetrized_pauli_dense(n, kvec)
        assert block_residual(op, ref, n) < 1e-12, kvec


@given(st.integers(min_value=2, max_value=6), st.data())
@settings(max_examples=25, deadline=None)
def test_twirl_block_matches_dense_random_weight(n, data):
    kvecs = enumerate_weight_vectors(n, k_max=4)
    kvec = data.draw(st.sampled_from(kvecs))
    m = data.draw(st.integers(min_value=0, max_value=n // 2))
    ref = dense.project_block(dense.symmetrized_pauli_dense(n, kvec), n, m)
    got = blocks.twirl_block(n, kvec, m)
    assert float(np.max(np.abs(got - ref))) < 1e-12


def test_generator_blocks_are_hermitian():
    for n in (3, 6):
        for kind in GENERATOR_KINDS:
            for m, blk in blocks.generator(kind, n).blocks.items():
                assert np.max(np.abs(blk - blk.conj().T)) < 1e-14, (kind, m)


def test_twirl_block_band_and_parity_structure():
    """Ladder moves limit |q - q'| by kx + ky and fix its parity."""
    n = 6
    for kvec in [WeightVector(2, 1, 0), WeightVector(1, 0, 2), WeightVector(0, 3, 1)]:
        width = kvec.kx + kvec.ky
        for m, blk in blocks.twirl_operator(n, kvec).blocks.items():
            d = blk.shape[0]
            for q in range(d):
                for r in range(d):
                    if abs(q - r) > width or (q - r - width) % 2:
                        assert abs(blk[q, r]) < 1e-15, (kvec, m, q, r)


def test_identity_weight_gives_identity_blocks():
    op = blocks.twirl_operator(5, WeightVector(0, 0, 0))
    for m, blk in op.blocks.items():
        np.testing.assert_allclose(blk, np.eye(5 - 2 * m + 1), atol=1e-15)


def test_operator_metadata():
    op = blocks.generator("sum_xx", 7)
    assert op.n == 7
    assert op.sectors == list(range(4))
    assert op.covers_all
    assert op.block(1).shape == (6, 6)


def test_compose_linear_combination():
    n = 4
    terms = [(0.7, blocks.generator("sum_x", n)), (-1.2, blocks.generator("sum_zz", n))]
    op = blocks.compose(terms, name="mix")
    ref = 0.7 * helpers.dense_collective("sum_x", n) - 1.2 * helpers.dense_collective("sum_zz", n)
    assert block_residual(op, ref, n) < 1e-12
    assert op.name == "mix"


def test_compose_sector_intersection_and_errors():
    n = 6
    a = blocks.BlockOperator(n, {0: blocks.generator_block("sum_z", n, 0)})
    b = blocks.generator("sum_x", n)
    mixed = blocks.compose([(1.0, a), (1.0, b)])
    assert mixed.sectors == [0]
    with pytest.raises(ValueError):
        blocks.compose([])
    with pytest.raises(ValueError):
        blocks.compose([(1.0, a), (1.0, blocks.generator("sum_x", 4))])
    c = blocks.BlockOperator(n, {3: blocks.generator_block("sum_z", n, 3)})
    with pytest.raises(ValueError):
        blocks.compose([(1.0, a), (1.0, c)])


def test_norms_match_dense():
    n = 4
    rng = np.random.default_rng(2)
    coeffs = rng.standard_normal(4)
    kinds = ["sum_x", "sum_zz", "global_z", "sum_y"]
    op = blocks.compose([(c, blocks.generator(k, n)) for c, k in zip(coeffs, kinds)])
    ref = sum(c * helpers.dense_collective(k, n) for c, k in zip(coeffs, kinds))
    assert abs(blocks.frobenius_norm_squared(op) - np.sum(np.abs(ref) ** 2)) < 1e-10
    assert abs(blocks.spectral_norm(op) - np.linalg.norm(ref, 2)) < 1e-10


def test_unknown_generator_kind():
    with pytest.raises(ValueError):
        blocks.generator("sum_q", 4)
