import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings, strategies as st

from elasticc3 import BinaryMatrix, joint_from_matrix, kl_divergence, mutual_information
from elasticc3.exceptions import (
    AllZeroMatrix,
    EmptyRow,
    LengthMismatch,
    OutOfRangeAssignment,
)
from elasticc3.prob_core import (
    ClusterJointDistribution,
    JointDistribution,
    aggregate_clusters,
    approximation_divergence,
    col_divergences,
    reference_conditional,
    reference_conditional_col,
    row_divergences,
)

from conftest import dense_mi, random_binary


# -- BinaryMatrix -----------------------------------------------------------

def test_duplicates_collapse():
    m = BinaryMatrix([0, 0, 1], [1, 1, 0], (2, 2))
    assert m.nnz == 2
    assert m.toarray().tolist() == [[0, 1], [1, 0]]


def test_out_of_range_coordinate():
    with pytest.raises(OutOfRangeAssignment):
        BinaryMatrix([0, 2], [0, 0], (2, 2))


def test_from_dense_binarizes():
    m = BinaryMatrix.from_dense(np.array([[3, 0], [0, -1.5]]))
    assert sorted(map(tuple, m.entries)) == [(0, 0), (1, 1)]


def test_from_sparse_roundtrip(rng):
    a = random_binary(rng, 7, 5)
    m = BinaryMatrix.from_sparse(sp.csr_matrix(a))
    np.testing.assert_array_equal(m.toarray(), a)
    assert m == BinaryMatrix.from_dense(a)
    np.testing.assert_array_equal(m.T.toarray(), a.T)


# -- joint_from_matrix ------------------------------------------------------

def test_joint_identity_pattern():
    d = joint_from_matrix(BinaryMatrix([0, 1], [0, 1], (2, 2)))
    np.testing.assert_array_equal(d.to_dense(), [[0.5, 0], [0, 0.5]])
    np.testing.assert_array_equal(d.row_marginal, [0.5, 0.5])


def test_joint_all_ones():
    d = joint_from_matrix(BinaryMatrix.from_dense(np.ones((2, 2))))
    np.testing.assert_array_equal(d.to_dense(), np.full((2, 2), 0.25))
    np.testing.assert_array_equal(d.col_marginal, [0.5, 0.5])


def test_joint_seven_ones(rng):
    a = np.zeros((4, 5), dtype=np.int8)
    a.flat[rng.choice(20, 7, replace=False)] = 1
    d = joint_from_matrix(BinaryMatrix.from_dense(a))
    assert d.nnz == 7
    assert np.all(d.mass.data == 1 / 7)


def test_all_zero_rejected():
    with pytest.raises(AllZeroMatrix):
        joint_from_matrix(BinaryMatrix([], [], (3, 3)))


def test_joint_marginals_consistent(rng):
    d = joint_from_matrix(BinaryMatrix.from_dense(random_binary(rng, 9, 6)))
    dense = d.to_dense()
    assert abs(dense.sum() - 1) < 1e-12
    np.testing.assert_allclose(d.row_marginal, dense.sum(axis=1), atol=1e-12)
    np.testing.assert_allclose(d.col_marginal, dense.sum(axis=0), atol=1e-12)


def test_joint_rejects_unnormalized():
    with pytest.raises(ValueError):
        JointDistribution(sp.csr_matrix(np.array([[0.5, 0.4]])))


# -- mutual information -----------------------------------------------------

def test_mi_perfect_dependence():
    d = joint_from_matrix(BinaryMatrix([0, 1], [0, 1], (2, 2)))
    assert mutual_information(d) == pytest.approx(math.log(2), abs=1e-15)


def test_mi_independent():
    assert mutual_information(ClusterJointDistribution(np.full((2, 2), 0.25))) == 0.0


def test_mi_two_by_two_scalar_oracle():
    # four terms written out: two diagonal cells at 0.4 and two off-diagonal at 0.1,
    # every marginal 0.5
    expected = 2 * 0.4 * math.log(0.4 / 0.25) + 2 * 0.1 * math.log(0.1 / 0.25)
    got = mutual_information(ClusterJointDistribution(np.array([[0.4, 0.1], [0.1, 0.4]])))
    assert got == pytest.approx(expected, abs=1e-15)
    assert expected == pytest.approx(0.19274475702175753, abs=1e-15)


def test_mi_matches_loop(rng):
    for _ in range(20):
        a = random_binary(rng, 8, 6)
        d = joint_from_matrix(BinaryMatrix.from_dense(a))
        assert mutual_information(d) == pytest.approx(dense_mi(a / a.sum()), abs=1e-12)


# -- KL divergence ----------------------------------------------------------

def test_kl_identical():
    assert kl_divergence([0.3, 0.7], [0.3, 0.7]) == 0.0


def test_kl_point_mass():
    assert kl_divergence([1, 0], [0.5, 0.5]) == pytest.approx(math.log(2), abs=1e-15)


def test_kl_two_terms():
    expected = 0.75 * math.log(1.5) + 0.25 * math.log(0.5)
    assert kl_divergence([0.75, 0.25], [0.5, 0.5]) == pytest.approx(expected, abs=1e-15)


def test_kl_infinite_sentinel():
    v = kl_divergence([0.5, 0.5], [1.0, 0.0])
    assert v == np.inf and v > 1e300


def test_kl_length_mismatch():
    with pytest.raises(LengthMismatch):
        kl_divergence([0.5, 0.5], [1 / 3] * 3)


def test_kl_not_probability():
    with pytest.raises(ValueError):
        kl_divergence([0.5, 0.6], [0.5, 0.5])


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(0.01, 1), min_size=2, max_size=6), st.data())
def test_kl_nonnegative(g, data):
    h = data.draw(st.lists(st.floats(0.01, 1), min_size=len(g), max_size=len(g)))
    g = np.array(g) / sum(g)
    h = np.array(h) / sum(h)
    assert kl_divergence(g, h) >= -1e-15


# -- aggregation ------------------------------------------------------------

def test_aggregate_identity(rng):
    d = joint_from_matrix(BinaryMatrix.from_dense(random_binary(rng, 5, 4)))
    c = aggregate_clusters(d, np.arange(5), np.arange(4), 5, 4)
    np.testing.assert_array_equal(c.mass, d.to_dense())


def test_aggregate_single_cluster(rng):
    d = joint_from_matrix(BinaryMatrix.from_dense(random_binary(rng, 5, 4)))
    c = aggregate_clusters(d, np.zeros(5, int), np.zeros(4, int), 1, 1)
    assert c.mass.shape == (1, 1) and c.mass[0, 0] == pytest.approx(1.0, abs=1e-15)


def test_aggregate_block(block):
    d = joint_from_matrix(block)
    c = aggregate_clusters(d, [0, 0, 1, 1], [0, 0, 1, 1], 2, 2)
    np.testing.assert_array_equal(c.mass, [[0.5, 0.0], [0.0, 0.5]])


def test_aggregate_out_of_range(block):
    d = joint_from_matrix(block)
    with pytest.raises(OutOfRangeAssignment):
        aggregate_clusters(d, [0, 0, 1, 2], [0, 0, 1, 1], 2, 2)
    with pytest.raises(LengthMismatch):
        aggregate_clusters(d, [0, 0, 1], [0, 0, 1, 1], 2, 2)


# -- reference conditional --------------------------------------------------

def test_reference_identity_partitions(rng):
    a = random_binary(rng, 5, 4, 0.6)
    a[:, 0] = 1
    d = joint_from_matrix(BinaryMatrix.from_dense(a))
    c = aggregate_clusters(d, np.arange(5), np.arange(4), 5, 4)
    P = d.to_dense()
    for i in range(5):
        np.testing.assert_allclose(reference_conditional(d, c, np.arange(5), np.arange(4), i),
                                   P[i] / P[i].sum(), atol=1e-15)


def test_reference_single_cluster(rng):
    a = random_binary(rng, 5, 4, 0.6)
    a[0, 0] = 1
    d = joint_from_matrix(BinaryMatrix.from_dense(a))
    c = aggregate_clusters(d, np.zeros(5, int), np.zeros(4, int), 1, 1)
    got = reference_conditional(d, c, np.zeros(5, int), np.zeros(4, int), 0)
    np.testing.assert_allclose(got, d.col_marginal, atol=1e-15)


def test_reference_block_scalar_oracle(block):
    d = joint_from_matrix(block)
    r, cc = [0, 0, 1, 1], [0, 0, 1, 1]
    c = aggregate_clusters(d, r, cc, 2, 2)
    # p(x*=0,w*=0)=0.5, p(x*=0)=0.5, p(w)=0.25, p(w*=0)=0.5 -> 0.5/0.5*0.25/0.5
    expected = [0.5 / 0.5 * 0.25 / 0.5, 0.5 / 0.5 * 0.25 / 0.5, 0.0, 0.0]
    np.testing.assert_allclose(reference_conditional(d, c, r, cc, 0), expected, atol=1e-15)
    np.testing.assert_allclose(reference_conditional_col(d, c, r, cc, 3), [0, 0, .5, .5],
                               atol=1e-15)


def test_reference_zero_col_and_empty_row():
    a = np.array([[1, 0, 1], [0, 0, 1], [0, 0, 0]])
    d = joint_from_matrix(BinaryMatrix.from_dense(a))
    r, cc = [0, 1, 1], [0, 1, 1]
    c = aggregate_clusters(d, r, cc, 2, 2)
    v = reference_conditional(d, c, r, cc, 0)
    assert v[1] == 0.0 and v.sum() == pytest.approx(1.0, abs=1e-9)
    with pytest.raises(EmptyRow):
        reference_conditional(d, c, r, cc, 2)
    with pytest.raises(EmptyRow):
        reference_conditional_col(d, c, r, cc, 1)


# -- invariants -------------------------------------------------------------

def _random_state(rng):
    n, k = rng.integers(2, 12, size=2)
    N, K = rng.integers(1, n + 1), rng.integers(1, k + 1)
    a = random_binary(rng, n, k, rng.uniform(0.1, 0.7))
    return a, rng.integers(N, size=n), rng.integers(K, size=k), N, K


def test_data_processing_inequality(rng):
    for _ in range(100):
        a, r, c, N, K = _random_state(rng)
        d = joint_from_matrix(BinaryMatrix.from_dense(a))
        assert mutual_information(aggregate_clusters(d, r, c, N, K)) <= mutual_information(d) + 1e-9


def test_aggregate_preserves_mass(rng):
    for _ in range(50):
        a, r, c, N, K = _random_state(rng)
        d = joint_from_matrix(BinaryMatrix.from_dense(a))
        assert abs(aggregate_clusters(d, r, c, N, K).mass.sum() - 1) < 1e-12


def test_loss_equals_kl_to_approximation(rng):
    for _ in range(100):
        a, r, c, N, K = _random_state(rng)
        d = joint_from_matrix(BinaryMatrix.from_dense(a))
        loss = mutual_information(d) - mutual_information(aggregate_clusters(d, r, c, N, K))
        assert approximation_divergence(d, r, c, N, K) == pytest.approx(loss, abs=1e-9)


def test_row_and_column_decompositions_agree(rng):
    # sum_x p(x) KL(p(W|x) || p*(W|x*)) and its column-side twin both equal the loss
    for _ in range(100):
        a, r, c, N, K = _random_state(rng)
        d = joint_from_matrix(BinaryMatrix.from_dense(a))
        cj = aggregate_clusters(d, r, c, N, K)
        rd = row_divergences(d, cj, c)
        cd = col_divergences(d, cj, r)
        px, pw = d.row_marginal, d.col_marginal
        row_side = sum(px[i] * rd[i, r[i]] for i in range(px.size) if px[i] > 0)
        col_side = sum(pw[j] * cd[j, c[j]] for j in range(pw.size) if pw[j] > 0)
        assert row_side == pytest.approx(col_side, abs=1e-9)
        assert row_side == pytest.approx(approximation_divergence(d, r, c, N, K), abs=1e-9)


def test_row_divergences_match_direct_kl(rng):
    for _ in range(30):
        a, r, c, N, K = _random_state(rng)
        d = joint_from_matrix(BinaryMatrix.from_dense(a))
        cj = aggregate_clusters(d, r, c, N, K)
        div = row_divergences(d, cj, c)
        P = d.to_dense()
        for i in range(P.shape[0]):
            if P[i].sum() == 0:
                assert np.isnan(div[i]).all()
                continue
            g = P[i] / P[i].sum()
            for xs in range(N):
                if cj.row_marginal[xs] == 0:
                    assert div[i, xs] == np.inf
                    continue
                fake = r.copy()
                fake[i] = xs
                h = reference_conditional(d, cj, fake, c, i)
                h = np.where(np.isfinite(h), h, 0.0)
                expected = kl_divergence(g, h / h.sum()) if h.sum() > 0 else np.inf
                if np.isinf(expected):
                    assert div[i, xs] == np.inf
                else:
                    assert div[i, xs] == pytest.approx(expected, abs=1e-9)
