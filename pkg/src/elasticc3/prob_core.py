"""
Sparse binary matrices and the information-theoretic quantities built on them.

A binary cell x feature matrix induces the empirical joint distribution
``p(x, w) = A[x, w] / nnz(A)``.  Co-clustering compresses that joint into a
small cluster-level joint; everything the two fitting stages need is here:

* :class:`BinaryMatrix`         -- deduplicated 0/1 coordinates with CSR/CSC indexes
* :class:`JointDistribution`    -- sparse joint with cached marginals
* :class:`ClusterJointDistribution` -- dense (row cluster x column cluster) joint
* :func:`mutual_information`, :func:`kl_divergence`
* :func:`aggregate_clusters`, :func:`reference_conditional`,
  :func:`row_divergences` (all candidate clusters at once)

All logarithms are natural (nats).  Terms with zero mass contribute zero and a
positive mass against a zero reference yields ``numpy.inf``, which orders above
every finite value.
"""
from __future__ import annotations

import numpy as np
import scipy.sparse as sparse

from .exceptions import (
    AllZeroMatrix,
    DimensionMismatch,
    EmptyRow,
    LengthMismatch,
    OutOfRangeAssignment,
)

__all__ = [
    "BinaryMatrix",
    "JointDistribution",
    "ClusterJointDistribution",
    "joint_from_matrix",
    "mutual_information",
    "kl_divergence",
    "kl_rows",
    "aggregate_clusters",
    "reference_conditional",
    "reference_conditional_col",
    "row_divergences",
    "col_divergences",
    "approximation_divergence",
]


def _frozen(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


class BinaryMatrix:
    """Sparse 0/1 matrix with rows as cells and columns as features.

    Duplicate coordinates collapse to a single 1.  Instances are immutable.

    Parameters
    ----------
    rows, cols : array_like of int
        Coordinates of the 1-entries.
    shape : tuple of int
        ``(n_rows, n_cols)``.
    """

    def __init__(self, rows, cols, shape):
        n_rows, n_cols = (int(s) for s in shape)
        if n_rows < 0 or n_cols < 0:
            raise ValueError(f"negative shape {shape}")
        rows = np.asarray(rows, dtype=np.int64).ravel()
        cols = np.asarray(cols, dtype=np.int64).ravel()
        if rows.shape != cols.shape:
            raise LengthMismatch("rows and cols must have the same length")
        if rows.size:
            bad = (rows < 0) | (rows >= n_rows) | (cols < 0) | (cols >= n_cols)
            if bad.any():
                k = int(np.flatnonzero(bad)[0])
                raise OutOfRangeAssignment(
                    f"coordinate ({rows[k]}, {cols[k]}) outside shape {(n_rows, n_cols)}")
        csr = sparse.csr_matrix(
            (np.ones(rows.size, dtype=np.int64), (rows, cols)), shape=(n_rows, n_cols))
        csr.sum_duplicates()
        csr.data[:] = 1
        csr.sort_indices()
        self._csr = csr
        self.shape = (n_rows, n_cols)

    @classmethod
    def from_dense(cls, array):
        """Binarize a dense array: every nonzero cell becomes 1."""
        a = np.asarray(array)
        if a.ndim != 2:
            raise ValueError("expected a 2-D array")
        r, c = np.nonzero(a)
        return cls(r, c, a.shape)

    @classmethod
    def from_sparse(cls, matrix):
        """Binarize any scipy sparse matrix (explicit zeros are dropped)."""
        coo = sparse.coo_matrix(matrix)
        keep = coo.data != 0
        return cls(coo.row[keep], coo.col[keep], coo.shape)

    @property
    def n_rows(self):
        return self.shape[0]

    @property
    def n_cols(self):
        return self.shape[1]

    @property
    def nnz(self):
        return int(self._csr.nnz)

    @property
    def entries(self):
        """``(nnz, 2)`` array of ``(row, col)`` coordinates in row-major order."""
        coo = self._csr.tocoo()
        return _frozen(np.column_stack([coo.row, coo.col]).astype(np.int64))

    @property
    def csr(self):
        return self._csr.copy()

    @property
    def csc(self):
        return self._csr.tocsc()

    def row_counts(self):
        return np.diff(self._csr.indptr)

    def col_counts(self):
        return np.bincount(self._csr.indices, minlength=self.n_cols)

    def toarray(self):
        return self._csr.toarray().astype(np.int8)

    def transpose(self):
        coo = self._csr.tocoo()
        return BinaryMatrix(coo.col, coo.row, (self.n_cols, self.n_rows))

    @property
    def T(self):
        return self.transpose()

    def select_columns(self, columns):
        columns = np.asarray(columns, dtype=np.int64)
        sub = self._csr[:, columns]
        return BinaryMatrix.from_sparse(sub)

    def __eq__(self, other):
        if not isinstance(other, BinaryMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self.entries, other.entries)

    def __hash__(self):
        return hash((self.shape, self.entries.tobytes()))

    def __repr__(self):
        return f"BinaryMatrix(shape={self.shape}, nnz={self.nnz})"


class JointDistribution:
    """Sparse joint probability over (row, column) with cached marginals.

    ``mass`` is stored as a CSR matrix of strictly positive probabilities.
    Construct from a binary matrix with :func:`joint_from_matrix` or directly
    from any nonnegative array that already sums to one.
    """

    def __init__(self, mass, tol=1e-12):
        m = sparse.csr_matrix(mass, dtype=np.float64)
        m.sum_duplicates()
        m.eliminate_zeros()
        m.sort_indices()
        if m.nnz == 0:
            raise AllZeroMatrix("joint distribution has no mass")
        if (m.data < 0).any() or (m.data > 1).any():
            raise ValueError("masses must lie in (0, 1]")
        total = m.data.sum()
        if abs(total - 1.0) > tol:
            raise ValueError(f"total mass {total!r} differs from 1")
        self.mass = m
        self.shape = m.shape
        self.row_marginal = _frozen(np.asarray(m.sum(axis=1)).ravel())
        self.col_marginal = _frozen(np.asarray(m.sum(axis=0)).ravel())
        self._mi = None

    @property
    def n_rows(self):
        return self.shape[0]

    @property
    def n_cols(self):
        return self.shape[1]

    @property
    def nnz(self):
        return int(self.mass.nnz)

    def to_dense(self):
        return self.mass.toarray()

    def transpose(self):
        t = JointDistribution.__new__(JointDistribution)
        t.mass = self.mass.T.tocsr()
        t.mass.sort_indices()
        t.shape = (self.shape[1], self.shape[0])
        t.row_marginal = self.col_marginal
        t.col_marginal = self.row_marginal
        t._mi = self._mi
        return t

    @property
    def T(self):
        return self.transpose()

    def __repr__(self):
        return f"JointDistribution(shape={self.shape}, nnz={self.nnz})"


class ClusterJointDistribution:
    """Dense joint over (row cluster, column cluster); empty clusters carry zeros."""

    def __init__(self, mass):
        mass = np.array(mass, dtype=np.float64)
        if mass.ndim != 2:
            raise ValueError("cluster joint must be 2-D")
        if (mass < 0).any():
            raise ValueError("cluster masses must be nonnegative")
        self.mass = _frozen(mass)
        self.row_marginal = _frozen(mass.sum(axis=1))
        self.col_marginal = _frozen(mass.sum(axis=0))

    @property
    def n_row_clusters(self):
        return self.mass.shape[0]

    @property
    def n_col_clusters(self):
        return self.mass.shape[1]

    def transpose(self):
        return ClusterJointDistribution(self.mass.T)

    @property
    def T(self):
        return self.transpose()

    def __repr__(self):
        return f"ClusterJointDistribution(shape={self.mass.shape})"


def joint_from_matrix(m: BinaryMatrix) -> JointDistribution:
    """Empirical joint of a binary matrix: mass ``1/nnz`` on every 1-entry."""
    if m.nnz == 0:
        raise AllZeroMatrix("matrix has no nonzero entries")
    p = m.csr.astype(np.float64)
    p.data[:] = 1.0 / m.nnz
    return JointDistribution(p)


def as_joint(data) -> JointDistribution:
    if isinstance(data, JointDistribution):
        return data
    if isinstance(data, BinaryMatrix):
        return joint_from_matrix(data)
    raise TypeError(f"expected BinaryMatrix or JointDistribution, got {type(data).__name__}")


def _mi_terms(mass, row_marg, col_marg):
    with np.errstate(divide="ignore", invalid="ignore"):
        return mass * np.log(mass / (row_marg * col_marg))


def mutual_information(d) -> float:
    """Mutual information in nats; only cells with nonzero mass contribute."""
    if isinstance(d, JointDistribution):
        if d._mi is None:
            coo = d.mass.tocoo()
            terms = _mi_terms(coo.data, d.row_marginal[coo.row], d.col_marginal[coo.col])
            d._mi = max(float(terms.sum()), 0.0)
        return d._mi
    if isinstance(d, ClusterJointDistribution):
        i, j = np.nonzero(d.mass)
        terms = _mi_terms(d.mass[i, j], d.row_marginal[i], d.col_marginal[j])
        return max(float(terms.sum()), 0.0)
    raise TypeError(f"unsupported distribution type {type(d).__name__}")


def kl_rows(P, h):
    """KL divergence of every row of ``P`` against the vector ``h``.

    No validation; zero rows entries contribute 0, positive-against-zero gives inf.
    """
    P = np.atleast_2d(np.asarray(P, dtype=np.float64))
    h = np.asarray(h, dtype=np.float64)
    pos = P > 0
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(pos, P * np.log(P / h), 0.0)
    return terms.sum(axis=1)


def kl_divergence(g, h, tol=1e-9) -> float:
    """``D_KL(g || h) = sum g ln(g / h)`` in nats.

    Returns ``inf`` when ``g`` puts mass where ``h`` has none.

    Raises
    ------
    LengthMismatch
        If ``g`` and ``h`` differ in length.
    """
    g = np.asarray(g, dtype=np.float64).ravel()
    h = np.asarray(h, dtype=np.float64).ravel()
    if g.shape != h.shape:
        raise LengthMismatch(f"length {g.size} vs {h.size}")
    for name, v in (("g", g), ("h", h)):
        if (v < 0).any() or abs(v.sum() - 1.0) > tol:
            raise ValueError(f"{name} is not a probability vector")
    return float(kl_rows(g[None, :], h)[0])


def _check_assign(assign, length, n_clusters, what):
    a = np.asarray(assign)
    if a.shape != (length,):
        raise LengthMismatch(f"{what} assignment has shape {a.shape}, expected ({length},)")
    if not np.issubdtype(a.dtype, np.integer):
        if not np.all(np.equal(np.mod(a, 1), 0)):
            raise OutOfRangeAssignment(f"{what} assignment must be integer")
    a = a.astype(np.int64)
    if length and (a.min() < 0 or a.max() >= n_clusters):
        raise OutOfRangeAssignment(
            f"{what} assignment values must lie in [0, {n_clusters}); got [{a.min()}, {a.max()}]")
    return a


def aggregate_clusters(d: JointDistribution, row_assign, col_assign,
                       n_row_clusters: int, n_col_clusters: int) -> ClusterJointDistribution:
    """Sum the joint mass inside every (row cluster, column cluster) block."""
    r = _check_assign(row_assign, d.n_rows, n_row_clusters, "row")
    c = _check_assign(col_assign, d.n_cols, n_col_clusters, "column")
    return _aggregate(d, r, c, n_row_clusters, n_col_clusters)


def _aggregate(d, r, c, N, K):
    coo = d.mass.tocoo()
    flat = r[coo.row] * K + c[coo.col]
    mass = np.bincount(flat, weights=coo.data, minlength=N * K).reshape(N, K)
    return ClusterJointDistribution(mass)


def reference_conditional(d: JointDistribution, c: ClusterJointDistribution,
                          row_assign, col_assign, i: int):
    """Compressed conditional over columns for the cluster that holds row ``i``.

    ``p*(w | x*) = p(x*, w*) / p(x*) * p(w) / p(w*)`` with ``x* = row_assign[i]``
    and ``w* = col_assign[w]``.
    """
    r = _check_assign(row_assign, d.n_rows, c.n_row_clusters, "row")
    cc = _check_assign(col_assign, d.n_cols, c.n_col_clusters, "column")
    if d.row_marginal[i] <= 0:
        raise EmptyRow(f"row {i} has zero marginal mass")
    xs = r[i]
    px_star = c.row_marginal[xs]
    pw_star = c.col_marginal[cc]
    pw = d.col_marginal
    with np.errstate(divide="ignore", invalid="ignore"):
        out = c.mass[xs, cc] / px_star * pw / pw_star
    return np.where(pw > 0, out, 0.0)


def reference_conditional_col(d: JointDistribution, c: ClusterJointDistribution,
                              row_assign, col_assign, j: int):
    """Column counterpart ``p*(x | w*)`` for the cluster holding column ``j``."""
    if d.col_marginal[j] <= 0:
        raise EmptyRow(f"column {j} has zero marginal mass")
    return reference_conditional(d.T, c.T, col_assign, row_assign, j)


def row_divergences(d: JointDistribution, c: ClusterJointDistribution, col_assign):
    """``D_KL(p(W|x) || p*(W|x*))`` for every row ``x`` and every row cluster ``x*``.

    Returns an ``(n_rows, n_row_clusters)`` array.  Rows with zero mass get NaN.
    Cost is O(nnz + n_rows * N * K).
    """
    n, K = d.n_rows, c.n_col_clusters
    cc = np.asarray(col_assign, dtype=np.int64)
    if cc.shape != (d.n_cols,):
        raise DimensionMismatch("column assignment does not match the joint")
    if c.n_col_clusters != K:
        raise DimensionMismatch("cluster joint does not match column cluster count")
    px = d.row_marginal
    pw = d.col_marginal
    coo = d.mass.tocoo()
    with np.errstate(divide="ignore", invalid="ignore"):
        # sum_w p(x,w) ln(p(x,w) / (p(x) p(w))), later divided by p(x)
        h = np.bincount(coo.row, weights=_mi_terms(coo.data, px[coo.row], pw[coo.col]),
                        minlength=n)
        agg = np.bincount(coo.row * K + cc[coo.col], weights=coo.data,
                          minlength=n * K).reshape(n, K)
        h = h / px
        M = agg / px[:, None]
        # ln(p(x*) p(w*) / p(x*, w*)) for every cluster pair
        L = np.log(c.row_marginal[:, None] * c.col_marginal[None, :] / c.mass)
    finite = np.isfinite(L)
    # empty column clusters have M == 0 on every row, so their L never matters
    Lf = np.where(finite, L, 0.0)
    out = h[:, None] + M @ Lf.T
    blocked = (M > 0).astype(np.float64) @ (~finite).astype(np.float64).T
    out[blocked > 0] = np.inf
    out[px <= 0] = np.nan
    return out


def col_divergences(d: JointDistribution, c: ClusterJointDistribution, row_assign):
    """``D_KL(p(X|w) || p*(X|w*))`` for every column and column cluster."""
    return row_divergences(d.T, c.T, row_assign)


def approximation_divergence(d: JointDistribution, row_assign, col_assign,
                             n_row_clusters: int, n_col_clusters: int) -> float:
    """``D_KL(p(X,W) || p*(X,W))`` evaluated entry by entry over the support of ``p``.

    ``p*(x, w) = p(x*, w*) p(x) / p(x*) * p(w) / p(w*)``.  Equals the
    mutual-information loss of the co-clustering.
    """
    r = _check_assign(row_assign, d.n_rows, n_row_clusters, "row")
    cc = _check_assign(col_assign, d.n_cols, n_col_clusters, "column")
    c = _aggregate(d, r, cc, n_row_clusters, n_col_clusters)
    coo = d.mass.tocoo()
    xs, ws = r[coo.row], cc[coo.col]
    q = (c.mass[xs, ws] * d.row_marginal[coo.row] / c.row_marginal[xs]
         * d.col_marginal[coo.col] / c.col_marginal[ws])
    return float(np.sum(coo.data * np.log(coo.data / q)))
