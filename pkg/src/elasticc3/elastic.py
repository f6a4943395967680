"""
Penalized co-clustering of a target matrix with transferred cluster marginals.

The target objective is

    I(Y,Z) - I(Y*,Z*)
        + alpha * [N_A == N_T] * KL(q(Y*) || p(X*))
        + beta * KL(q(Z*) || p(W*))

where ``p(X*)`` and ``p(W*)`` are the row- and column-cluster marginals of the
auxiliary fit.  Each row (column) sweep scores candidates with the KL distance
to the compressed conditional of the previous state, plus the marginal penalty
evaluated with the row tentatively moved while every other row stays at its
live assignment.  The penalty is divided by the item's mass ``q(y)`` (default,
``penalty_normalizer="mass"``), which makes each move an exact descent step on
the penalized objective; ``"cells_x_clusters"`` divides by ``n_T * N_T * q(y)``
instead and gives up that guarantee.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import DimensionMismatch, InvalidClusterCount
from .itcc import (
    DEFAULT_TOL,
    CoClusterState,
    FitReport,
    _argmin_rows,
    _state,
    _validate_counts,
    fit_restarts,
    itcc_fit,
)
from .prob_core import (
    JointDistribution,
    as_joint,
    col_divergences,
    kl_rows,
    mutual_information,
    row_divergences,
)

__all__ = [
    "TransferConfig",
    "AuxiliaryKnowledge",
    "extract_knowledge",
    "transfer_objective",
    "update_rows_target",
    "update_cols_target",
    "elastic_fit",
    "elastic_c3",
]


PENALTY_NORMALIZERS = ("mass", "cells_x_clusters")


@dataclass(frozen=True)
class TransferConfig:
    """Hyper-parameters of the two-stage fit.

    ``alpha`` weights the row-marginal penalty (only active when
    ``N_A == N_T``), ``beta`` the feature-cluster-marginal penalty.
    """

    alpha: float = 0.0
    beta: float = 0.0
    K: int = 3
    N_A: int = 2
    N_T: int = 2
    I_A: int = 10
    I_T: int = 10
    seed: int = 0
    restarts: int = 8
    penalty_normalizer: str = "mass"

    def __post_init__(self):
        if self.penalty_normalizer not in PENALTY_NORMALIZERS:
            raise ValueError(f"penalty_normalizer must be one of {PENALTY_NORMALIZERS}")
        if not (self.alpha >= 0 and self.beta >= 0):
            raise ValueError("alpha and beta must be nonnegative")
        for name in ("K", "N_A", "N_T", "I_A", "I_T", "restarts"):
            if int(getattr(self, name)) < 1:
                raise InvalidClusterCount(f"{name} must be >= 1")

    def penalty_scale(self, n_cells):
        """Extra divisor on the per-item penalty besides the item's own mass."""
        if self.penalty_normalizer == "mass":
            return 1.0
        return float(n_cells * self.N_T)

    @property
    def row_penalty_active(self):
        return self.N_A == self.N_T and self.alpha > 0


@dataclass(frozen=True)
class AuxiliaryKnowledge:
    """Cluster marginals ``p(X*)`` and ``p(W*)`` carried over from the auxiliary fit."""

    row_cluster_marginal: np.ndarray
    col_cluster_marginal: np.ndarray

    def __post_init__(self):
        for name in ("row_cluster_marginal", "col_cluster_marginal"):
            v = np.array(getattr(self, name), dtype=np.float64).ravel()
            if v.size == 0 or (v < 0).any() or abs(v.sum() - 1.0) > 1e-9:
                raise ValueError(f"{name} must be a probability vector")
            v.setflags(write=False)
            object.__setattr__(self, name, v)

    @property
    def N_A(self):
        return self.row_cluster_marginal.size

    @property
    def K(self):
        return self.col_cluster_marginal.size

    def to_dict(self):
        return {"row_cluster_marginal": self.row_cluster_marginal.tolist(),
                "col_cluster_marginal": self.col_cluster_marginal.tolist()}

    @classmethod
    def from_dict(cls, payload):
        return cls(np.asarray(payload["row_cluster_marginal"], dtype=np.float64),
                   np.asarray(payload["col_cluster_marginal"], dtype=np.float64))


def extract_knowledge(aux_fit) -> AuxiliaryKnowledge:
    """Copy the cluster marginals out of an auxiliary :class:`FitReport` (or state)."""
    state = aux_fit.state if isinstance(aux_fit, FitReport) else aux_fit
    cj = state.cluster_joint
    return AuxiliaryKnowledge(cj.row_marginal.copy(), cj.col_marginal.copy())


def _check_dims(knowledge: AuxiliaryKnowledge, config: TransferConfig, K=None):
    if knowledge.K != config.K:
        raise DimensionMismatch(
            f"auxiliary knowledge has {knowledge.K} feature clusters, config K={config.K}")
    if knowledge.N_A != config.N_A:
        raise DimensionMismatch(
            f"auxiliary knowledge has {knowledge.N_A} cell clusters, config N_A={config.N_A}")
    if K is not None and K != config.K:
        raise DimensionMismatch(f"state has {K} column clusters, config K={config.K}")


def _penalties(state, knowledge, config):
    pen = 0.0
    cj = state.cluster_joint
    if config.row_penalty_active:
        pen += config.alpha * kl_rows(cj.row_marginal, knowledge.row_cluster_marginal)[0]
    if config.beta > 0:
        pen += config.beta * kl_rows(cj.col_marginal, knowledge.col_cluster_marginal)[0]
    return pen


def transfer_objective(state: CoClusterState, target_joint: JointDistribution,
                       knowledge: AuxiliaryKnowledge, config: TransferConfig) -> float:
    """Penalized target objective; an infinite divergence propagates as ``inf``.

    Zero-weight penalties are skipped outright, so with ``alpha = beta = 0``
    the value is bit-identical to the plain co-clustering loss.
    """
    _check_dims(knowledge, config, state.n_col_clusters)
    loss = mutual_information(target_joint) - mutual_information(state.cluster_joint)
    pen = _penalties(state, knowledge, config)
    return loss + pen if pen else loss


def _penalized_assign(div, mass, assign, n_clusters, reference, weight, scale):
    """Sequential argmin of ``div[y, j] + weight * KL(tentative || reference) / (scale * mass[y])``.

    ``div`` is fixed for the whole sweep; the marginal inside the penalty is
    kept live as rows move.  Candidate ``j`` for row ``y`` is the current
    marginal with ``y``'s mass moved into ``j``.
    """
    assign = np.array(assign, dtype=np.int64)
    members = np.bincount(assign, minlength=n_clusters)
    marg = np.bincount(assign, weights=mass, minlength=n_clusters)
    idx = np.arange(n_clusters)
    for y in range(assign.size):
        q = mass[y]
        if not q > 0:
            continue
        c = assign[y]
        tent = np.repeat(marg[None, :], n_clusters, axis=0)
        tent[:, c] -= q
        if members[c] == 1:
            tent[:, c] = 0.0
        tent[idx, idx] += q
        tent[c] = marg
        np.maximum(tent, 0.0, out=tent)
        score = div[y] + weight * kl_rows(tent, reference) / (scale * q)
        if np.isinf(score).all():
            score = div[y]
        j = int(np.argmin(score))
        if j != c:
            marg = tent[j].copy()
            members[c] -= 1
            members[j] += 1
            assign[y] = j
    return assign


def update_rows_target(state: CoClusterState, target_joint: JointDistribution,
                       knowledge: AuxiliaryKnowledge, config: TransferConfig) -> CoClusterState:
    """Row sweep on the target with the ``alpha`` marginal penalty.

    Rows are visited in index order.  With the penalty inactive (``alpha = 0``
    or ``N_A != N_T``) this is exactly :func:`elasticc3.itcc.update_rows`.
    """
    _check_dims(knowledge, config, state.n_col_clusters)
    d = target_joint
    div = row_divergences(d, state.cluster_joint, state.col_assign)
    if config.row_penalty_active:
        new = _penalized_assign(div, d.row_marginal, state.row_assign, state.n_row_clusters,
                                knowledge.row_cluster_marginal, config.alpha,
                                config.penalty_scale(d.n_rows))
    else:
        new = _argmin_rows(div, state.row_assign, d.row_marginal)
    return _state(d, new, state.col_assign, state.n_row_clusters, state.n_col_clusters)


def update_cols_target(state: CoClusterState, target_joint: JointDistribution,
                       knowledge: AuxiliaryKnowledge, config: TransferConfig) -> CoClusterState:
    """Column sweep on the target with the ``beta`` feature-cluster penalty.

    Uses the same normalizer as the row sweep (``q(z)``, or ``n_T * N_T * q(z)``).
    """
    _check_dims(knowledge, config, state.n_col_clusters)
    d = target_joint
    div = col_divergences(d, state.cluster_joint, state.row_assign)
    if config.beta > 0:
        new = _penalized_assign(div, d.col_marginal, state.col_assign, state.n_col_clusters,
                                knowledge.col_cluster_marginal, config.beta,
                                config.penalty_scale(d.n_rows))
    else:
        new = _argmin_rows(div, state.col_assign, d.col_marginal)
    return _state(d, state.row_assign, new, state.n_row_clusters, state.n_col_clusters)


def elastic_fit(target, knowledge: AuxiliaryKnowledge, config: TransferConfig,
                tol: float = DEFAULT_TOL) -> FitReport:
    """Fit the target co-clustering under the penalized objective.

    Each restart draws random labels exactly as :func:`elasticc3.itcc.itcc_fit`
    does for the same seed, then alternates the penalized row and column
    sweeps for up to ``config.I_T`` iterations.  The trace records the
    penalized objective.
    """
    d = as_joint(target)
    _validate_counts(d, config.N_T, config.K, config.I_T, config.restarts)
    _check_dims(knowledge, config)

    def step(state):
        state = update_rows_target(state, d, knowledge, config)
        return update_cols_target(state, d, knowledge, config)

    def objective(state):
        return transfer_objective(state, d, knowledge, config)

    return fit_restarts(d, config.N_T, config.K, config.I_T, config.seed, config.restarts,
                        step, objective, tol)


def elastic_c3(aux, target, config: TransferConfig, aux_fit: FitReport | None = None):
    """Run both stages: co-cluster ``aux``, then transfer its marginals to ``target``.

    Returns ``(aux_fit, target_fit)``.  Pass ``aux_fit`` to reuse an existing
    auxiliary fit.
    """
    if aux_fit is None:
        aux_fit = itcc_fit(aux, config.N_A, config.K, iterations=config.I_A,
                           seed=config.seed, restarts=config.restarts)
    knowledge = extract_knowledge(aux_fit)
    return aux_fit, elastic_fit(target, knowledge, config)
