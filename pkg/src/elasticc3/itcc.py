"""
Information-theoretic co-clustering of a single matrix.

Rows and columns are alternately reassigned to the cluster whose compressed
conditional is closest in KL divergence; the loss ``I(X,W) - I(X*,W*)`` never
increases.  :func:`itcc_fit` runs several seeded restarts and keeps the best.

The alternation loop in :func:`run_alternation` is shared with the transfer
stage, so a transfer fit with zero penalty weights follows exactly the same
arithmetic as a plain fit on the target matrix.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .exceptions import InvalidClusterCount
from .prob_core import (
    ClusterJointDistribution,
    JointDistribution,
    _aggregate,
    _check_assign,
    as_joint,
    col_divergences,
    mutual_information,
    row_divergences,
)

__all__ = [
    "CoClusterState",
    "FitReport",
    "make_state",
    "itcc_objective",
    "update_rows",
    "update_cols",
    "itcc_fit",
    "itcc_from_init",
    "initial_labels",
    "run_alternation",
]

DEFAULT_TOL = 1e-10


@dataclass(frozen=True)
class CoClusterState:
    """Row/column assignments plus the cluster joint they induce.

    ``objective`` is the mutual-information loss ``I(data) - I(cluster_joint)``.
    """

    row_assign: np.ndarray
    col_assign: np.ndarray
    cluster_joint: ClusterJointDistribution
    objective: float

    @property
    def n_row_clusters(self):
        return self.cluster_joint.n_row_clusters

    @property
    def n_col_clusters(self):
        return self.cluster_joint.n_col_clusters


@dataclass
class FitReport:
    """Outcome of a fit: the winning restart and its per-iteration objective.

    ``objective_trace[0]`` is the objective of the initial assignment and
    ``objective_trace[i]`` the value after iteration ``i``.
    """

    state: CoClusterState
    objective_trace: np.ndarray
    iterations_run: int
    converged: bool
    restart: int = 0
    restart_objectives: np.ndarray = field(default_factory=lambda: np.zeros(0))

    @property
    def final_objective(self):
        return float(self.objective_trace[-1])


def make_state(data, row_assign, col_assign, n_row_clusters, n_col_clusters) -> CoClusterState:
    """Build a consistent state from raw assignments."""
    d = as_joint(data)
    r = _check_assign(row_assign, d.n_rows, n_row_clusters, "row")
    c = _check_assign(col_assign, d.n_cols, n_col_clusters, "column")
    return _state(d, r, c, n_row_clusters, n_col_clusters)


def _state(d, r, c, N, K):
    r = np.array(r, dtype=np.int64)
    c = np.array(c, dtype=np.int64)
    r.setflags(write=False)
    c.setflags(write=False)
    cj = _aggregate(d, r, c, N, K)
    return CoClusterState(r, c, cj, mutual_information(d) - mutual_information(cj))


def itcc_objective(state: CoClusterState, data_joint: JointDistribution) -> float:
    """Loss in mutual information, ``I(X,W) - I(X*,W*)``."""
    return mutual_information(data_joint) - mutual_information(state.cluster_joint)


def _argmin_rows(div, current, mass):
    # nonempty rows always have a finite score for their own cluster
    new = np.argmin(div, axis=1)
    empty = ~(mass > 0)
    new[empty] = current[empty]
    return new


def update_rows(state: CoClusterState, data_joint: JointDistribution) -> CoClusterState:
    """Reassign every row to its KL-closest row cluster.

    All rows are scored against the compressed conditionals of the incoming
    ``state``; the returned state carries the refreshed cluster joint.  Ties go
    to the lowest cluster index and zero-mass rows keep their cluster.
    """
    div = row_divergences(data_joint, state.cluster_joint, state.col_assign)
    new = _argmin_rows(div, state.row_assign, data_joint.row_marginal)
    return _state(data_joint, new, state.col_assign,
                  state.n_row_clusters, state.n_col_clusters)


def update_cols(state: CoClusterState, data_joint: JointDistribution) -> CoClusterState:
    """Column counterpart of :func:`update_rows`."""
    div = col_divergences(data_joint, state.cluster_joint, state.row_assign)
    new = _argmin_rows(div, state.col_assign, data_joint.col_marginal)
    return _state(data_joint, state.row_assign, new,
                  state.n_row_clusters, state.n_col_clusters)


def initial_labels(rng: np.random.Generator, n: int, n_clusters: int, max_tries: int = 1000):
    """Uniform random labels, resampled until every cluster is used (when ``n >= n_clusters``)."""
    labels = rng.integers(n_clusters, size=n)
    if n < n_clusters:
        return labels
    for _ in range(max_tries):
        if np.unique(labels).size == n_clusters:
            return labels
        labels = rng.integers(n_clusters, size=n)
    # rejection is hopeless when n is close to n_clusters
    labels = np.concatenate([np.arange(n_clusters), rng.integers(n_clusters, size=n - n_clusters)])
    rng.shuffle(labels)
    return labels


def _improvement(prev, cur):
    if np.isinf(prev) and np.isinf(cur):
        return 0.0
    return prev - cur


def run_alternation(state: CoClusterState, step: Callable, objective: Callable,
                    iterations: int, tol: float = DEFAULT_TOL):
    """Iterate ``step`` until the objective stops improving by at least ``tol``.

    Returns ``(state, trace, iterations_run, converged)``.
    """
    trace = [objective(state)]
    converged = False
    it = 0
    for it in range(1, iterations + 1):
        state = step(state)
        trace.append(objective(state))
        if _improvement(trace[-2], trace[-1]) < tol:
            converged = True
            break
    return state, np.asarray(trace, dtype=np.float64), it, converged


def fit_restarts(d, N, K, iterations, seed, restarts, step, objective, tol=DEFAULT_TOL):
    """Seeded restarts over :func:`run_alternation`; the lowest final objective wins.

    Ties between restarts go to the lower restart index.
    """
    best = None
    finals = []
    for idx, ss in enumerate(np.random.SeedSequence(seed).spawn(restarts)):
        rng = np.random.default_rng(ss)
        r = initial_labels(rng, d.n_rows, N)
        c = initial_labels(rng, d.n_cols, K)
        state, trace, its, conv = run_alternation(_state(d, r, c, N, K), step, objective,
                                                  iterations, tol)
        finals.append(trace[-1])
        if best is None or trace[-1] < best.objective_trace[-1]:
            best = FitReport(state, trace, its, conv, restart=idx)
    best.restart_objectives = np.asarray(finals)
    return best


def _validate_counts(d, N, K, iterations, restarts):
    if not (1 <= N <= d.n_rows):
        raise InvalidClusterCount(f"row cluster count {N} outside [1, {d.n_rows}]")
    if not (1 <= K <= d.n_cols):
        raise InvalidClusterCount(f"column cluster count {K} outside [1, {d.n_cols}]")
    if iterations < 1:
        raise InvalidClusterCount("iteration budget must be >= 1")
    if restarts < 1:
        raise InvalidClusterCount("restart count must be >= 1")


def _plain_step(d):
    def step(state):
        return update_cols(update_rows(state, d), d)
    return step


def itcc_fit(m, N: int, K: int, iterations: int = 10, seed=0, restarts: int = 8,
             tol: float = DEFAULT_TOL) -> FitReport:
    """Co-cluster a matrix into ``N`` row clusters and ``K`` column clusters.

    Parameters
    ----------
    m : BinaryMatrix or JointDistribution
    N, K : int
        Row and column cluster counts.
    iterations : int
        Maximum number of row-then-column sweeps per restart.
    seed : int or None
        Seeds every restart through :class:`numpy.random.SeedSequence`.
    restarts : int
        Independent random initializations.
    tol : float
        Stop once an iteration improves the loss by less than this.

    Returns
    -------
    FitReport
        The restart with the lowest final loss.
    """
    d = as_joint(m)
    _validate_counts(d, N, K, iterations, restarts)
    return fit_restarts(d, N, K, iterations, seed, restarts, _plain_step(d),
                        lambda s: s.objective, tol)


def itcc_from_init(m, row_assign, col_assign, N: int, K: int, iterations: int = 10,
                   tol: float = DEFAULT_TOL) -> FitReport:
    """Single deterministic run from given initial assignments."""
    d = as_joint(m)
    state = make_state(d, row_assign, col_assign, N, K)
    state, trace, its, conv = run_alternation(state, _plain_step(d), lambda s: s.objective,
                                              iterations, tol)
    return FitReport(state, trace, its, conv, restart_objectives=trace[-1:])
