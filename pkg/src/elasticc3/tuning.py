"""
Exhaustive grid search over ``(alpha, beta, K)``.

The auxiliary matrix is co-clustered once per ``K`` and reused for every
``(alpha, beta)`` pair.  Selection is either against reference labels
(``labeled:<metric>``, maximized) or unsupervised
(``unsupervised:target_loss``, the target's mutual-information loss without
penalty terms, minimized).  Ties go to the smaller ``alpha``, then ``beta``,
then ``K``.
"""
from __future__ import annotations

import io
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .elastic import TransferConfig, elastic_fit, extract_knowledge
from .exceptions import InvalidParams, LengthMismatch, MissingLabels
from .itcc import FitReport, itcc_fit
from .metrics import evaluate
from .prob_core import as_joint, mutual_information

__all__ = ["GridSpec", "GridRecord", "GridResult", "grid_search", "CRITERIA",
           "DEFAULT_ALPHAS", "DEFAULT_BETAS", "DEFAULT_KS", "default_workers"]

CRITERIA = ("labeled:purity", "labeled:nmi", "labeled:ari", "labeled:ri",
            "unsupervised:target_loss")
DEFAULT_ALPHAS = (0.0, 0.01, 0.05, 0.1, 0.5, 0.9, 1.0)
DEFAULT_BETAS = DEFAULT_ALPHAS
DEFAULT_KS = tuple(range(2, 10))
WORKERS_ENV = "ELASTICC3_WORKERS"


def default_workers():
    try:
        return max(1, int(os.environ.get(WORKERS_ENV, "1")))
    except ValueError:
        return 1


@dataclass(frozen=True)
class GridSpec:
    alpha_values: tuple = DEFAULT_ALPHAS
    beta_values: tuple = DEFAULT_BETAS
    k_values: tuple = DEFAULT_KS
    criterion: str = "unsupervised:target_loss"
    enforce_domain: bool = True

    def __post_init__(self):
        for name in ("alpha_values", "beta_values", "k_values"):
            vals = tuple(getattr(self, name))
            if not vals:
                raise InvalidParams(f"{name} must be nonempty")
            object.__setattr__(self, name, vals)
        if self.criterion not in CRITERIA:
            raise InvalidParams(f"criterion must be one of {CRITERIA}")
        if any(v < 0 for v in self.alpha_values + self.beta_values):
            raise InvalidParams("alpha and beta must be nonnegative")
        if any(int(k) != k or k < 1 for k in self.k_values):
            raise InvalidParams("K values must be positive integers")
        if self.enforce_domain:
            if any(v > 1 for v in self.alpha_values + self.beta_values):
                raise InvalidParams("alpha and beta must lie in [0, 1] (set enforce_domain=False)")
            if any(k >= 10 for k in self.k_values):
                raise InvalidParams("K must lie in [1, 10) (set enforce_domain=False)")

    @property
    def labeled(self):
        return self.criterion.startswith("labeled:")

    @property
    def size(self):
        return len(self.alpha_values) * len(self.beta_values) * len(self.k_values)


@dataclass
class GridRecord:
    alpha: float
    beta: float
    K: int
    criterion_value: float
    objective: float
    target_loss: float
    iterations_run: int
    converged: bool
    metrics: dict | None
    trace: np.ndarray = field(repr=False)
    row_assign: np.ndarray = field(repr=False)

    @property
    def key(self):
        return (self.alpha, self.beta, self.K)


@dataclass
class GridResult:
    records: list
    best: GridRecord
    criterion: str
    aux_fits: dict = field(repr=False)
    aux_fit_count: int = 0

    @property
    def best_config(self):
        return self.best.key

    def to_table(self, sep="\t"):
        """One line per combination, in grid order, with a header line."""
        cols = ["alpha", "beta", "K", "criterion", "criterion_value", "objective",
                "target_loss", "iterations_run", "converged",
                "nmi_sqrt", "ari", "ri", "purity"]
        buf = io.StringIO()
        buf.write(sep.join(cols) + "\n")
        for r in self.records:
            m = r.metrics or {}
            row = [repr(float(r.alpha)), repr(float(r.beta)), str(r.K), self.criterion,
                   repr(float(r.criterion_value)), repr(float(r.objective)),
                   repr(float(r.target_loss)), str(r.iterations_run), str(int(r.converged))]
            row += [repr(float(m[k])) if k in m else "" for k in ("nmi_sqrt", "ari", "ri", "purity")]
            buf.write(sep.join(row) + "\n")
        return buf.getvalue()


def _evaluate_combo(args):
    target, knowledge, cfg, labels, criterion = args
    d = as_joint(target)
    fit = elastic_fit(d, knowledge, cfg)
    loss = mutual_information(d) - mutual_information(fit.state.cluster_joint)
    metrics = None
    if labels is not None:
        metrics = evaluate(fit.state.row_assign, labels).to_dict()
    if criterion == "unsupervised:target_loss":
        value = loss
    else:
        name = criterion.split(":", 1)[1]
        value = metrics["nmi_sqrt" if name == "nmi" else name]
    return GridRecord(cfg.alpha, cfg.beta, cfg.K, float(value), fit.final_objective,
                      float(loss), fit.iterations_run, fit.converged, metrics,
                      fit.objective_trace, np.asarray(fit.state.row_assign))


def _better(a: GridRecord, b: GridRecord, maximize: bool):
    """True when ``a`` beats ``b``; equal values fall back to the smaller (alpha, beta, K)."""
    if a.criterion_value != b.criterion_value:
        return a.criterion_value > b.criterion_value if maximize else a.criterion_value < b.criterion_value
    return a.key < b.key


def grid_search(aux, target, N_A: int, N_T: int, grid: GridSpec, seed=0, restarts: int = 8,
                labels=None, I_A: int = 10, I_T: int = 10, workers: int | None = None,
                penalty_normalizer: str = "mass") -> GridResult:
    """Fit every ``(alpha, beta, K)`` combination and pick the best.

    Parameters
    ----------
    aux, target : BinaryMatrix or JointDistribution
    N_A, N_T : int
        Cell cluster counts of the auxiliary and target matrices.
    grid : GridSpec
    seed, restarts : int
        Shared by every fit, so results do not depend on evaluation order.
    labels : array_like, optional
        Reference target labels; required by ``labeled:*`` criteria and used
        to attach metrics to every record when given.
    workers : int, optional
        Process pool size; defaults to the ``ELASTICC3_WORKERS`` environment
        variable (1 when unset).

    Raises
    ------
    MissingLabels
        If a labeled criterion is requested without labels.
    """
    if grid.labeled and labels is None:
        raise MissingLabels(f"criterion {grid.criterion} requires reference labels")
    aux_j = as_joint(aux)
    target_j = as_joint(target)
    if labels is not None:
        labels = np.asarray(labels)
        if labels.shape != (target_j.n_rows,):
            raise LengthMismatch(f"{labels.size} labels for {target_j.n_rows} target cells")

    aux_fits: dict[int, FitReport] = {}
    for K in sorted(set(int(k) for k in grid.k_values)):
        aux_fits[K] = itcc_fit(aux_j, N_A, K, iterations=I_A, seed=seed, restarts=restarts)

    jobs = []
    for K in grid.k_values:
        knowledge = extract_knowledge(aux_fits[int(K)])
        for a in grid.alpha_values:
            for b in grid.beta_values:
                cfg = TransferConfig(alpha=float(a), beta=float(b), K=int(K), N_A=N_A, N_T=N_T,
                                     I_A=I_A, I_T=I_T, seed=seed, restarts=restarts,
                                     penalty_normalizer=penalty_normalizer)
                jobs.append((target_j, knowledge, cfg, labels, grid.criterion))

    workers = default_workers() if workers is None else max(1, int(workers))
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            records = list(pool.map(_evaluate_combo, jobs))
    else:
        records = [_evaluate_combo(j) for j in jobs]

    maximize = grid.labeled
    best = records[0]
    for r in records[1:]:
        if _better(r, best, maximize):
            best = r
    return GridResult(records, best, grid.criterion, aux_fits, aux_fit_count=len(aux_fits))
