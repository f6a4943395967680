"""External clustering scores against reference labels: NMI, ARI, RI and purity.

All four are computed from the contingency table of the two labelings.  NMI
uses the geometric-mean normalization ``I / sqrt(H_pred * H_truth)`` and is
reported under the key ``nmi_sqrt``.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .exceptions import LengthMismatch

__all__ = ["MetricsReport", "contingency", "purity", "rand_index",
           "adjusted_rand_index", "nmi", "evaluate", "as_labels"]


def as_labels(labels):
    """Validate a label vector: nonempty, 1-D, nonnegative integers."""
    a = np.asarray(labels)
    if a.ndim != 1 or a.size == 0:
        raise ValueError("labels must be a nonempty 1-D vector")
    if not np.issubdtype(a.dtype, np.integer):
        if not np.all(np.equal(np.mod(a, 1), 0)):
            raise ValueError("labels must be integers")
        a = a.astype(np.int64)
    if a.min() < 0:
        raise ValueError("labels must be nonnegative")
    return a.astype(np.int64)


def contingency(pred, truth):
    """Counts ``n[i, j]`` of items in predicted cluster ``i`` and true class ``j``."""
    pred = as_labels(pred)
    truth = as_labels(truth)
    if pred.size != truth.size:
        raise LengthMismatch(f"{pred.size} predicted labels vs {truth.size} true labels")
    _, p = np.unique(pred, return_inverse=True)
    _, t = np.unique(truth, return_inverse=True)
    n_p, n_t = p.max() + 1, t.max() + 1
    return np.bincount(p * n_t + t, minlength=n_p * n_t).reshape(n_p, n_t)


def _comb2(x):
    return x * (x - 1) // 2


def purity(pred, truth) -> float:
    """Fraction of items falling in the majority true class of their predicted cluster.

    Not symmetric in its arguments.
    """
    table = contingency(pred, truth)
    return float(table.max(axis=1).sum() / table.sum())


def _pair_counts(table):
    """Pair tallies ``(both, pred_only, truth_only, neither)`` in exact integers."""
    t = [[int(v) for v in row] for row in table]
    both = sum(_comb2(v) for row in t for v in row)
    same_pred = sum(_comb2(sum(row)) for row in t)
    same_truth = sum(_comb2(sum(col)) for col in zip(*t))
    total = _comb2(sum(map(sum, t)))
    return both, same_pred - both, same_truth - both, total - same_pred - same_truth + both


def rand_index(pred, truth) -> float:
    """Share of item pairs on which the two labelings agree (same/same or split/split)."""
    n11, n10, n01, n00 = _pair_counts(contingency(pred, truth))
    total = n11 + n10 + n01 + n00
    if total == 0:
        return 1.0
    return (n11 + n00) / total


def adjusted_rand_index(pred, truth) -> float:
    """Chance-corrected Rand index (Hubert & Arabie).

    Evaluated in the pair-count form ``2(n00 n11 - n01 n10) / ((n00 + n01)(n01 + n11)
    + (n00 + n10)(n10 + n11))`` with integer tallies, so only the final
    division rounds.  When the denominator vanishes, returns 1 if the
    labelings induce the same pair relations and 0 otherwise.
    """
    n11, n10, n01, n00 = _pair_counts(contingency(pred, truth))
    denom = (n00 + n01) * (n01 + n11) + (n00 + n10) * (n10 + n11)
    if denom == 0:
        return 1.0 if n10 == n01 == 0 else 0.0
    return 2 * (n00 * n11 - n01 * n10) / denom


def _entropy(counts):
    p = counts[counts > 0] / counts.sum()
    return float(-(p * np.log(p)).sum())


def nmi(pred, truth) -> float:
    """Normalized mutual information, geometric-mean variant.

    If either labeling has zero entropy the score is 1 for identical
    partitions and 0 otherwise.
    """
    table = contingency(pred, truth).astype(np.float64)
    n = table.sum()
    h_p = _entropy(table.sum(axis=1))
    h_t = _entropy(table.sum(axis=0))
    if h_p == 0 or h_t == 0:
        return 1.0 if (h_p == 0 and h_t == 0) else 0.0
    pij = table / n
    pi = pij.sum(axis=1, keepdims=True)
    pj = pij.sum(axis=0, keepdims=True)
    nz = pij > 0
    mi = float((pij[nz] * np.log(pij[nz] / (pi @ pj)[nz])).sum())
    return float(min(max(mi / np.sqrt(h_p * h_t), 0.0), 1.0))


@dataclass(frozen=True)
class MetricsReport:
    nmi: float
    ari: float
    ri: float
    purity: float

    def to_dict(self):
        return {"nmi_sqrt": self.nmi, "ari": self.ari, "ri": self.ri, "purity": self.purity}


def evaluate(pred, truth) -> MetricsReport:
    """All four scores at once."""
    return MetricsReport(nmi=nmi(pred, truth), ari=adjusted_rand_index(pred, truth),
                         ri=rand_index(pred, truth), purity=purity(pred, truth))
