"""
Coupled synthetic data: an accessibility-like auxiliary matrix and an
expression-like target matrix sharing two ground-truth cell clusters.

Generation, for feature weight ``w`` and ``k`` features with
``D = k(1 - w)`` differential features split into blocks ``D//2`` and
``D - D//2``:

1. ``w_acc[c, j]`` is ``w`` / ``1 - w`` on the two differential blocks
   (swapped between the clusters) and a shared Beta(0.5, 2) draw on the
   remaining ``k - D`` features; ``w_exp[c, j] ~ Beta(w_acc[c, j], 10)``,
   drawn per cluster on differential features and shared otherwise.
2. Cell labels are Bernoulli(0.5).
3. ``u_acc ~ Bernoulli(w_acc[label, j])``, thinned by Bernoulli(0.5).
4. ``u_exp ~ Bernoulli(w_exp[label, j])``; ``v_exp ~ Bernoulli(0.8)`` where
   ``u_exp = 1`` and Bernoulli(0.1) elsewhere.
5. ``C ~ N(2 * u_acc_thinned, 0.6^2)``, ``G ~ N(2 * v_exp, sigma^2)``.
6. ``A = C > 0``, ``T = G > 0``.

Every draw comes from one ``numpy.random.Generator(PCG64)`` in a fixed order,
full-size arrays first and selection afterwards, so a seed pins the output.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .exceptions import InvalidParams
from .prob_core import BinaryMatrix

__all__ = ["SimulationParams", "SimulatedPair", "generate", "feature_weight",
           "block_bounds", "GENERATOR"]

GENERATOR = "numpy.random.PCG64"
READINGS = ("direct", "complement")


@dataclass(frozen=True)
class SimulationParams:
    """Settings for :func:`generate`.

    ``percentage`` is the fraction of highly correlated features.  Under the
    ``"direct"`` reading the feature weight is ``w = percentage``; under
    ``"complement"`` it is ``w = 1 - percentage``.
    """

    n_aux: int = 100
    n_target: int = 100
    k: int = 100
    percentage: float = 0.9
    sigma: float = 0.6
    seed: int = 0
    reading: str = "direct"

    def __post_init__(self):
        if self.n_aux < 1 or self.n_target < 1 or self.k < 1:
            raise InvalidParams("n_aux, n_target and k must be positive")
        if not (0.0 < self.percentage < 1.0):
            raise InvalidParams(f"percentage must lie in (0, 1), got {self.percentage}")
        if not self.sigma > 0:
            raise InvalidParams(f"sigma must be positive, got {self.sigma}")
        if self.reading not in READINGS:
            raise InvalidParams(f"reading must be one of {READINGS}")

    def to_dict(self):
        return asdict(self)


@dataclass
class SimulatedPair:
    aux: BinaryMatrix
    target: BinaryMatrix
    aux_labels: np.ndarray
    target_labels: np.ndarray
    params: SimulationParams
    intermediate: dict = field(default_factory=dict, repr=False)


def feature_weight(params: SimulationParams) -> float:
    return params.percentage if params.reading == "direct" else 1.0 - params.percentage


def block_bounds(k: int, w: float):
    """Sizes ``(first_block, second_block, shared_tail)`` of the feature index ranges.

    ``k(1 - w)`` is floored after a small tolerance so that, e.g., ``k = 100``
    and ``w = 0.9`` gives 10 differential features despite float rounding.
    """
    n_diff = int(math.floor(k * (1.0 - w) + 1e-9))
    n_diff = min(max(n_diff, 0), k)
    first = n_diff // 2
    return first, n_diff - first, k - n_diff


def generate(params: SimulationParams, keep_intermediate: bool = False) -> SimulatedPair:
    """Draw a coupled auxiliary/target pair with ground-truth labels."""
    rng = np.random.Generator(np.random.PCG64(params.seed))
    k = params.k
    w = feature_weight(params)
    first, second, tail = block_bounds(k, w)
    n_diff = first + second

    # step 1: feature activation weights
    w_acc = np.empty((2, k))
    w_acc[0, :first] = w
    w_acc[1, :first] = 1.0 - w
    w_acc[0, first:n_diff] = 1.0 - w
    w_acc[1, first:n_diff] = w
    shared = rng.beta(0.5, 2.0, size=tail)
    w_acc[:, n_diff:] = shared
    w_exp = np.empty((2, k))
    w_exp[:, :n_diff] = rng.beta(w_acc[:, :n_diff], 10.0)
    w_exp[:, n_diff:] = rng.beta(w_acc[0, n_diff:], 10.0)

    # step 2: labels
    z_acc = rng.binomial(1, 0.5, size=params.n_aux)
    z_exp = rng.binomial(1, 0.5, size=params.n_target)

    # step 3: auxiliary activity, thinned
    u_acc = rng.random((params.n_aux, k)) < w_acc[z_acc]
    u_acc_thin = u_acc & (rng.random((params.n_aux, k)) < 0.5)

    # step 4: target activity with the 0.8 / 0.1 mixture
    u_exp = rng.random((params.n_target, k)) < w_exp[z_exp]
    keep = rng.random((params.n_target, k)) < 0.8
    spurious = rng.random((params.n_target, k)) < 0.1
    v_exp = np.where(u_exp, keep, spurious)

    # step 5: Gaussian layers
    C = rng.normal(2.0 * u_acc_thin, 0.6)
    G = rng.normal(2.0 * v_exp, params.sigma)

    # step 6: threshold
    A = C > 0
    T = G > 0

    inter = {}
    if keep_intermediate:
        inter = {"w_acc": w_acc, "w_exp": w_exp, "z_acc": z_acc, "z_exp": z_exp,
                 "u_acc": u_acc, "u_acc_thinned": u_acc_thin, "u_exp": u_exp,
                 "v_exp": v_exp, "C": C, "G": G}
    return SimulatedPair(
        aux=BinaryMatrix.from_dense(A),
        target=BinaryMatrix.from_dense(T),
        aux_labels=z_acc.astype(np.int64),
        target_labels=z_exp.astype(np.int64),
        params=params,
        intermediate=inter,
    )
