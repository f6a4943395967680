"""Elastic coupled co-clustering for transfer clustering of sparse binary matrices.

Step 1 co-clusters an auxiliary cell x feature matrix (:func:`itcc_fit`);
step 2 co-clusters a target matrix while pulling its cluster marginals toward
the auxiliary ones (:func:`elastic_fit`, or :func:`elastic_c3` for both).
"""
__version__ = "0.1.0"

from .elastic import (
    AuxiliaryKnowledge,
    TransferConfig,
    elastic_c3,
    elastic_fit,
    extract_knowledge,
    transfer_objective,
    update_cols_target,
    update_rows_target,
)
from .exceptions import *  # noqa: F401,F403
from .fileio import load_labels, load_matrix, save_matrix, select_top_variance
from .itcc import CoClusterState, FitReport, itcc_fit, itcc_objective, update_cols, update_rows
from .metrics import MetricsReport, adjusted_rand_index, evaluate, nmi, purity, rand_index
from .prob_core import (
    BinaryMatrix,
    ClusterJointDistribution,
    JointDistribution,
    aggregate_clusters,
    joint_from_matrix,
    kl_divergence,
    mutual_information,
    reference_conditional,
)
from .simgen import SimulatedPair, SimulationParams, generate
from .tuning import GridResult, GridSpec, grid_search
