"""
Transferring cluster marginals to a target matrix
=================================================

Step 1 co-clusters the auxiliary matrix.  Step 2 co-clusters the target while
alpha pulls its cell-cluster sizes, and beta its feature-cluster sizes,
toward the auxiliary ones.  With alpha = beta = 0 the target fit is plain
co-clustering.
"""

# %%
import numpy as np

from elasticc3 import (SimulationParams, TransferConfig, elastic_fit, evaluate,
                       extract_knowledge, generate, itcc_fit)

pair = generate(SimulationParams(percentage=0.9, seed=3))
aux_fit = itcc_fit(pair.aux, N=2, K=3, seed=3)
knowledge = extract_knowledge(aux_fit)
print("p(X*)", knowledge.row_cluster_marginal, "p(W*)", knowledge.col_cluster_marginal)

# %%
for alpha, beta in [(0.0, 0.0), (0.9, 0.04), (5.0, 5.0)]:
    cfg = TransferConfig(alpha=alpha, beta=beta, K=3, seed=3)
    fit = elastic_fit(pair.target, knowledge, cfg)
    cj = fit.state.cluster_joint
    print(f"alpha={alpha:<4} beta={beta:<5} q(Y*)={np.round(cj.row_marginal, 3)} "
          f"q(Z*)={np.round(cj.col_marginal, 3)} "
          f"purity={evaluate(fit.state.row_assign, pair.target_labels).purity:.3f}")

# %%
# The row penalty only applies when both sides have the same number of cell
# clusters; otherwise alpha has no effect at all.
aux3 = itcc_fit(pair.aux, N=3, K=3, seed=3)
k3 = extract_knowledge(aux3)
a = elastic_fit(pair.target, k3, TransferConfig(alpha=0.0, beta=0.1, K=3, N_A=3, N_T=2))
b = elastic_fit(pair.target, k3, TransferConfig(alpha=1e6, beta=0.1, K=3, N_A=3, N_T=2))
print("identical:", np.array_equal(a.state.row_assign, b.state.row_assign))

# %%
# Monotone penalized objective, iteration by iteration.
print(np.round(elastic_fit(pair.target, knowledge, TransferConfig(alpha=0.9, beta=0.04, K=3,
                                                                  I_T=30)).objective_trace, 5))
