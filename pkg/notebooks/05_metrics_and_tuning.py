"""
Scoring clusterings and tuning alpha, beta, K
=============================================
"""

# %%
from elasticc3 import GridSpec, SimulationParams, evaluate, generate, grid_search

print(evaluate([0, 1, 0, 1], [0, 0, 1, 1]).to_dict())
print(evaluate([1, 1, 0, 0], [0, 0, 1, 1]).to_dict())

# %%
# Labeled grid search: the auxiliary matrix is co-clustered once per K.
pair = generate(SimulationParams(percentage=0.9, seed=7))
grid = GridSpec(alpha_values=(0.0, 0.5, 0.9), beta_values=(0.0, 0.04), k_values=(2, 3),
                criterion="labeled:purity")
res = grid_search(pair.aux, pair.target, 2, 2, grid, seed=7, restarts=4,
                  labels=pair.target_labels)
print("auxiliary fits:", res.aux_fit_count, "best:", res.best_config,
      round(res.best.criterion_value, 3))
print(res.to_table())

# %%
# Without labels the target-only compression loss is minimized instead.
res_u = grid_search(pair.aux, pair.target, 2, 2,
                    GridSpec((0.0, 0.5, 0.9), (0.0, 0.04), (2, 3)), seed=7, restarts=4)
print("unsupervised best:", res_u.best_config, round(res_u.best.target_loss, 5))
