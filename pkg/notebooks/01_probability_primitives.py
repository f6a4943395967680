"""
Joint distributions, mutual information and cluster aggregation
===============================================================

A binary cell x feature matrix becomes a joint distribution by spreading unit
mass evenly over its ones.  Co-clustering compresses that joint; the loss in
mutual information is exactly a KL divergence to a structured approximation.
"""

# %%
import numpy as np

from elasticc3 import BinaryMatrix, aggregate_clusters, joint_from_matrix, mutual_information
from elasticc3.prob_core import approximation_divergence, reference_conditional

A = np.array([[1, 1, 0, 0],
              [1, 1, 0, 0],
              [0, 0, 1, 1],
              [0, 1, 1, 1]])
m = BinaryMatrix.from_dense(A)
d = joint_from_matrix(m)
print(m, "nnz:", m.nnz)
print(d.to_dense())
print("row marginal", d.row_marginal, "col marginal", d.col_marginal)

# %%
# Mutual information of the data, then of a 2 x 2 compression.
rows, cols = [0, 0, 1, 1], [0, 0, 1, 1]
c = aggregate_clusters(d, rows, cols, 2, 2)
print("I(X,W)   =", mutual_information(d))
print("I(X*,W*) =", mutual_information(c))
print(c.mass)

# %%
# The gap equals D_KL(p || p*), evaluated entry by entry.
print("MI loss      ", mutual_information(d) - mutual_information(c))
print("direct KL    ", approximation_divergence(d, rows, cols, 2, 2))

# %%
# The compressed conditional that row 3 is compared against.
print(reference_conditional(d, c, rows, cols, 3))
