"""
PCA embeddings shared across dimensions
=======================================

Fits one PCA at the largest requested dimension and shows that every
smaller embedding is a column slice of it, so a sweep over dimensions
costs a single factorization.
"""

import numpy as np

from mpsl import DatasetMatrix, fit_pca, pairwise_distances, project

rng = np.random.default_rng(11)

# 60 points near a 3-D linear subspace of a 20-D space
latent = rng.normal(size=(60, 3))
mixing = rng.normal(size=(3, 20))
data = latent @ mixing + 0.05 * rng.normal(size=(60, 20))
ds = DatasetMatrix(data=data, labels=np.zeros(60, dtype=np.int64),
                   class_names={0: "all"})

model = fit_pca(ds, d_max=10)
print("singular values:", np.round(model.singular_values[:6], 3))
print("top 3 explain %.1f%% of the energy"
      % (100 * np.sum(model.singular_values[:3] ** 2)
         / np.sum(model.singular_values ** 2)))

full = project(model, ds, 10)
small = project(model, ds, 4)
print("d=4 equals the first 4 columns of d=10:",
      np.array_equal(small.coords, full.coords[:, :4]))

dist = pairwise_distances(small)
print("distance matrix %dx%d, median %.3f"
      % (dist.m, dist.m, np.median(dist.values[np.triu_indices(dist.m, 1)])))
