"""
Union k-NN graphs and per-point local complexes
===============================================

Builds the neighborhood graph of a noisy ring of points, expands one
point's neighborhood into a clique complex, and slices its filtration.
"""

import numpy as np

from mpsl import DatasetMatrix, Embedding, knn_graph, local_complex, pairwise_distances, sublevel

rng = np.random.default_rng(23)

# a ring of 24 points with small radial noise
angles = np.linspace(0, 2 * np.pi, 24, endpoint=False)
points = np.column_stack([np.cos(angles), np.sin(angles)])
points += 0.05 * rng.normal(size=points.shape)

emb = Embedding(coords=points, labels=np.zeros(24, dtype=np.int64), d=2)
dist = pairwise_distances(emb)

# union rule: i-j is an edge when either is in the other's k nearest
graph = knn_graph(dist, k=4)
print("k=4 union graph has %d edges on %d vertices"
      % (len(graph.edge_pairs()), graph.m))

cx = local_complex(dist, graph, center=0, k=4)
print("local complex of point 0: vertices", cx.vertices.tolist())
print("  %d edges, %d triangles" % (len(cx.edges), len(cx.triangles)))
print("  edge filtration values:", np.round(cx.edge_values, 3))

# sublevel slices keep simplices born at or below the threshold
for t in [0.0, float(np.median(cx.edge_values)), float(np.max(cx.edge_values))]:
    sliced = sublevel(cx, t)
    print("slice t=%.3f: %d edges, %d triangles"
          % (t, len(sliced.edges), len(sliced.triangles)))
