"""Neighborhood graphs and per-image local simplicial complexes.

The global graph joins i and j when either is among the other's k nearest
(union rule). Each image then gets a local complex: the center plus its k
nearest neighbors, the edges the global graph induces on them, and every
triangle of the induced graph (clique expansion, capped at dimension 2).
Edges are born at their endpoint distance and a triangle at its longest
edge, so sublevel slices of a local complex are its Rips-style filtration.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .embed import DistanceMatrix


@dataclass
class NeighborGraph:
    """Union k-NN graph on m vertices as a dense boolean adjacency."""

    adjacency: np.ndarray
    k: int

    @property
    def m(self) -> int:
        return self.adjacency.shape[0]

    def edge_pairs(self) -> set[tuple[int, int]]:
        """Undirected edges as (i, j) pairs with i < j."""
        ii, jj = np.nonzero(np.triu(self.adjacency, 1))
        return {(int(i), int(j)) for i, j in zip(ii, jj)}


@dataclass
class LocalComplex:
    """Clique complex on a center and its k nearest neighbors.

    vertices holds global ids, center first then ascending distance
    (distance ties to the smaller id). Edges and triangles are tuples of
    local indices, sorted within each simplex and listed lexicographically.
    Filtration values align with the simplex lists; local_distances is the
    full (k+1) x (k+1) distance block for the vertex list.
    """

    center: int
    vertices: np.ndarray
    edges: list[tuple[int, int]]
    triangles: list[tuple[int, int, int]]
    edge_values: np.ndarray
    triangle_values: np.ndarray
    local_distances: np.ndarray

    @property
    def vertex_count(self) -> int:
        return len(self.vertices)


def neighbor_order(dist: DistanceMatrix) -> np.ndarray:
    """Row-wise neighbor ranking by ascending distance, self excluded.

    Ties resolve to the smaller index (stable sort). Row i lists all other
    vertices, so order[:, :k] are the k nearest of each vertex.
    """
    values = dist.values.copy()
    np.fill_diagonal(values, np.inf)
    return np.argsort(values, axis=1, kind="stable")[:, :-1]


def knn_graph(dist: DistanceMatrix, k: int, order: np.ndarray | None = None) -> NeighborGraph:
    """Union k-NN graph: edge {i, j} iff i in knn(j) or j in knn(i)."""
    m = dist.m
    if not 1 <= k <= m - 1:
        raise ValueError("k must be in [1, m-1] = [1, %d], got %d" % (m - 1, k))
    if order is None:
        order = neighbor_order(dist)
    adjacency = np.zeros((m, m), dtype=bool)
    rows = np.repeat(np.arange(m), k)
    adjacency[rows, order[:, :k].reshape(-1)] = True
    adjacency |= adjacency.T
    np.fill_diagonal(adjacency, False)
    return NeighborGraph(adjacency=adjacency, k=k)


def local_complex(
    dist: DistanceMatrix,
    graph: NeighborGraph,
    center: int,
    k: int,
    max_edges: int = 8000,
    order: np.ndarray | None = None,
) -> LocalComplex:
    """Build the local clique complex (dimension <= 2) around one vertex.

    graph must come from the same distance matrix with the same k. The
    induced edge count is capped (default 8000); exceeding the cap is an
    error rather than a silent truncation.
    """
    m = dist.m
    if not 0 <= center < m:
        raise ValueError("center %d out of range [0, %d)" % (center, m))
    if graph.k != k:
        raise ValueError("graph was built with k=%d, requested k=%d" % (graph.k, k))
    if order is None:
        row = dist.values[center].copy()
        row[center] = np.inf
        nearest = np.argsort(row, kind="stable")[:k]
    else:
        nearest = order[center, :k]
    vertices = np.concatenate(([center], nearest)).astype(np.int64)

    local_d = dist.values[np.ix_(vertices, vertices)].copy()
    adj = graph.adjacency[np.ix_(vertices, vertices)]

    ui, vi = np.nonzero(np.triu(adj, 1))
    if len(ui) > max_edges:
        raise ValueError(
            "local complex at center %d has %d edges, over the cap %d; "
            "raise max_edges to allow this" % (center, len(ui), max_edges)
        )
    edges = list(zip(ui.tolist(), vi.tolist()))
    edge_values = local_d[ui, vi]

    triangles: list[tuple[int, int, int]] = []
    for u, v in edges:
        shared = np.nonzero(adj[u] & adj[v])[0]
        for w in shared[shared > v].tolist():
            triangles.append((u, v, w))
    triangles.sort()
    if triangles:
        tri = np.array(triangles)
        triangle_values = np.maximum(
            local_d[tri[:, 0], tri[:, 1]],
            np.maximum(local_d[tri[:, 0], tri[:, 2]], local_d[tri[:, 1], tri[:, 2]]),
        )
    else:
        triangle_values = np.zeros(0)

    return LocalComplex(
        center=center,
        vertices=vertices,
        edges=edges,
        triangles=triangles,
        edge_values=np.asarray(edge_values, dtype=np.float64),
        triangle_values=triangle_values,
        local_distances=local_d,
    )


def sublevel(cx: LocalComplex, t: float) -> LocalComplex:
    """Sublevel slice: keep simplices born at or before t; vertices always stay.

    A triangle's value is the max of its edge values, so the slice is
    automatically closed under faces, and it equals the clique complex of
    the surviving edges.
    """
    if not (np.isfinite(t) or t == np.inf):
        raise ValueError("threshold must be a real number or +inf")
    edge_keep = [i for i, val in enumerate(cx.edge_values) if val <= t]
    tri_keep = [i for i, val in enumerate(cx.triangle_values) if val <= t]
    return LocalComplex(
        center=cx.center,
        vertices=cx.vertices,
        edges=[cx.edges[i] for i in edge_keep],
        triangles=[cx.triangles[i] for i in tri_keep],
        edge_values=cx.edge_values[edge_keep],
        triangle_values=cx.triangle_values[tri_keep],
        local_distances=cx.local_distances,
    )
