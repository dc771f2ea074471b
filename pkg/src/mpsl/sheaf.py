"""Distance-kernel cellular sheaves on local complexes.

Every simplex carries a one-dimensional real stalk; restriction maps are
scalars from the Gaussian kernel kappa(t) = exp(-t^2 / sigma^2) evaluated
on local distances. The scale sigma is the median strictly-positive local
distance, so the maps are invariant to a global rescaling of the data.

Restriction maps:
    vertex u   -> edge {u, v}:      kappa(D(u, v))   (same value from both ends)
    edge {u,v} -> triangle {u,v,w}: (kappa(D(u, w)) + kappa(D(v, w))) / 2

Coboundaries orient simplices by ascending local index. For an edge
(u, v) with u < v the row of d0 is -rho at u and +rho at v; for a triangle
(u, v, w) the faces (v, w), (u, w), (u, v) get signs +, -, + in d1. With
all maps equal the usual identity d1 @ d0 = 0 holds exactly.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy import sparse

from .complexes import LocalComplex


@dataclass
class SheafAssignment:
    """Restriction map scalars for one local complex.

    edge_values[e] is the vertex-to-edge scalar (shared by both endpoints
    of edge e); triangle_values[t, f] is the edge-to-triangle scalar for
    face f of triangle t, faces ordered (v, w), (u, w), (u, v).
    """

    cx: LocalComplex
    sigma: float
    edge_values: np.ndarray
    triangle_values: np.ndarray

    def vertex_edge(self, u: int, edge: tuple[int, int]) -> float:
        if u not in edge:
            raise KeyError("vertex %d is not an endpoint of edge %r" % (u, edge))
        return float(self.edge_values[self.cx.edges.index(edge)])

    def edge_triangle(self, edge: tuple[int, int], tri: tuple[int, int, int]) -> float:
        u, v, w = tri
        faces = [(v, w), (u, w), (u, v)]
        if edge not in faces:
            raise KeyError("edge %r is not a face of triangle %r" % (edge, tri))
        return float(self.triangle_values[self.cx.triangles.index(tri), faces.index(edge)])


@dataclass
class CoboundaryPair:
    """Sparse coboundaries d0 (#edges x #vertices) and d1 (#triangles x #edges)."""

    d0: sparse.csr_array
    d1: sparse.csr_array


def local_sigma(local_distances: np.ndarray) -> float:
    """Median of strictly positive upper-triangle distances; 1.0 if none."""
    d = np.asarray(local_distances)
    upper = d[np.triu_indices(d.shape[0], k=1)]
    positive = upper[upper > 0]
    if positive.size == 0:
        return 1.0
    return float(np.median(positive))


def kernel(t: np.ndarray | float, sigma: float) -> np.ndarray | float:
    """Gaussian kernel exp(-t^2 / sigma^2); sigma=inf gives the constant 1."""
    return np.exp(-np.square(t) / (sigma * sigma))


def build_sheaf(cx: LocalComplex, sigma: float | None = None) -> SheafAssignment:
    """Attach kernel restriction maps to a local complex.

    sigma defaults to local_sigma of the complex's distance block; passing
    sigma=inf forces the constant sheaf (every map 1) regardless of the
    distances.
    """
    if sigma is None:
        sigma = local_sigma(cx.local_distances)
    if not sigma > 0:
        raise ValueError("sigma must be positive, got %r" % sigma)
    d = cx.local_distances

    if cx.edges:
        e = np.array(cx.edges)
        edge_values = kernel(d[e[:, 0], e[:, 1]], sigma)
    else:
        edge_values = np.zeros(0)

    if cx.triangles:
        tri = np.array(cx.triangles)
        u, v, w = tri[:, 0], tri[:, 1], tri[:, 2]
        k_uv = kernel(d[u, v], sigma)
        k_uw = kernel(d[u, w], sigma)
        k_vw = kernel(d[v, w], sigma)
        # Face order (v,w), (u,w), (u,v): each face averages the kernels of
        # the two edges reaching the opposite vertex.
        triangle_values = np.column_stack([
            (k_uv + k_uw) / 2.0,
            (k_uv + k_vw) / 2.0,
            (k_uw + k_vw) / 2.0,
        ])
    else:
        triangle_values = np.zeros((0, 3))

    return SheafAssignment(
        cx=cx, sigma=float(sigma),
        edge_values=np.asarray(edge_values, dtype=np.float64),
        triangle_values=np.asarray(triangle_values, dtype=np.float64),
    )


def coboundaries(sh: SheafAssignment) -> CoboundaryPair:
    """Assemble signed sparse coboundary matrices from a sheaf assignment."""
    cx = sh.cx
    n_v = cx.vertex_count
    n_e = len(cx.edges)
    n_t = len(cx.triangles)

    if n_e:
        e = np.array(cx.edges)
        rows = np.repeat(np.arange(n_e), 2)
        cols = e.reshape(-1)
        vals = np.column_stack([-sh.edge_values, sh.edge_values]).reshape(-1)
        d0 = sparse.csr_array((vals, (rows, cols)), shape=(n_e, n_v))
    else:
        d0 = sparse.csr_array((0, n_v))

    if n_t:
        edge_index = {edge: i for i, edge in enumerate(cx.edges)}
        tri = np.array(cx.triangles)
        u, v, w = tri[:, 0], tri[:, 1], tri[:, 2]
        try:
            face_cols = np.array([
                [edge_index[(int(b), int(c))] for b, c in zip(v, w)],
                [edge_index[(int(a), int(c))] for a, c in zip(u, w)],
                [edge_index[(int(a), int(b))] for a, b in zip(u, v)],
            ]).T
        except KeyError as exc:
            raise ValueError("triangle face %s is not a stored edge" % (exc,))
        signs = np.array([1.0, -1.0, 1.0])
        rows = np.repeat(np.arange(n_t), 3)
        cols = face_cols.reshape(-1)
        vals = (sh.triangle_values * signs).reshape(-1)
        d1 = sparse.csr_array((vals, (rows, cols)), shape=(n_t, n_e))
    else:
        d1 = sparse.csr_array((0, n_e))

    return CoboundaryPair(d0=d0, d1=d1)
