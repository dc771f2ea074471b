"""Sheaf Laplacians, their persistent refinement, and spectra.

The order-h Laplacian is d_h^T d_h + d_{h-1} d_{h-1}^T (the down term is
dropped at h = 0). The persistent Laplacian over a filtration interval
[a, b] keeps the up term of the larger complex but restricts it to the
cochains of the smaller one by a generalized Schur complement; its kernel
dimension recovers the persistent Betti number, which is what the spectra
feed on. Matrices are symmetrized and eigenvalues come from a dense
symmetric solver with small values snapped to exactly zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .complexes import LocalComplex, sublevel
from .sheaf import SheafAssignment, build_sheaf, coboundaries, local_sigma

#: Relative cutoff under which an eigenvalue is reported as exactly zero.
DEFAULT_ZERO_TOL = 1e-8

#: Relative rank cutoff for the pseudo-inverse inside the Schur complement.
PINV_RTOL = 1e-10


@dataclass
class LaplacianMatrix:
    """Dense symmetric Laplacian of one order, with optional interval tag."""

    matrix: np.ndarray
    order: int
    interval: tuple[float, float] | None = None

    @property
    def size(self) -> int:
        return self.matrix.shape[0]


@dataclass
class Spectrum:
    """Ascending eigenvalues; entries below the zero cutoff are exactly 0."""

    eigenvalues: np.ndarray
    order: int

    @property
    def size(self) -> int:
        return len(self.eigenvalues)


def _symmetrize(m: np.ndarray) -> np.ndarray:
    return (m + m.T) / 2.0


def laplacian(sh: SheafAssignment, h: int) -> LaplacianMatrix:
    """Order-h sheaf Laplacian (h in {0, 1}) of a sheaf assignment."""
    if h not in (0, 1):
        raise ValueError("order must be 0 or 1, got %d" % h)
    cb = coboundaries(sh)
    if h == 0:
        mat = (cb.d0.T @ cb.d0).toarray()
    else:
        mat = (cb.d1.T @ cb.d1 + cb.d0 @ cb.d0.T).toarray()
    return LaplacianMatrix(matrix=_symmetrize(mat), order=h)


def _up_laplacian(sh: SheafAssignment, h: int) -> np.ndarray:
    cb = coboundaries(sh)
    if h == 0:
        return (cb.d0.T @ cb.d0).toarray()
    return (cb.d1.T @ cb.d1).toarray()


def _down_laplacian(sh: SheafAssignment, h: int) -> np.ndarray:
    cb = coboundaries(sh)
    if h == 0:
        n = sh.cx.vertex_count
        return np.zeros((n, n))
    return (cb.d0 @ cb.d0.T).toarray()


def _simplex_list(cx: LocalComplex, h: int) -> list[tuple[int, ...]]:
    """h-simplices as local-index tuples, in Laplacian row order."""
    if h == 0:
        return [(i,) for i in range(cx.vertex_count)]
    return [tuple(int(x) for x in e) for e in cx.edges]


def schur_restriction(up: np.ndarray, keep: np.ndarray) -> np.ndarray:
    """Restrict an up-Laplacian to a cochain subset by Schur complement.

    keep is a boolean mask over the matrix's index set. The eliminated
    block is inverted with a rank-revealing pseudo-inverse. With nothing
    eliminated the input block is returned unchanged.
    """
    keep = np.asarray(keep, dtype=bool)
    drop = ~keep
    if not drop.any():
        return up
    a = up[np.ix_(keep, keep)]
    b = up[np.ix_(keep, drop)]
    d = up[np.ix_(drop, drop)]
    return a - b @ np.linalg.pinv(d, rcond=PINV_RTOL) @ b.T


def persistent_laplacian_pair(
    cx_a: LocalComplex,
    cx_b: LocalComplex,
    h: int,
    sigma: float | None = None,
    interval: tuple[float, float] | None = None,
) -> LaplacianMatrix:
    """Persistent order-h Laplacian for an explicit nested pair X_a <= X_b.

    Simplices are matched between the complexes by their global vertex
    ids; every h-simplex and (h-1)-simplex of cx_a must appear in cx_b.
    Both sheaves share one sigma (default: sigma of cx_b's distances) so
    corresponding restriction maps agree.
    """
    if h not in (0, 1):
        raise ValueError("order must be 0 or 1, got %d" % h)
    if sigma is None:
        sigma = local_sigma(cx_b.local_distances)

    def global_simplices(cx: LocalComplex, order: int) -> list[tuple[int, ...]]:
        verts = cx.vertices
        return [
            tuple(sorted(int(verts[i]) for i in s))
            for s in _simplex_list(cx, order)
        ]

    b_simplices = global_simplices(cx_b, h)
    b_pos = {s: i for i, s in enumerate(b_simplices)}
    a_simplices = global_simplices(cx_a, h)
    keep = np.zeros(len(b_simplices), dtype=bool)
    for s in a_simplices:
        if s not in b_pos:
            raise ValueError("simplex %r of the smaller complex is missing "
                             "from the larger one" % (s,))
        keep[b_pos[s]] = True

    sh_b = build_sheaf(cx_b, sigma=sigma)
    up = schur_restriction(_up_laplacian(sh_b, h), keep)

    # The restricted up term is indexed by the kept simplices in cx_b's
    # list order; permute the down term (indexed by cx_a's own order) to
    # match before adding.
    sh_a = build_sheaf(cx_a, sigma=sigma)
    down = _down_laplacian(sh_a, h)
    kept = [s for i, s in enumerate(b_simplices) if keep[i]]
    kept_rank = {s: r for r, s in enumerate(kept)}
    reorder = np.zeros(len(a_simplices), dtype=np.int64)
    for ai, s in enumerate(a_simplices):
        reorder[kept_rank[s]] = ai
    mat = up + down[np.ix_(reorder, reorder)]
    return LaplacianMatrix(matrix=_symmetrize(mat), order=h, interval=interval)


def persistent_laplacian(cx: LocalComplex, a: float, b: float, h: int,
                         sigma: float | None = None) -> LaplacianMatrix:
    """Persistent order-h Laplacian over the sublevel interval [a, b].

    With a == b this reduces exactly to the ordinary Laplacian of the
    sublevel complex at a (the Schur step is skipped when nothing is
    eliminated).
    """
    if a > b:
        raise ValueError("interval requires a <= b, got a=%r > b=%r" % (a, b))
    if sigma is None:
        sigma = local_sigma(cx.local_distances)
    cx_a = sublevel(cx, a)
    cx_b = cx_a if a == b else sublevel(cx, b)
    return persistent_laplacian_pair(cx_a, cx_b, h, sigma=sigma,
                                     interval=(float(a), float(b)))


def eigenvalues(lap: LaplacianMatrix, zero_tol: float = DEFAULT_ZERO_TOL) -> Spectrum:
    """Full ascending spectrum with near-zero values snapped to exactly 0.

    Values within zero_tol * max(1, largest eigenvalue) of zero, including
    tiny negatives from roundoff, are clamped; anything farther from zero
    is kept as computed. Non-finite matrix entries are rejected.
    """
    mat = lap.matrix
    if mat.size and not np.all(np.isfinite(mat)):
        raise ValueError("Laplacian contains non-finite entries")
    if mat.shape[0] == 0:
        return Spectrum(eigenvalues=np.zeros(0), order=lap.order)
    vals = np.linalg.eigvalsh(mat)
    cutoff = zero_tol * max(1.0, float(vals[-1]))
    vals = np.where(np.abs(vals) < cutoff, 0.0, vals)
    return Spectrum(eigenvalues=vals, order=lap.order)
