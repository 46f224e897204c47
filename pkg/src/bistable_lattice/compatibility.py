"""Rigidity matrix, hexagonal equations and displacement reconstruction."""
from __future__ import annotations

import warnings
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
import scipy.linalg
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .errors import DegenerateTriangle, IncompatibleElongations
from .lattice import Lattice, build_lattice, node_hexagon

RANK_TOL = 1e-10
COMPAT_RTOL = 1e-9
DENSE_MAX_N = 8


def rigidity_matrix(lattice: Lattice, sparse: bool = False):
    """E x 2N matrix R with ``(R U)_e = q_e . (u_j - u_i)`` for edge ``(i, j)``.

    ``U`` is interleaved: ``U[2k], U[2k + 1]`` are the x, y displacement of node k.
    """
    i, j = lattice.edges[:, 0], lattice.edges[:, 1]
    qe = lattice.edge_vectors()
    E = lattice.num_edges
    rows = np.repeat(np.arange(E), 4)
    cols = np.stack([2 * i, 2 * i + 1, 2 * j, 2 * j + 1], axis=1).ravel()
    vals = np.concatenate([-qe, qe], axis=1).ravel()
    R = sp.csr_matrix((vals, (rows, cols)), shape=(E, 2 * lattice.num_nodes))
    R.eliminate_zeros()
    return R if sparse else R.toarray()


def hexagon_matrix(lattice: Lattice, sparse: bool = False):
    """M x E matrix Z: +1 on the spokes, -1 on the rim of every interior node."""
    rows, cols, vals = [], [], []
    for row, node in enumerate(lattice.interior_nodes):
        spokes, rim = node_hexagon(lattice, int(node))
        rows += [row] * 12
        cols += spokes + rim
        vals += [1.0] * 6 + [-1.0] * 6
    Z = sp.csr_matrix(
        (vals, (rows, cols)), shape=(len(lattice.interior_nodes), lattice.num_edges)
    )
    return Z if sparse else Z.toarray()


@dataclass(frozen=True)
class RankReport:
    rank_R: int
    nullity_R: int
    rank_Z: int
    # ratio of the smallest retained singular value to the threshold, and of
    # the threshold to the largest discarded one (inf when nothing discarded)
    gap_R: tuple
    gap_Z: tuple
    warnings: tuple = ()


def _numerical_rank(A, tol):
    sv = np.linalg.svd(A, compute_uv=False)
    if sv.size == 0 or sv[0] == 0:
        return 0, (np.inf, np.inf)
    thresh = tol * sv[0]
    keep = sv > thresh
    r = int(keep.sum())
    above = sv[r - 1] / thresh if r else np.inf
    below = thresh / sv[r] if r < sv.size and sv[r] > 0 else np.inf
    return r, (float(above), float(below))


def rank_report(lattice: Lattice, tolerance: float = RANK_TOL) -> RankReport:
    """Numerical ranks of R and Z by SVD with a relative threshold."""
    rank_R, gap_R = _numerical_rank(rigidity_matrix(lattice), tolerance)
    rank_Z, gap_Z = _numerical_rank(hexagon_matrix(lattice), tolerance)
    notes = []
    for name, gap in (("R", gap_R), ("Z", gap_Z)):
        if min(gap) < 10.0:
            msg = (
                f"singular-value gap of {name} at threshold {tolerance:g} is narrow "
                f"(kept/threshold={gap[0]:.3g}, threshold/dropped={gap[1]:.3g})"
            )
            notes.append(msg)
            warnings.warn(msg, RuntimeWarning, stacklevel=2)
    return RankReport(
        rank_R=rank_R,
        nullity_R=2 * lattice.num_nodes - rank_R,
        rank_Z=rank_Z,
        gap_R=gap_R,
        gap_Z=gap_Z,
        warnings=tuple(notes),
    )


def gauge_columns(lattice: Lattice):
    """Displacement components pinned to remove rigid motions.

    Node 0 is fixed and the y component of its q1-neighbour is fixed.
    """
    p, q = lattice.axial[0]
    k = lattice.node_index(p + 1, q)
    return np.array([0, 1, 2 * k + 1])


@lru_cache(maxsize=8)
def _sparse_factor(n):
    lattice = build_lattice(n)
    R = rigidity_matrix(lattice, sparse=True).tocsc()
    free = np.setdiff1d(np.arange(R.shape[1]), gauge_columns(lattice))
    Rf = R[:, free]
    solve = spla.factorized((Rf.T @ Rf).tocsc())
    return Rf, free, solve


def hexagon_residual(lattice: Lattice, kappa):
    return hexagon_matrix(lattice, sparse=True) @ np.asarray(kappa, dtype=float)


def check_compatible(lattice: Lattice, kappa, rtol: float = COMPAT_RTOL):
    kappa = np.asarray(kappa, dtype=float)
    res = hexagon_residual(lattice, kappa)
    tol = rtol * np.linalg.norm(kappa)
    if res.size and np.max(np.abs(res)) > tol:
        worst = int(np.argmax(np.abs(res)))
        node = int(lattice.interior_nodes[worst])
        raise IncompatibleElongations(
            f"hexagonal equation at node {node} violated by {res[worst]:.3e} "
            f"(tolerance {tol:.3e})",
            node=node,
            residual=float(res[worst]),
        )
    return res


def solve_displacements(lattice: Lattice, kappa, rtol: float = COMPAT_RTOL):
    """Displacements ``U`` with ``R U = kappa`` under the gauge of `gauge_columns`."""
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (lattice.num_edges,):
        raise ValueError(f"kappa must have length {lattice.num_edges}")
    check_compatible(lattice, kappa, rtol)

    U = np.zeros(2 * lattice.num_nodes)
    if lattice.n <= DENSE_MAX_N:
        free = np.setdiff1d(np.arange(U.size), gauge_columns(lattice))
        A = rigidity_matrix(lattice)[:, free]
        Qf, Rt = scipy.linalg.qr(A, mode="economic")
        U[free] = scipy.linalg.solve_triangular(Rt, Qf.T @ kappa)
    else:
        Rf, free, solve = _sparse_factor(lattice.n)
        x = solve(Rf.T @ kappa)
        # one step of iterative refinement on the normal equations
        x += solve(Rf.T @ (kappa - Rf @ x))
        U[free] = x
    return U


def project_onto_kernel(Z, v):
    """Orthogonal projection of ``v`` onto ker Z, via the SVD of Z."""
    _, sv, Vt = np.linalg.svd(Z, full_matrices=True)
    r = int((sv > RANK_TOL * sv[0]).sum())
    N = Vt[r:]
    return N.T @ (N @ v)


def nonlinear_node_residual(spoke_lengths, rim_lengths):
    """Sum of the six angles at a node minus 2 pi.

    Rim ``b_i`` closes the triangle between spokes ``a_i`` and ``a_{i+1}``.
    """
    a = np.asarray(spoke_lengths, dtype=float)
    b = np.asarray(rim_lengths, dtype=float)
    if a.shape != (6,) or b.shape != (6,):
        raise ValueError("need six spoke and six rim lengths")
    a1 = np.roll(a, -1)
    cosines = (a * a + a1 * a1 - b * b) / (2 * a * a1)
    bad = np.flatnonzero(~((cosines > -1.0) & (cosines < 1.0)))
    if bad.size:
        t = int(bad[0])
        raise DegenerateTriangle(
            f"triangle {t} with sides ({a[t]:g}, {a1[t]:g}, {b[t]:g}) is degenerate"
        )
    return float(np.sum(np.arccos(cosines)) - 2 * np.pi)


def node_lengths(lattice: Lattice, node: int, lengths):
    """Spoke and rim lengths around ``node`` from a per-edge length vector."""
    spokes, rim = node_hexagon(lattice, node)
    lengths = np.asarray(lengths, dtype=float)
    return lengths[spokes], lengths[rim]


def export_triplets(M) -> str:
    """Coordinate-format text, one ``row col value`` line per nonzero."""
    C = sp.coo_matrix(M)
    order = np.lexsort((C.col, C.row))
    return "".join(
        f"{C.row[k]} {C.col[k]} {float(C.data[k])!r}\n" for k in order if C.data[k] != 0
    )
