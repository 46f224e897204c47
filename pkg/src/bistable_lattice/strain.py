"""Average strain of the lattice and the flat-bottom set of still-state strains.

Strain tensors are plain symmetric 2x2 arrays ``[[a, b], [b, c]]``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .compatibility import rigidity_matrix, solve_displacements
from .errors import TargetOutsideD
from .lattice import DIRECTIONS, Lattice
from .stillstates import approx_concentrations

# Row r holds (q_r1^2, 2 q_r1 q_r2, q_r2^2).
Q = np.column_stack(
    [DIRECTIONS[:, 0] ** 2, 2 * DIRECTIONS[:, 0] * DIRECTIONS[:, 1], DIRECTIONS[:, 1] ** 2]
)
_R3 = np.sqrt(3.0) / 3
Q_INV = np.array([[1.0, 0.0, 0.0], [0.0, _R3, -_R3], [-1 / 3, 2 / 3, 2 / 3]])
Q_INV_NORM = float(np.linalg.svd(Q_INV, compute_uv=False)[0])

MEMBERSHIP_TOL = 1e-12


def m_map(x):
    """Symmetric matrix ``[[x1, x2], [x2, x3]]``."""
    x1, x2, x3 = np.asarray(x, dtype=float)
    return np.array([[x1, x2], [x2, x3]])


def m_inv(E):
    E = np.asarray(E, dtype=float)
    return np.array([E[0, 0], 0.5 * (E[0, 1] + E[1, 0]), E[1, 1]])


def strain_from_displacements(lattice: Lattice, U):
    """Mean symmetrised gradient of the piecewise-linear interpolant of ``U``."""
    U = np.asarray(U, dtype=float).reshape(-1, 2)
    t = lattice.triangles
    X = lattice.nodes
    dX = np.stack([X[t[:, 1]] - X[t[:, 0]], X[t[:, 2]] - X[t[:, 0]]], axis=2)
    dU = np.stack([U[t[:, 1]] - U[t[:, 0]], U[t[:, 2]] - U[t[:, 0]]], axis=2)
    grads = dU @ np.linalg.inv(dX)
    eps = 0.5 * (grads + grads.transpose(0, 2, 1))
    return eps.mean(axis=0)


def direction_sums(lattice: Lattice, kappa, edges=None):
    """Per-direction sums of ``kappa`` over ``edges`` (all edges by default)."""
    kappa = np.asarray(kappa, dtype=float)
    if edges is None:
        edges = np.arange(lattice.num_edges)
    r = lattice.directions[edges]
    return np.array([kappa[edges][r == d].sum() for d in (1, 2, 3)])


def triangle_vectors(lattice: Lattice, kappa):
    """(T, 3) array; row holds the elongations of a triangle's q1, q2, q3 edges."""
    kappa = np.asarray(kappa, dtype=float)
    out = np.zeros((len(lattice.triangles), 3))
    for k, (h, i, j) in enumerate(lattice.triangles):
        for u, v in ((h, i), (h, j), (i, j)):
            e = lattice.edge_between(u, v)
            out[k, lattice.directions[e] - 1] = kappa[e]
    return out


def strain_from_triangle_sums(lattice: Lattice, kappa):
    """Average strain from the sum of per-triangle elongation vectors."""
    T = len(lattice.triangles)
    return m_map(Q_INV @ triangle_vectors(lattice, kappa).sum(axis=0)) / T


def boundary_term(lattice: Lattice, kappa):
    """Boundary-edge correction subtracted in `strain_from_elongations`."""
    T = len(lattice.triangles)
    return m_map(Q_INV @ direction_sums(lattice, kappa, lattice.boundary_edges)) / T


def strain_from_elongations(lattice: Lattice, kappa):
    """Average strain from edge elongations, as an edge sum plus boundary term."""
    kappa = np.asarray(kappa, dtype=float)
    E, T = lattice.num_edges, len(lattice.triangles)
    kbar = direction_sums(lattice, kappa) / E
    return 2 * (E / T) * m_map(Q_INV @ kbar) - boundary_term(lattice, kappa)


def boundary_term_bound(lattice: Lattice, kappa) -> float:
    """Upper bound on the Frobenius norm of `boundary_term`."""
    kappa = np.asarray(kappa, dtype=float)
    EB, T = len(lattice.boundary_edges), len(lattice.triangles)
    kmax = np.max(np.abs(kappa[lattice.boundary_edges])) if EB else 0.0
    return float(np.sqrt(2) * EB / T * Q_INV_NORM * kmax)


@dataclass(frozen=True)
class FlatBottomSet:
    s: float
    corners: np.ndarray  # (8, 3) cube corners x
    vertices: np.ndarray  # (8, 2, 2) strains s m(Q^-1 x)


CUBE_CORNERS = np.array(list(itertools.product((0, 1), repeat=3)), dtype=float)


def flat_bottom_point(x, s):
    return s * m_map(Q_INV @ np.asarray(x, dtype=float))


def flat_bottom_vertices(s: float) -> FlatBottomSet:
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    verts = np.array([flat_bottom_point(x, s) for x in CUBE_CORNERS])
    return FlatBottomSet(float(s), CUBE_CORNERS.copy(), verts)


def cube_coordinates(E, s):
    """Cube coordinates ``x`` with ``E = s m(Q^-1 x)``."""
    return Q @ m_inv(E) / s


def flat_bottom_membership(E, s: float):
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    x = cube_coordinates(E, s)
    inside = bool(np.all(x >= -MEMBERSHIP_TOL) and np.all(x <= 1 + MEMBERSHIP_TOL))
    return inside, x


def flat_bottom_samples(s, count, rng):
    """Random members of the flat-bottom set with their cube coordinates."""
    x = rng.uniform(size=(count, 3))
    return x, np.array([flat_bottom_point(xi, s) for xi in x])


@dataclass(frozen=True)
class ApproximationReport:
    Estar: np.ndarray
    error: float
    bound: float
    target_x: np.ndarray
    alpha: np.ndarray
    displacement_residual: float


def strain_approximation_check(
    lattice: Lattice, target, s: float, solve: bool = True, method: str = "argmax"
):
    """Approximate a flat-bottom strain by the strain of a stripe still state.

    Returns the still-state strain, its Frobenius error and the bound
    ``8 s ||Q^-1||_2 / (n - 1)``.
    """
    inside, x = flat_bottom_membership(target, s)
    if not inside:
        raise TargetOutsideD(f"target strain has cube coordinates {x}, outside [0, 1]^3")
    state = approx_concentrations(lattice, np.clip(x, 0.0, 1.0), s, method=method)
    residual = float("nan")
    if solve:
        U = solve_displacements(lattice, state.kappa)
        residual = float(np.linalg.norm(rigidity_matrix(lattice, sparse=True) @ U - state.kappa))
    Estar = strain_from_elongations(lattice, state.kappa)
    error = float(np.linalg.norm(Estar - np.asarray(target, dtype=float)))
    bound = 8 * s * Q_INV_NORM / (lattice.n - 1)
    return ApproximationReport(Estar, error, bound, x, state.alpha, residual)


def eigenvalue_samples(s, resolution):
    """Cube grid points with their flat-bottom strains and eigenvalues.

    Rows are ``(x1, x2, x3, a, b, c, lambda1, lambda2)`` with lambda1 <= lambda2.
    """
    g = np.linspace(0.0, 1.0, resolution)
    rows = []
    for x in itertools.product(g, repeat=3):
        E = flat_bottom_point(x, s)
        lam = np.linalg.eigvalsh(E)
        rows.append((*x, E[0, 0], E[0, 1], E[1, 1], lam[0], lam[1]))
    return np.array(rows)
