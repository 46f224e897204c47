"""Rod and network energies, the Cauchy form and the effective energy density."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .compatibility import rigidity_matrix
from .errors import NonConvergence
from .lattice import Lattice
from .strain import CUBE_CORNERS, Q_INV, flat_bottom_membership, m_inv, m_map


@dataclass(frozen=True)
class RodEnergyParams:
    l: float = 1.0
    s: float = 0.1
    C: float = 1.0

    def __post_init__(self):
        if self.l <= 0 or self.s <= 0 or self.C <= 0:
            raise ValueError(f"l, s and C must be positive: {self}")


def rod_energy_quadratic(x, p: RodEnergyParams):
    # first well carries no stiffness factor, as printed
    x = np.asarray(x, dtype=float)
    return np.minimum(0.5 * (x - p.l) ** 2, 0.5 * p.C * (x - p.l * (1 + p.s)) ** 2)


def rod_energy_poly(x, p: RodEnergyParams):
    x = np.asarray(x, dtype=float)
    return (x - p.l) ** 2 * (x - p.l * (1 + p.s)) ** 2


def link_energy(kappa, p: RodEnergyParams):
    kappa = np.asarray(kappa, dtype=float)
    return 0.5 * p.C * p.l**2 * np.minimum(kappa**2, (kappa - p.s) ** 2)


def link_force(kappa, p: RodEnergyParams):
    """Derivative of `link_energy`; the short well wins ties at s/2."""
    kappa = np.asarray(kappa, dtype=float)
    return p.C * p.l**2 * np.where(kappa <= 0.5 * p.s, kappa, kappa - p.s)


def total_energy(lattice: Lattice, U, p: RodEnergyParams) -> float:
    kappa = rigidity_matrix(lattice, sparse=True) @ np.asarray(U, dtype=float)
    return float(np.sum(link_energy(kappa, p)))


# Cauchy form on (a, b, c): W = (2C/3) [a^2 + 2b^2 + c^2 - (a + c)^2 / 4]
_CAUCHY_ABC = (2.0 / 3.0) * np.array(
    [[0.75, 0.0, -0.25], [0.0, 2.0, 0.0], [-0.25, 0.0, 0.75]]
)
# Frobenius norm squared on (a, b, c)
_FROB_ABC = np.diag([1.0, 2.0, 1.0])


def cauchy_energy(eps, C: float = 1.0) -> float:
    eps = np.asarray(eps, dtype=float)
    tr = np.trace(eps)
    return float(2 * C / 3 * (np.trace(eps @ eps) - 0.25 * tr * tr))


_FACES = ("free", "lower", "upper")


def box_qp(H, target):
    """Minimise ``(x - target)^T H (x - target)`` over the unit cube in R^3.

    Exhaustive enumeration of the 27 free/lower/upper patterns: each pattern
    fixes the bound coordinates and solves the free ones unconstrained.
    Returns ``(x, value, pattern)``.
    """
    H = np.asarray(H, dtype=float)
    target = np.asarray(target, dtype=float)
    best = None
    for pattern in itertools.product(range(3), repeat=3):
        x = np.array([0.0 if f == 1 else 1.0 if f == 2 else np.nan for f in pattern])
        free = np.array([f == 0 for f in pattern])
        if free.any():
            fixed = ~free
            # stationarity in the free block: H_ff (x_f - t_f) = -H_fb (x_b - t_b)
            rhs = -H[np.ix_(free, fixed)] @ (x[fixed] - target[fixed])
            x[free] = target[free] + np.linalg.solve(H[np.ix_(free, free)], rhs)
            if np.any(x[free] < 0.0) or np.any(x[free] > 1.0):
                continue
        d = x - target
        val = float(d @ H @ d)
        if best is None or val < best[1]:
            best = (x, val, pattern)
    return best


def _cube_metric(H_abc, s):
    L = s * Q_INV  # cube coordinates -> (a, b, c)
    return L.T @ H_abc @ L


@dataclass(frozen=True)
class EffectiveDensityResult:
    J: float
    minimizer: np.ndarray
    x: np.ndarray
    active_constraints: tuple = field(default=())

    def to_dict(self):
        a, b, c = m_inv(self.minimizer)
        return {
            "J": self.J,
            "minimizer": {"a": float(a), "b": float(b), "c": float(c)},
            "x": [float(v) for v in self.x],
            "active_set": list(self.active_constraints),
        }


def _active_labels(pattern):
    return tuple(
        f"x{r + 1}={'0' if f == 1 else '1'}" for r, f in enumerate(pattern) if f != 0
    )


def effective_density_full(e, p: RodEnergyParams) -> EffectiveDensityResult:
    """Minimum Cauchy energy of ``e - E`` over flat-bottom strains ``E``."""
    inside, xe = flat_bottom_membership(e, p.s)
    if inside:
        x = np.clip(xe, 0.0, 1.0)
        return EffectiveDensityResult(0.0, np.asarray(e, dtype=float), x, ())
    # the Cauchy form in cube coordinates about the target's own coordinates
    K = p.C * _cube_metric(_CAUCHY_ABC, p.s)
    x, val, pattern = box_qp(K, xe)
    minimizer = p.s * m_map(Q_INV @ x)
    J = cauchy_energy(np.asarray(e, dtype=float) - minimizer, p.C)
    return EffectiveDensityResult(J, minimizer, x, _active_labels(pattern))


def effective_density_corners(e, p: RodEnergyParams) -> float:
    """Zero inside the flat bottom, else the least Cauchy energy to a corner."""
    inside, _ = flat_bottom_membership(e, p.s)
    if inside:
        return 0.0
    e = np.asarray(e, dtype=float)
    return min(cauchy_energy(e - p.s * m_map(Q_INV @ x), p.C) for x in CUBE_CORNERS)


def distance_to_flat_bottom(e, s: float) -> float:
    """Frobenius distance from ``e`` to the flat-bottom set."""
    inside, xe = flat_bottom_membership(e, s)
    if inside:
        return 0.0
    x, _, _ = box_qp(_cube_metric(_FROB_ABC, s), xe)
    return float(np.linalg.norm(np.asarray(e, dtype=float) - s * m_map(Q_INV @ x)))


@dataclass
class RelaxResult:
    U: np.ndarray
    energy: float
    grad_norm: float
    iters: int
    converged: bool
    energies: list


def relax(
    lattice: Lattice,
    U0,
    p: RodEnergyParams,
    max_iters: int = 500,
    grad_tol: float = 1e-12,
    strict: bool = False,
) -> RelaxResult:
    """Steepest descent with Armijo backtracking on the network energy.

    Trial step 1, halved until the Armijo condition with c = 1e-4 holds.
    With ``strict`` a `NonConvergence` is raised when ``grad_tol`` is not met.
    """
    R = rigidity_matrix(lattice, sparse=True)
    U = np.array(U0, dtype=float)

    def energy_grad(V):
        k = R @ V
        return float(np.sum(link_energy(k, p))), R.T @ link_force(k, p)

    f, g = energy_grad(U)
    energies = [f]
    it = 0
    while it < max_iters:
        gn = float(np.linalg.norm(g))
        if gn <= grad_tol:
            break
        step = 1.0
        while True:
            trial = U - step * g
            ft, gt = energy_grad(trial)
            if ft <= f - 1e-4 * step * gn * gn:
                break
            step *= 0.5
            if step < 1e-20:
                break
        if ft > f:
            break
        U, f, g = trial, ft, gt
        energies.append(f)
        it += 1
    gn = float(np.linalg.norm(g))
    result = RelaxResult(U, f, gn, it, gn <= grad_tol, energies)
    if strict and not result.converged:
        raise NonConvergence(
            f"relaxation stopped after {it} iterations with gradient norm {gn:.3e}",
            result=result,
        )
    return result
