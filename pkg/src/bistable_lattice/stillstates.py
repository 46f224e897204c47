"""Still states built from stripes.

A stripe of group r is the set of direction-r edges cut by one lattice line
parallel to the next direction (q2 for r=1, q3 for r=2, q1 for r=3).  Such a
cut is a slip of one half of the patch against the other, so every hexagon
sees either no long edge or one long spoke and one long rim edge.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .compatibility import hexagon_matrix
from .errors import LatticeError, OverlappingLongEdges
from .lattice import Lattice

SNAP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class StillState:
    kappa: np.ndarray
    s: float
    alpha: np.ndarray
    n: int

    @property
    def long_edges(self):
        return np.flatnonzero(self.kappa != 0)

    def to_dict(self):
        return {
            "s": float(self.s),
            "long_edges": self.long_edges.tolist(),
            "alpha": [float(a) for a in self.alpha],
        }


def concentrations(lattice: Lattice, kappa, s):
    """Fraction of long (== s) edges in each lattice direction."""
    long = np.isclose(np.asarray(kappa, dtype=float), s, rtol=0, atol=SNAP_TOL)
    per_dir = lattice.num_edges // 3
    return np.array(
        [np.count_nonzero(long & (lattice.directions == r)) / per_dir for r in (1, 2, 3)]
    )


def _state(lattice, long_idx, s):
    kappa = np.zeros(lattice.num_edges)
    kappa[long_idx] = s
    return StillState(kappa, float(s), concentrations(lattice, kappa, s), lattice.n)


def num_stripes(lattice: Lattice) -> int:
    """Stripes per group."""
    return 2 * (lattice.n - 1)


def stripe_edges(lattice: Lattice, group: int, index: int):
    """Edge indices of stripe ``index`` (1-based) in ``group``."""
    if group not in (1, 2, 3):
        raise LatticeError(f"stripe group must be 1, 2 or 3, got {group}")
    if not 1 <= index <= num_stripes(lattice):
        raise LatticeError(
            f"stripe index must lie in 1..{num_stripes(lattice)}, got {index}"
        )
    cut = index - lattice.n  # lower side of the cut line, in -(n-1)..n-2
    i, j, r = lattice.edges.T
    ai, aj = lattice.axial[i], lattice.axial[j]
    if group == 1:
        side_i, side_j = ai[:, 0], aj[:, 0]  # lines of constant p
    elif group == 2:
        side_i, side_j = ai.sum(axis=1), aj.sum(axis=1)  # constant p + q
    else:
        side_i, side_j = ai[:, 1], aj[:, 1]  # constant q
    lo = np.minimum(side_i, side_j)
    return np.flatnonzero((r == group) & (lo == cut) & (side_i != side_j))


def stripe(lattice: Lattice, group: int, index: int, s: float) -> StillState:
    return _state(lattice, stripe_edges(lattice, group, index), s)


def all_stripes(lattice: Lattice, s: float):
    return [
        stripe(lattice, g, j, s)
        for g in (1, 2, 3)
        for j in range(1, num_stripes(lattice) + 1)
    ]


def zero_state(lattice: Lattice, s: float) -> StillState:
    return _state(lattice, np.array([], dtype=int), s)


def sum_states(a: StillState, b: StillState) -> StillState:
    """Sum of two still states with disjoint long edges."""
    if a.n != b.n or a.kappa.shape != b.kappa.shape:
        raise ValueError("still states live on different lattices")
    if a.s != b.s:
        raise ValueError(f"critical elongations differ: {a.s} vs {b.s}")
    shared = np.flatnonzero((a.kappa != 0) & (b.kappa != 0))
    if shared.size:
        raise OverlappingLongEdges(
            f"long edge {shared[0]} appears in both states", edge=int(shared[0])
        )
    return StillState(a.kappa + b.kappa, a.s, a.alpha + b.alpha, a.n)


def _greedy_prefix(sizes, budget):
    picked, count = [], 0
    for k, size in enumerate(sizes):
        if count + size > budget:
            break
        count += size
        picked.append(k)
    return picked


def _largest_subset(sizes, budget):
    """Indices of a stripe subset with the largest total size <= budget.

    0/1 knapsack over achievable totals; among equal totals the subset found
    first in ascending stripe order wins.
    """
    cap = int(np.floor(budget + 1e-9))
    came_from = np.full(cap + 1, -1, dtype=int)
    reached = np.zeros(cap + 1, dtype=bool)
    reached[0] = True
    for k, size in enumerate(sizes):
        if size > cap:
            continue
        new = np.zeros_like(reached)
        new[size:] = reached[:-size] & ~reached[size:]
        came_from[new] = k
        reached |= new
    t = int(np.flatnonzero(reached).max())
    picked = []
    while t > 0:
        k = came_from[t]
        picked.append(int(k))
        t -= sizes[k]
    return sorted(picked)


@lru_cache(maxsize=64)
def _group_stripes(lattice: Lattice, group: int):
    return tuple(
        stripe_edges(lattice, group, j) for j in range(1, num_stripes(lattice) + 1)
    )


def approx_concentrations(
    lattice: Lattice, target, s: float, method: str = "argmax"
) -> StillState:
    """Union of stripes whose concentrations approximate ``target`` from below.

    ``method="argmax"`` takes, per group, the stripe subset with the largest
    long-edge count not exceeding the target; ``method="greedy"`` adds stripes
    in ascending index until the next one would overshoot.  Either way each
    concentration is within 1/n of the target.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (3,) or np.any(target < 0) or np.any(target > 1):
        raise ValueError(f"target concentrations must lie in [0, 1]^3, got {target}")
    if lattice.n < 3:
        raise LatticeError("concentration targeting needs n >= 3")
    select = {"argmax": _largest_subset, "greedy": _greedy_prefix}.get(method)
    if select is None:
        raise ValueError(f"unknown selection method {method!r}")
    per_dir = lattice.num_edges // 3
    chosen = []
    for g in (1, 2, 3):
        stripes = _group_stripes(lattice, g)
        picked = select([e.size for e in stripes], target[g - 1] * per_dir)
        chosen += [stripes[k] for k in picked]
    long_idx = np.concatenate(chosen) if chosen else np.array([], dtype=int)
    return _state(lattice, long_idx, s)


def is_still(lattice: Lattice, kappa, s: float) -> bool:
    kappa = np.asarray(kappa, dtype=float)
    if kappa.shape != (lattice.num_edges,):
        return False
    snapped = np.where(np.abs(kappa) <= SNAP_TOL, 0.0, kappa)
    snapped = np.where(np.abs(snapped - s) <= SNAP_TOL, s, snapped)
    if not np.all((snapped == 0) | (snapped == s)):
        return False
    # integer test on the long-edge indicator keeps the check exact
    indicator = (snapped == s).astype(np.int64)
    Z = hexagon_matrix(lattice, sparse=True).astype(np.int64)
    return not np.any(Z @ indicator)
