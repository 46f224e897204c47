"""Hexagon-shaped triangular lattice with deterministic indexing.

Nodes carry axial coordinates ``(p, q)`` with ``max(|p|, |q|, |p + q|) <= n - 1``
and planar position ``p * q1 + q * q2``.  Reference rod length is 1.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .errors import LatticeError

SQRT3 = np.sqrt(3.0)

# Lattice direction vectors q1, q2, q3 (rows).
DIRECTIONS = np.array([[1.0, 0.0], [0.5, SQRT3 / 2], [-0.5, SQRT3 / 2]])

# Axial neighbour offsets in counterclockwise order starting along q1,
# with the direction label (1, 2, 3) of the connecting edge.
NEIGHBOR_OFFSETS = ((1, 0), (0, 1), (-1, 1), (-1, 0), (0, -1), (1, -1))
OFFSET_DIRECTION = (1, 2, 3, 1, 2, 3)


def counts(n: int) -> tuple[int, int, int, int, int]:
    """Closed-form (N, E, M, T, EB) for the side-``n`` hexagon."""
    _check_side(n)
    N = 3 * n * n - 3 * n + 1
    E = 9 * n * n - 15 * n + 6
    M = 3 * n * n - 9 * n + 7
    T = 6 * (n - 1) ** 2
    EB = 6 * (n - 1)
    return N, E, M, T, EB


def _check_side(n):
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)):
        raise LatticeError(f"lattice side must be an integer, got {n!r}")
    if n < 2:
        raise LatticeError(f"lattice side must be >= 2, got {n}")


def _readonly(a):
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Lattice:
    n: int
    axial: np.ndarray  # (N, 2) int
    nodes: np.ndarray  # (N, 2) float positions
    edges: np.ndarray  # (E, 3) int rows (i, j, r), i < j
    triangles: np.ndarray  # (T, 3) int, sorted node triples
    interior_nodes: np.ndarray
    boundary_edges: np.ndarray
    _index: dict = field(repr=False)
    _edge_index: dict = field(repr=False)

    @property
    def num_nodes(self):
        return len(self.nodes)

    @property
    def num_edges(self):
        return len(self.edges)

    @property
    def directions(self):
        """Direction label (1, 2, 3) of every edge."""
        return self.edges[:, 2]

    def node_index(self, p, q):
        return self._index.get((int(p), int(q)))

    def edge_between(self, i, j):
        """Index of the edge joining nodes ``i`` and ``j``, or None."""
        return self._edge_index.get((min(i, j), max(i, j)))

    def edge_vectors(self):
        """Unit vectors ``x_j - x_i`` for every stored edge ``(i, j)``."""
        return self.nodes[self.edges[:, 1]] - self.nodes[self.edges[:, 0]]

    def direction_indicator(self, r):
        """0/1 vector of length E marking edges parallel to ``q_r``."""
        return (self.edges[:, 2] == r).astype(float)

    def to_dict(self):
        return {
            "n": int(self.n),
            "nodes": self.nodes.tolist(),
            "edges": self.edges.tolist(),
        }


@lru_cache(maxsize=32)
def build_lattice(n: int) -> Lattice:
    """Build the side-``n`` hexagonal patch of the triangular lattice."""
    _check_side(n)
    m = n - 1
    axial = sorted(
        (p, q)
        for p in range(-m, m + 1)
        for q in range(-m, m + 1)
        if abs(p + q) <= m
    )
    index = {pq: k for k, pq in enumerate(axial)}
    axial_arr = np.array(axial, dtype=int)
    nodes = axial_arr[:, :1] * DIRECTIONS[0] + axial_arr[:, 1:] * DIRECTIONS[1]

    edges = []
    for i, (p, q) in enumerate(axial):
        for (dp, dq), r in zip(NEIGHBOR_OFFSETS, OFFSET_DIRECTION):
            j = index.get((p + dp, q + dq))
            if j is not None and j > i:
                edges.append((i, j, r))
    edges.sort(key=lambda e: (e[0], e[2]))
    edge_index = {(i, j): k for k, (i, j, _) in enumerate(edges)}

    tris = set()
    for i, (p, q) in enumerate(axial):
        for t in range(6):
            a = index.get((p + NEIGHBOR_OFFSETS[t][0], q + NEIGHBOR_OFFSETS[t][1]))
            b = index.get(
                (p + NEIGHBOR_OFFSETS[(t + 1) % 6][0], q + NEIGHBOR_OFFSETS[(t + 1) % 6][1])
            )
            if a is not None and b is not None:
                tris.add(tuple(sorted((i, a, b))))
    triangles = sorted(tris)

    # boundary edges belong to exactly one triangle
    incidence = np.zeros(len(edges), dtype=int)
    for tri in triangles:
        for u, v in ((tri[0], tri[1]), (tri[0], tri[2]), (tri[1], tri[2])):
            incidence[edge_index[(u, v)]] += 1
    boundary = np.flatnonzero(incidence == 1)

    interior = [
        k for k, (p, q) in enumerate(axial) if max(abs(p), abs(q), abs(p + q)) <= m - 1
    ]

    return Lattice(
        n=n,
        axial=_readonly(axial_arr),
        nodes=_readonly(nodes),
        edges=_readonly(np.array(edges, dtype=int).reshape(-1, 3)),
        triangles=_readonly(np.array(triangles, dtype=int).reshape(-1, 3)),
        interior_nodes=_readonly(np.array(interior, dtype=int)),
        boundary_edges=_readonly(boundary),
        _index=index,
        _edge_index=edge_index,
    )


def node_hexagon(lattice: Lattice, node: int):
    """Spoke and rim edge indices around an interior node.

    Both lists follow the counterclockwise neighbour order starting along q1;
    rim edge ``t`` joins neighbours ``t`` and ``t + 1``.
    """
    if not 0 <= node < lattice.num_nodes:
        raise LatticeError(f"node {node} out of range")
    p, q = lattice.axial[node]
    nbrs = [lattice.node_index(p + dp, q + dq) for dp, dq in NEIGHBOR_OFFSETS]
    if any(j is None for j in nbrs):
        raise LatticeError(f"node {node} is on the boundary and has no hexagon")
    spokes = [lattice.edge_between(node, j) for j in nbrs]
    rim = [lattice.edge_between(nbrs[t], nbrs[(t + 1) % 6]) for t in range(6)]
    if any(e is None for e in rim):
        raise LatticeError(f"node {node} has an incomplete rim")
    return spokes, rim
