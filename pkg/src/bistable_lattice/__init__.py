"""Bistable triangular lattices: compatibility, still states, eigenstrains and
effective energy."""
from .lattice import Lattice, build_lattice, counts, node_hexagon
from .compatibility import (
    hexagon_matrix,
    nonlinear_node_residual,
    rank_report,
    rigidity_matrix,
    solve_displacements,
)
from .stillstates import StillState, approx_concentrations, is_still, stripe, sum_states
from .strain import (
    Q,
    Q_INV,
    boundary_term_bound,
    flat_bottom_membership,
    flat_bottom_vertices,
    m_map,
    strain_from_displacements,
    strain_from_elongations,
    strain_approximation_check,
)
from .energy import (
    RodEnergyParams,
    cauchy_energy,
    effective_density_corners,
    effective_density_full,
    link_energy,
    relax,
    total_energy,
)

__version__ = "0.1.0"
