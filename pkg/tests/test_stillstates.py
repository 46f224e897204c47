import numpy as np
import pytest
from hypothesis import given, strategies as st

from bistable_lattice.compatibility import hexagon_matrix, solve_displacements
from bistable_lattice.errors import LatticeError, OverlappingLongEdges
from bistable_lattice.lattice import build_lattice
from bistable_lattice.stillstates import (
    all_stripes,
    approx_concentrations,
    concentrations,
    is_still,
    num_stripes,
    stripe,
    stripe_edges,
    sum_states,
    zero_state,
)

S = 0.1


def best_total(sizes, budget):
    """Largest subset sum <= budget, by growing the set of reachable sums."""
    sums = {0}
    for size in sizes:
        sums |= {t + size for t in sums if t + size <= budget}
    return max(sums)


@pytest.mark.parametrize("n", [2, 3, 5, 8])
def test_stripe_structure(n):
    lat = build_lattice(n)
    per_dir = lat.num_edges // 3
    boundary = set(lat.boundary_edges.tolist())
    for g in (1, 2, 3):
        sizes = [stripe_edges(lat, g, j).size for j in range(1, num_stripes(lat) + 1)]
        # sizes climb n .. 2n-2 and back down
        assert sizes == list(range(n, 2 * n - 1)) + list(range(2 * n - 2, n - 1, -1))
        for j in range(1, num_stripes(lat) + 1):
            e = stripe_edges(lat, g, j)
            assert np.all(lat.directions[e] == g)
            assert len(boundary & set(e.tolist())) == 1
            a = stripe(lat, g, j, S).alpha
            assert a[g - 1] == e.size / per_dir
            if n >= 3:
                assert a[g - 1] < 1 / n
            assert np.all(np.delete(a, g - 1) == 0)


@pytest.mark.parametrize("n", [3, 4, 6])
def test_stripes_are_still_and_tile_each_direction(n):
    lat = build_lattice(n)
    Z = hexagon_matrix(lat)
    states = all_stripes(lat, S)
    K = np.array([s.kappa for s in states])
    assert np.all(Z @ K.T == 0)
    G = K @ K.T
    assert np.all(G[~np.eye(len(states), dtype=bool)] == 0)
    m = num_stripes(lat)
    for g in (1, 2, 3):
        assert np.array_equal(K[(g - 1) * m: g * m].sum(axis=0), S * lat.direction_indicator(g))


def test_stripe_index_checks():
    lat = build_lattice(3)
    with pytest.raises(LatticeError):
        stripe_edges(lat, 4, 1)
    with pytest.raises(LatticeError):
        stripe_edges(lat, 1, 0)
    with pytest.raises(LatticeError):
        stripe_edges(lat, 1, num_stripes(lat) + 1)


def test_sum_states():
    lat = build_lattice(4)
    a, b = stripe(lat, 1, 2, S), stripe(lat, 3, 5, S)
    c = sum_states(a, b)
    assert is_still(lat, c.kappa, S)
    assert np.allclose(c.alpha, a.alpha + b.alpha)
    with pytest.raises(OverlappingLongEdges):
        sum_states(a, a)
    with pytest.raises(ValueError):
        sum_states(a, stripe(build_lattice(5), 1, 1, S))
    with pytest.raises(ValueError):
        sum_states(a, stripe(lat, 2, 1, 0.2))


@given(st.integers(3, 7), st.lists(st.booleans(), min_size=36, max_size=36))
def test_any_stripe_union_is_still(n, mask):
    lat = build_lattice(n)
    state = zero_state(lat, S)
    for k, s in enumerate(all_stripes(lat, S)):
        if mask[k % len(mask)]:
            state = sum_states(state, s)
    assert is_still(lat, state.kappa, S)
    assert np.all(np.isin(state.kappa, (0.0, S)))


def test_is_still_rejects():
    lat = build_lattice(3)
    kappa = np.zeros(lat.num_edges)
    kappa[0] = S
    assert not is_still(lat, kappa, S)  # breaks a hexagonal equation
    assert not is_still(lat, np.full(lat.num_edges, 0.05), S)  # wrong values
    assert not is_still(lat, np.zeros(3), S)
    assert is_still(lat, S * np.ones(lat.num_edges) + 1e-14, S)


def test_full_and_empty_targets():
    lat = build_lattice(6)
    assert np.array_equal(approx_concentrations(lat, [1, 1, 1], S).alpha, [1.0, 1.0, 1.0])
    assert np.array_equal(approx_concentrations(lat, [0, 0, 0], S).alpha, [0.0, 0.0, 0.0])


def test_frozen_targets_n10():
    # long-edge counts per direction (out of 252) from the subset-sum oracle
    lat = build_lattice(10)
    state = approx_concentrations(lat, [0.3, 0.5, 0.7], S)
    assert np.array_equal(state.alpha * 252, [75, 126, 176])
    greedy = approx_concentrations(lat, [0.3, 0.5, 0.7], S, method="greedy")
    assert np.array_equal(greedy.alpha * 252, [75, 126, 161])
    assert np.all(np.abs(greedy.alpha - [0.3, 0.5, 0.7]) < 0.1)


@given(st.integers(3, 7), st.tuples(*[st.floats(0, 1)] * 3))
def test_argmax_matches_subset_sum_oracle(n, target):
    lat = build_lattice(n)
    per_dir = lat.num_edges // 3
    state = approx_concentrations(lat, target, S)
    for g in (1, 2, 3):
        sizes = [stripe_edges(lat, g, j).size for j in range(1, num_stripes(lat) + 1)]
        assert round(state.alpha[g - 1] * per_dir) == best_total(sizes, target[g - 1] * per_dir + 1e-9)


@given(st.integers(3, 12), st.tuples(*[st.floats(0, 1)] * 3), st.sampled_from(["argmax", "greedy"]))
def test_concentrations_within_one_over_n(n, target, method):
    lat = build_lattice(n)
    state = approx_concentrations(lat, target, S, method=method)
    assert np.all(state.alpha <= np.asarray(target) + 1e-12)
    assert np.all(np.abs(state.alpha - target) < 1 / n)
    assert np.allclose(concentrations(lat, state.kappa, S), state.alpha)
    assert is_still(lat, state.kappa, S)


def test_approx_preconditions():
    with pytest.raises(LatticeError):
        approx_concentrations(build_lattice(2), [0.5, 0.5, 0.5], S)
    with pytest.raises(ValueError):
        approx_concentrations(build_lattice(3), [1.5, 0, 0], S)
    with pytest.raises(ValueError):
        approx_concentrations(build_lattice(3), [0.5, 0, 0], S, method="magic")


def test_still_state_is_realisable():
    lat = build_lattice(5)
    state = approx_concentrations(lat, [0.4, 0.2, 0.9], S)
    U = solve_displacements(lat, state.kappa)
    assert U.shape == (2 * lat.num_nodes,)
    d = state.to_dict()
    assert set(d) == {"s", "long_edges", "alpha"}
    assert d["long_edges"] == state.long_edges.tolist()
