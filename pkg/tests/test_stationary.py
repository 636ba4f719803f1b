import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import clique_with_external
from qwsearch.errors import (DegreeMismatch, Infeasible, NotAClique, NotAnEdge,
                             PartitionError, TooLarge)
from qwsearch.graphs import (DOWN, LEFT, RIGHT, UP, build_clique_gadget, build_complete,
                             build_hypercube, build_torus_grid, from_edge_list, grid_vertex)
from qwsearch.stationary import (MarkedConfig, StationaryState, check_general_conditions,
                                 clique_state, clique_weights, find_exceptional_partition,
                                 is_stationary, pair_state, partition_state,
                                 solve_correction_weights, triangle_state, triangle_weights)
from qwsearch.walk import WalkState, uniform_state

TRIANGLE = [(0, 1), (1, 2), (0, 2)]
GRID = build_torus_grid(50)
CUBE = build_hypercube(10)


def vertex_sums(graph, amps, vertices):
    return np.array([amps[graph.offsets[v]:graph.offsets[v + 1]].sum() for v in vertices])


def test_pair_state_grid():
    g = GRID
    i, j = grid_vertex(50, 0, 0), grid_vertex(50, 1, 0)
    a = 0.01
    amps = pair_state(g, i, j, a).amplitudes(g)
    facing = [g.arc(i, RIGHT), g.arc(j, LEFT)]
    assert np.all(amps[facing] == -3 * a)
    assert np.all(np.delete(amps, facing) == a)
    assert np.allclose(vertex_sums(g, amps, [i, j]), 0, atol=1e-17)


def test_pair_state_hypercube():
    a = 1 / np.sqrt(10240)
    st_ = pair_state(CUBE, 0, 1, a)
    amps = st_.amplitudes(CUBE)
    assert st_.weight(0, 1) == 9
    assert amps[CUBE.arc(0, 0)] == amps[CUBE.arc(1, 0)] == -9 * a


def test_pair_state_gadget_fig5a():
    g, _ = build_clique_gadget([(0, 1)], (2, 2), 5)
    assert pair_state(g, 0, 1).weight(0, 1) == 2


def test_pair_state_errors():
    with pytest.raises(NotAnEdge):
        pair_state(GRID, 0, 2)
    g, _ = build_clique_gadget([(0, 1)], (1, 2), 5)
    with pytest.raises(DegreeMismatch):
        pair_state(g, 0, 1)


@pytest.mark.parametrize("degrees,expected", [
    ((4, 3, 5), (0, 2, 1)),
    ((4, 3, 6), (-0.5, 2.5, 1.5)),
    ((2, 2, 2), (0, 0, 0)),
])
def test_triangle_closed_form(degrees, expected):
    # oracle: solve the three vertex equations directly
    A = np.array([[1, 1, 0], [1, 0, 1], [0, 1, 1]], dtype=float)
    b = np.array(degrees, dtype=float) - 2
    assert np.allclose(np.linalg.solve(A, b), expected)
    assert triangle_weights(*degrees) == expected


def test_triangle_state_gadgets():
    for att, l in [((2, 1, 3), (0, 2, 1)), ((2, 1, 4), (-0.5, 2.5, 1.5))]:
        g, M = build_clique_gadget(TRIANGLE, att, 5)
        s = triangle_state(g, 0, 1, 2)
        assert (s.weight(0, 1), s.weight(0, 2), s.weight(1, 2)) == l
        assert is_stationary(s, M, graph=g).residual <= 1e-13


def test_isolated_triangle_is_zero_state():
    g = from_edge_list(TRIANGLE)
    s = triangle_state(g, 0, 1, 2, a=1.0)
    assert s.corrections == {(0, 1): 0.0, (0, 2): 0.0, (1, 2): 0.0}
    assert not np.any(s.amplitudes(g))


def test_triangle_not_a_clique():
    with pytest.raises(NotAClique):
        triangle_state(GRID, 0, 1, 2)


def test_clique_k3_matches_triangle():
    g, _ = build_clique_gadget(TRIANGLE, (2, 1, 3), 5)
    assert clique_state(g, [0, 1, 2]).corrections == triangle_state(g, 0, 1, 2).corrections


def test_clique_k2_delegates_to_pair():
    g, _ = build_clique_gadget([(0, 1)], (2, 2), 5)
    assert clique_state(g, [0, 1]) == pair_state(g, 0, 1)


def test_clique_k4_equal_external_is_perfect_matching():
    g = clique_with_external([3, 3, 3, 3])
    s = clique_state(g, range(4), a=1.0)
    nonzero = {e: l for e, l in s.corrections.items() if l != 0}
    assert len(nonzero) == 2 and set(nonzero.values()) == {3.0}
    covered = sorted(v for e in nonzero for v in e)
    assert covered == [0, 1, 2, 3]
    assert np.all(vertex_sums(g, s.amplitudes(g), range(4)) == 0)


def test_clique_k5_vertex_equations_exact():
    ext = [1, 2, 3, 4, 5]
    w = clique_weights(ext)
    for p in range(5):
        assert sum(l for e, l in w.items() if p in e) == ext[p]
    g = clique_with_external(ext)
    s = clique_state(g, range(5))
    assert np.all(vertex_sums(g, s.amplitudes(g) / s.baseline, range(5)) == 0)
    assert is_stationary(s, range(5), graph=g).residual <= 1e-12


def test_clique_weights_ties_and_order():
    w = clique_weights([2, 2, 2, 2, 2])
    for p in range(5):
        assert sum(l for e, l in w.items() if p in e) == 2


def test_partition_state_grid_two_dominoes():
    n = 50
    g = GRID
    v = {xy: grid_vertex(n, *xy) for xy in [(0, 0), (0, 1), (2, 0), (3, 0)]}
    M = MarkedConfig(tuple(v.values()), ((v[0, 0], v[0, 1]), (v[2, 0], v[3, 0])))
    a = 0.01
    amps = partition_state(g, M, a).amplitudes(g)
    corrected = [g.arc(v[0, 0], UP), g.arc(v[0, 1], DOWN),
                 g.arc(v[2, 0], RIGHT), g.arc(v[3, 0], LEFT)]
    assert np.all(amps[corrected] == -3 * a)  # a - 4a
    assert np.all(np.delete(amps, corrected) == a)
    assert is_stationary(amps, M, graph=g).residual <= 1e-13


def test_partition_state_single_pair_equals_pair_state():
    M = MarkedConfig((0, 1), ((0, 1),))
    assert partition_state(GRID, M) == pair_state(GRID, 0, 1)


def pair_plus_triangle_graph():
    # pair {0,1}, triangle {2,3,4}, marked cross edge 1-2, hub K6 at 5..10
    edges = [(0, 1), (2, 3), (3, 4), (2, 4), (1, 2)]
    hub = list(range(5, 11))
    edges += list(itertools.combinations(hub, 2))
    edges += [(0, 5), (0, 6), (1, 5), (3, 7), (4, 8), (4, 9), (4, 10)]
    return from_edge_list(edges)


def test_partition_pair_plus_triangle():
    g = pair_plus_triangle_graph()
    assert g.degrees[0] == g.degrees[1] == 3
    M = MarkedConfig((0, 1, 2, 3, 4), ((0, 1), (2, 3, 4)))
    s = partition_state(g, M)
    amps = s.amplitudes(g)
    assert np.allclose(vertex_sums(g, amps, range(5)), 0, atol=1e-15)
    assert is_stationary(s, M, graph=g).residual <= 1e-12


@pytest.mark.parametrize("partition,msg", [
    (((0, 1),), "does not cover"),
    (((0, 1), (2, 3, 4), (4,)), "fewer than two"),
    (((0, 1), (1, 2, 3)), None),
    (((0, 2), (1, 3, 4)), "not adjacent"),
    (((0, 1), (2, 3, 4, 5)), "unmarked"),
])
def test_partition_errors(partition, msg):
    g = pair_plus_triangle_graph()
    with pytest.raises(PartitionError) as err:
        partition_state(g, MarkedConfig((0, 1, 2, 3, 4), partition))
    if msg:
        assert msg in str(err.value)
    assert err.value.group is None or isinstance(err.value.group, tuple)


def test_partition_unequal_pair_rejected():
    g, _ = build_clique_gadget([(0, 1)], (1, 2), 5)
    with pytest.raises(PartitionError, match="unequal degrees"):
        partition_state(g, MarkedConfig((0, 1), ((0, 1),)))


def test_general_conditions():
    g = GRID
    M = [0, 1]
    rep = check_general_conditions(pair_state(g, 0, 1), M, graph=g)
    assert rep.passed
    assert rep.unmarked_equal.worst == rep.partners_equal.worst == 0
    assert rep.marked_zero_sum.worst <= 1e-16

    u = check_general_conditions(uniform_state(g), M)
    assert not u.marked_zero_sum.passed
    assert u.marked_zero_sum.worst == pytest.approx(4 * 0.01)
    assert u.unmarked_equal.passed and u.partners_equal.passed

    amps = pair_state(g, 0, 1).amplitudes(g)
    amps[g.arc(0, UP)] *= 1.5
    amps[g.arc(0, DOWN)] -= 0.5 * amps[g.arc(0, UP)] / 1.5  # keep block sum at zero
    bad = check_general_conditions(WalkState(amps, g), M)
    assert not bad.partners_equal.passed
    assert len(bad.lines()) == 3


def test_is_stationary_grid_and_hypercube():
    assert is_stationary(pair_state(GRID, 0, 1), [0, 1], graph=GRID).residual <= 1e-13
    chk = is_stationary(pair_state(CUBE, 0, 1), [0, 1], graph=CUBE)
    assert chk.stationary and chk.residual <= 1e-13


def test_naive_pair_on_unequal_degrees_is_not_stationary():
    g, M = build_clique_gadget([(0, 1)], (1, 2), 5)
    s = pair_state(g, 0, 1, strict=False)
    chk = is_stationary(s, M, graph=g)
    assert not chk.stationary
    assert chk.residual > 0.1 * s.baseline


def test_find_partition_examples():
    n = 50
    p = find_exceptional_partition(GRID, [grid_vertex(n, 0, 0), grid_vertex(n, 0, 1)])
    assert p == ((0, 1),)
    assert find_exceptional_partition(GRID, [grid_vertex(n, 0, 0), grid_vertex(n, 0, 2)]) is None
    g, M = build_clique_gadget(TRIANGLE, (2, 1, 3), 5)
    assert find_exceptional_partition(g, M.marked) == ((0, 1, 2),)
    g5b, M5b = build_clique_gadget([(0, 1)], (1, 2), 5)
    assert find_exceptional_partition(g5b, M5b.marked) is None
    assert find_exceptional_partition(GRID, []) == ()


def test_find_partition_cap():
    with pytest.raises(TooLarge) as err:
        find_exceptional_partition(GRID, range(21))
    assert err.value.cap == 20
    # 2x10 block of the grid tiles by dominoes
    block = [grid_vertex(50, x, y) for x in range(10) for y in range(2)]
    part = find_exceptional_partition(GRID, block)
    assert part is not None and len(part) == 10


def test_solve_pair_and_triangle():
    s = solve_correction_weights(GRID, [0, 1])
    assert s.weight(0, 1) == pytest.approx(3, abs=1e-12)
    g, M = build_clique_gadget(TRIANGLE, (2, 1, 3), 5)
    lin = solve_correction_weights(g, M.marked)
    closed = triangle_state(g, 0, 1, 2)
    for e in closed.corrections:
        assert lin.corrections[e] == pytest.approx(closed.corrections[e], abs=1e-12)
    assert is_stationary(lin, M, graph=g).stationary


def test_solve_infeasible():
    with pytest.raises(Infeasible) as err:
        solve_correction_weights(GRID, [0, 2])
    assert err.value.residual > 0
    g, M = build_clique_gadget([(0, 1)], (1, 2), 5)
    with pytest.raises(Infeasible):
        solve_correction_weights(g, M.marked)


def test_decomposition_support():
    n = 50
    v = [grid_vertex(n, *xy) for xy in [(0, 0), (0, 1), (2, 0), (3, 0)]]
    M = MarkedConfig(tuple(v), ((v[0], v[1]), (v[2], v[3])))
    moving = uniform_state(GRID).amplitudes - partition_state(GRID, M).amplitudes(GRID)
    support = set(np.flatnonzero(moving).tolist())
    intra = {a for grp in M.partition for a in GRID.edge_arcs(*grp)}
    assert support == intra


def test_json_roundtrip():
    g, _ = build_clique_gadget(TRIANGLE, (2, 1, 4), 5)
    s = triangle_state(g, 0, 1, 2)
    doc = json.loads(s.to_json())
    assert [c["edge"] for c in doc["corrections"]] == [[0, 1], [0, 2], [1, 2]]
    assert StationaryState.from_dict(doc) == s


# property: any partition the search returns is sound

@st.composite
def small_graph_and_marks(draw):
    n = draw(st.integers(4, 9))
    pairs = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=n, unique=True))
    # ring backbone keeps every vertex non-isolated
    edges = set(chosen) | {(min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n)}
    g = from_edge_list(sorted(edges))
    marks = draw(st.sets(st.integers(0, n - 1), min_size=1, max_size=6))
    return g, sorted(marks)


@settings(max_examples=200, deadline=None)
@given(small_graph_and_marks())
def test_found_partitions_are_stationary(args):
    g, marks = args
    part = find_exceptional_partition(g, marks)
    if part is None:
        return
    M = MarkedConfig(tuple(marks), part)
    s = partition_state(g, M)
    assert is_stationary(s, M, graph=g).residual <= 1e-12
    rep = check_general_conditions(s, M, 1e-14, graph=g)
    assert rep.passed


@settings(max_examples=200, deadline=None)
@given(small_graph_and_marks())
def test_solver_output_is_stationary_when_feasible(args):
    g, marks = args
    try:
        s = solve_correction_weights(g, marks)
    except Infeasible:
        assert find_exceptional_partition(g, marks) is None
        return
    assert is_stationary(s, marks, graph=g).residual <= 1e-12
