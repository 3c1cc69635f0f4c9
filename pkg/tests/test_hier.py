import json
import random

import pytest
from hypothesis import given, settings, strategies as st

from treematch.bigraph import BipartiteGraph, check_matching, mwm_exact
from treematch.generate import random_hier_instance
from treematch.hier import (HierInstance, InstanceFormatError, classify_nodes,
                            critical_degree_holds, instance_from_parents, load_instance,
                            phi_band, pi_band, secw, seventh_root_floor, solve_critical_set,
                            solve_hierarchical, validate_instance)

# root 0 (w=10) with children 1 (w=6) and 2 (w=4)
SMALL = instance_from_parents([-1, 0, 0], [10, 6, 4],
                              {0: [(1, 0, 5), (2, 0, 2), (2, 1, 2)]})


def classed_instance():
    """b = 3, so b^3 = 27.  Root has secw 28; node 2 weighs 28 with light children."""
    parents = [-1, 0, 0, 0, 1, 1, 2, 2, 3, 3]
    weights = [300, 100, 28, 5, 90, 3, 20, 5, 1, 1]
    edges = {
        0: [(1, 0, 30), (1, 1, 20), (2, 1, 9), (2, 2, 10), (3, 0, 2), (3, 2, 3)],
        1: [(4, 0, 80), (5, 0, 1), (5, 1, 2)],
        2: [(6, 0, 7), (7, 0, 4)],
        3: [(8, 0, 1), (9, 0, 1)],
    }
    return instance_from_parents(parents, weights, edges)


def test_validate_examples():
    assert validate_instance(HierInstance(((),), (1,))) is None
    assert validate_instance(SMALL) is None
    heavy = instance_from_parents([-1, 0, 0], [10, 6, 4], {0: [(2, 0, 3), (2, 1, 2)]})
    assert "weigh 5" in validate_instance(heavy)
    over = instance_from_parents([-1, 0, 0], [9, 6, 4], {})
    assert "children weigh" in validate_instance(over)
    isolated = HierInstance(((1,), ()), (3, 2), {0: ((1,), BipartiteGraph(1, 2, ((0, 0, 1),)))})
    assert "isolated" in validate_instance(isolated)


def test_secw():
    inst = instance_from_parents([-1, 0, 0, 0, 1, 4, 4], [20, 5, 3, 2, 4, 2, 2], {})
    assert secw(inst, 0) == 3
    assert secw(inst, 1) == 0
    assert secw(inst, 4) == 2
    twins = instance_from_parents([-1, 0, 0], [8, 4, 4], {})
    assert secw(twins, 0) == 4


def test_critical_degree():
    inst = instance_from_parents([-1, 0, 0, 1, 1, 2, 2, 2], [20, 7, 12, 4, 2, 4, 4, 4], {})
    # explicit threshold: children {4, 2} have one member >= 3
    assert critical_degree_holds(inst, [1], 1, delta=3)
    # threshold from the set itself: min(7, 12) = 7, nothing below reaches it
    assert critical_degree_holds(inst, [1, 2], 0)
    assert critical_degree_holds(inst, [2], 3, delta=1)
    assert not critical_degree_holds(inst, [2], 2, delta=4)
    with pytest.raises(ValueError):
        critical_degree_holds(inst, [], 1)


def test_solve_critical_set_examples():
    got = solve_critical_set(SMALL, [0], 2)
    assert got[0].weight == 7
    assert got[0].pairs == {(0, 0), (1, 1)}  # left 0 is child 1, left 1 is child 2
    inst = classed_instance()
    hubless = solve_critical_set(inst, [3], 2)
    assert hubless[3].weight == mwm_exact(inst.graph(3)[1]).weight == 1
    with pytest.raises(ValueError):
        solve_critical_set(inst, [0, 3], 2)


def test_band_arithmetic():
    assert phi_band(28, 27) == 1
    assert phi_band(54, 27) == 1
    assert phi_band(55, 27) == 2
    assert pi_band(2, 3) == 4  # 3^4 < 2^7 <= 3^5
    assert pi_band(27, 3) == 20
    assert seventh_root_floor(127) == 1
    assert seventh_root_floor(128) == 2


def test_classify_examples():
    inst = classed_instance()
    assert inst.b == 3
    classes = classify_nodes(inst)
    assert classes.phi == {1: {0}}
    assert classes.pi_prime == {1, 2}
    assert classes.pi == {10: {3}}
    assert not classes.residual

    assert classify_nodes(SMALL).residual == {0}  # b = 2 collapses every band
    unit = instance_from_parents([-1, 0, 0, 1, 1], [9, 3, 2, 1, 1],
                                 {0: [(1, 0, 1)], 1: [(3, 0, 1)]})
    assert unit.b == 1
    assert classify_nodes(unit).residual == {0, 1}


def test_solve_hierarchical_classed():
    inst = classed_instance()
    assert validate_instance(inst) is None
    got = solve_hierarchical(inst)
    for u, (_, g) in inst.graphs.items():
        assert got[u].weight == mwm_exact(g).weight
        assert check_matching(g, got[u]) is None


def test_three_internal_nodes():
    """Root with two internal children, each carrying its own graph."""
    inst = instance_from_parents(
        [-1, 0, 0, 1, 1, 1, 2, 2], [30, 14, 12, 5, 4, 3, 6, 6],
        {0: [(1, 0, 9), (1, 1, 4), (2, 0, 8), (2, 2, 3)],
         1: [(3, 0, 5), (4, 0, 2), (4, 1, 2), (5, 1, 3)],
         2: [(6, 0, 6), (7, 0, 5), (7, 1, 1)]})
    assert validate_instance(inst) is None
    got = solve_hierarchical(inst)
    assert {u: m.weight for u, m in got.items()} == {0: 12, 1: 8, 2: 7}
    assert got[0].weight == mwm_exact(inst.graph(0)[1]).weight


def test_single_internal_node():
    got = solve_hierarchical(SMALL)
    assert got[0].weight == mwm_exact(SMALL.graph(0)[1]).weight


def test_invalid_instance_rejected():
    with pytest.raises(ValueError):
        solve_hierarchical(instance_from_parents([-1, 0], [1, 2], {}))


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_instances(seed):
    inst = random_hier_instance(random.Random(seed), 50, 500)
    assert validate_instance(inst) is None
    got = solve_hierarchical(inst)
    for u in inst.internal_nodes():
        _, g = inst.graph(u)
        assert got[u].weight == mwm_exact(g).weight
    classes = classify_nodes(inst)
    members = [u for group in classes.groups() for u in group]
    assert sorted(members) == inst.internal_nodes()
    wr = inst.weight[inst.root]
    x = 1
    while x <= wr:
        assert sum(1 for u in range(inst.n) if secw(inst, u) > x) < wr / x
        x *= 2


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.integers(3, 6))
def test_forced_bands_route_correctly(seed, b):
    """Same graphs, but the band thresholds of a larger b; every route must stay exact."""
    inst = random_hier_instance(random.Random(seed), 40, 500)
    classes = classify_nodes(inst, b)
    for k, group in classes.pi.items():
        assert critical_degree_holds(inst, group, seventh_root_floor(b))
        got = solve_critical_set(inst, group, seventh_root_floor(b))
        for u in group:
            assert got[u].weight == mwm_exact(inst.graph(u)[1]).weight
    if classes.pi_prime:
        got = solve_critical_set(inst, classes.pi_prime, 1)
        for u in classes.pi_prime:
            assert got[u].weight == mwm_exact(inst.graph(u)[1]).weight


def test_load_instance():
    doc = {"nodes": [
        {"id": "r", "weight": 10, "children": ["a", "b"],
         "graph": {"y_count": 2, "edges": [["a", 0, 5], ["b", 0, 2], ["b", 1, 2]]}},
        {"id": "a", "weight": 6, "children": []},
        {"id": "b", "weight": 4},
    ]}
    inst, ids = load_instance(json.dumps(doc))
    assert ids == ["r", "a", "b"]
    assert validate_instance(inst) is None
    assert solve_hierarchical(inst)[0].weight == 7


@pytest.mark.parametrize("text", ["not json", "{}", '{"nodes": []}',
                                  '{"nodes": [{"id": 1, "weight": 2, "children": [5]}]}'])
def test_load_instance_errors(text):
    with pytest.raises(InstanceFormatError):
        load_instance(text)
