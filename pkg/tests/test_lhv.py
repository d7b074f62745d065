import itertools

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cna.chains import Scenario
from cna.errors import CapacityError, InvalidAssignmentError
from cna.lhv import (
    CompatibilityGraph,
    DeterministicAssignment,
    assignments_total,
    chain_cycle_graph,
    classical_fraction_bound,
    has_directed_cycle,
    joint_event_impossible,
    logical_bell_classical_max,
    theorem1_equal_on_cycle,
)


def graph_from_edges(directed):
    vertices = sorted({v for e in directed for v in e})
    undirected = [tuple(e) for e in directed]
    return CompatibilityGraph(vertices, undirected, [tuple(e) for e in directed])


def dfs_cycle_oracle(g):
    """Independent recursive DFS used as a cross-check."""
    adj = {v: [] for v in g.vertices}
    for u, v in g.directed_edges:
        adj[u].append(v)
    visiting, done = set(), set()

    def visit(node):
        if node in visiting:
            return True
        if node in done:
            return False
        visiting.add(node)
        found = any(visit(child) for child in adj[node])
        visiting.discard(node)
        done.add(node)
        return found

    return any(visit(v) for v in g.vertices)


class TestDirectedCycle:
    def test_three_cycle(self):
        g = graph_from_edges([("1", "2"), ("2", "3"), ("3", "1")])
        assert has_directed_cycle(g)

    def test_path(self):
        g = graph_from_edges([("1", "2"), ("2", "3")])
        assert not has_directed_cycle(g)

    def test_chain_cycle_with_event_edges(self):
        g = chain_cycle_graph(k=3, j=2)
        assert has_directed_cycle(g)

    def test_chain_cycle_without_event_edges(self):
        g = chain_cycle_graph(k=3, j=2, include_event_edges=False)
        assert not has_directed_cycle(g)

    def test_agrees_with_independent_dfs(self):
        rng = np.random.default_rng(42)
        for _ in range(1000):
            n = int(rng.integers(2, 21))
            vertices = [str(i) for i in range(n)]
            n_edges = int(rng.integers(0, 3 * n))
            edges = set()
            for _ in range(n_edges):
                u, v = rng.integers(0, n, size=2)
                edges.add((str(u), str(v)))
            undirected = [tuple(e) for e in edges]
            g = CompatibilityGraph(vertices, undirected, list(edges))
            assert has_directed_cycle(g) == dfs_cycle_oracle(g)

    @given(seed=st.integers(0, 5000))
    def test_adding_edges_is_monotone(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 10))
        vertices = [str(i) for i in range(n)]
        edges = {(str(rng.integers(0, n)), str(rng.integers(0, n)))
                 for _ in range(int(rng.integers(1, 2 * n)))}
        extra = (str(rng.integers(0, n)), str(rng.integers(0, n)))
        base = CompatibilityGraph(vertices, [tuple(e) for e in edges], list(edges))
        bigger_edges = edges | {extra}
        bigger = CompatibilityGraph(vertices, [tuple(e) for e in bigger_edges], list(bigger_edges))
        if has_directed_cycle(base):
            assert has_directed_cycle(bigger)


class TestGraphType:
    def test_directed_edge_needs_undirected_support(self):
        with pytest.raises(ValueError):
            CompatibilityGraph(["a", "b"], [], [("a", "b")])

    def test_json_round_trip(self):
        g = chain_cycle_graph(k=2, j=1)
        doc = g.to_json_dict()
        back = CompatibilityGraph.from_json_dict(doc)
        assert back.vertices == g.vertices
        assert back.undirected_edges == g.undirected_edges
        assert back.directed_edges == g.directed_edges


class TestTheorem1:
    def test_constant_cycle(self):
        g = graph_from_edges([("1", "2"), ("2", "3"), ("3", "1")])
        a = DeterministicAssignment({"1": 2, "2": 2, "3": 2})
        assert theorem1_equal_on_cycle(g, a)

    def test_violating_assignment_rejected(self):
        g = graph_from_edges([("1", "2"), ("2", "3"), ("3", "1")])
        a = DeterministicAssignment({"1": 1, "2": 2, "3": 2})
        with pytest.raises(InvalidAssignmentError):
            theorem1_equal_on_cycle(g, a)

    def test_exhaustive_four_cycle_d3(self):
        g = graph_from_edges([("1", "2"), ("2", "3"), ("3", "4"), ("4", "1")])
        checked = 0
        for values in itertools.product(range(1, 4), repeat=4):
            a = DeterministicAssignment(dict(zip("1234", values)))
            try:
                assert theorem1_equal_on_cycle(g, a)
                checked += 1
            except InvalidAssignmentError:
                continue
        assert checked == 3  # only the constant assignments respect all edges

    def test_off_cycle_vertices_unconstrained(self):
        g = CompatibilityGraph(
            ["1", "2", "3", "x"],
            [("1", "2"), ("2", "3"), ("3", "1"), ("1", "x")],
            [("1", "2"), ("2", "3"), ("3", "1"), ("1", "x")],
        )
        a = DeterministicAssignment({"1": 1, "2": 1, "3": 1, "x": 3})
        assert theorem1_equal_on_cycle(g, a)


class TestEnumeration:
    @pytest.mark.parametrize("k,d,expected_total", [(2, 2, 16), (3, 2, 64), (2, 4, 256)])
    def test_joint_event_impossible(self, k, d, expected_total):
        scenario = Scenario(k=k, d=d, j=1)
        assert assignments_total(scenario) == expected_total
        assert joint_event_impossible(scenario)

    @pytest.mark.parametrize("k,d,j", [(2, 2, 1), (6, 2, 1), (2, 3, 2)])
    def test_classical_fraction_bound_is_zero(self, k, d, j):
        bound = classical_fraction_bound(Scenario(k=k, d=d, j=j))
        assert bound == 0.0

    @pytest.mark.parametrize("k,d,expected", [(2, 2, 3), (6, 2, 11), (2, 4, 3)])
    def test_logical_bell_classical_max(self, k, d, expected):
        assert logical_bell_classical_max(Scenario(k=k, d=d, j=1)) == expected

    def test_invariants_across_small_scenarios(self):
        cases = [(k, 2) for k in range(2, 7)] + [(2, 3), (2, 4), (2, 5), (3, 3)]
        for k, d in cases:
            scenario = Scenario(k=k, d=d, j=1)
            if assignments_total(scenario) > 10**6:
                continue
            assert joint_event_impossible(scenario)
            assert classical_fraction_bound(scenario) == 0.0
            assert logical_bell_classical_max(scenario) == 2 * k - 1

    def test_capacity_cap(self):
        with pytest.raises(CapacityError):
            joint_event_impossible(Scenario(k=8, d=6, j=1))

    def test_bound_zero_for_every_break_index(self):
        for j in range(1, 6):
            assert classical_fraction_bound(Scenario(k=3, d=2, j=j)) == 0.0
