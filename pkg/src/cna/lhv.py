"""Classical (local hidden variable) side of the argument.

Compatibility graphs with ordered-pair edges encode which measurements are
jointly measurable and which outcome orderings hold with certainty.  A
directed cycle forces all its vertices to share one value under local
realism, which is what makes the chained argument classically impossible.
The bounds themselves are certified by exhaustive enumeration over
deterministic assignments (the vertices of the LHV polytope).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .chains import Scenario
from .errors import CapacityError, InvalidAssignmentError

ASSIGNMENT_CAP = 10 ** 8
_BLOCK = 1 << 16


@dataclass
class CompatibilityGraph:
    """Vertices are measurement labels; undirected edges mark joint
    measurability; a directed edge (u, v) states outcome(u) <= outcome(v)."""

    vertices: list[str]
    undirected_edges: list[tuple[str, str]] = field(default_factory=list)
    directed_edges: list[tuple[str, str]] = field(default_factory=list)

    def __post_init__(self):
        vertex_set = set(self.vertices)
        for u, v in self.undirected_edges:
            if u not in vertex_set or v not in vertex_set:
                raise ValueError(f"undirected edge ({u}, {v}) references unknown vertex")
        undirected = {frozenset(e) for e in self.undirected_edges}
        for u, v in self.directed_edges:
            if frozenset((u, v)) not in undirected:
                raise ValueError(
                    f"directed edge ({u}, {v}) does not overlay an undirected edge"
                )

    def to_json_dict(self) -> dict:
        return {
            "vertices": list(self.vertices),
            "undirected_edges": [list(e) for e in self.undirected_edges],
            "directed_edges": [list(e) for e in self.directed_edges],
        }

    @staticmethod
    def from_json_dict(doc: dict) -> "CompatibilityGraph":
        return CompatibilityGraph(
            vertices=[str(v) for v in doc["vertices"]],
            undirected_edges=[(str(u), str(v)) for u, v in doc["undirected_edges"]],
            directed_edges=[(str(u), str(v)) for u, v in doc["directed_edges"]],
        )


@dataclass
class DeterministicAssignment:
    """Pre-existing outcome values, one per measurement label."""

    values: dict[str, int]


def chain_cycle_graph(k: int, j: int, include_event_edges: bool = True) -> CompatibilityGraph:
    """The 2k-cycle graph of a chained scenario.

    Zero-probability edges contribute forward ordered pairs (M_i, M_{i+1})
    for i != j.  With ``include_event_edges`` the two event pairs
    (M_2k, M_1) and (M_j, M_{j+1}) are added, closing a directed cycle.
    """
    n = 2 * k
    vertices = [f"M{i}" for i in range(1, n + 1)]
    undirected = [(f"M{i}", f"M{i + 1}") for i in range(1, n)] + [(f"M{n}", "M1")]
    directed = [(f"M{i}", f"M{i + 1}") for i in range(1, n) if i != j]
    if include_event_edges:
        directed.append((f"M{n}", "M1"))
        directed.append((f"M{j}", f"M{j + 1}"))
    return CompatibilityGraph(vertices, undirected, directed)


def _adjacency(g: CompatibilityGraph) -> dict[str, list[str]]:
    adj: dict[str, list[str]] = {v: [] for v in g.vertices}
    for u, v in g.directed_edges:
        adj[u].append(v)
    return adj


def has_directed_cycle(g: CompatibilityGraph) -> bool:
    """Iterative three-color DFS over the directed-edge subgraph."""
    adj = _adjacency(g)
    WHITE, GRAY, BLACK = 0, 1, 2
    color = {v: WHITE for v in g.vertices}
    for root in g.vertices:
        if color[root] != WHITE:
            continue
        stack: list[tuple[str, int]] = [(root, 0)]
        color[root] = GRAY
        while stack:
            node, edge_pos = stack[-1]
            if edge_pos < len(adj[node]):
                stack[-1] = (node, edge_pos + 1)
                child = adj[node][edge_pos]
                if color[child] == GRAY:
                    return True
                if color[child] == WHITE:
                    color[child] = GRAY
                    stack.append((child, 0))
            else:
                color[node] = BLACK
                stack.pop()
    return False


def _strongly_connected_components(g: CompatibilityGraph) -> list[list[str]]:
    """Tarjan's algorithm, iterative."""
    adj = _adjacency(g)
    index: dict[str, int] = {}
    lowlink: dict[str, int] = {}
    on_stack: dict[str, bool] = {}
    stack: list[str] = []
    components: list[list[str]] = []
    counter = 0

    for root in g.vertices:
        if root in index:
            continue
        work: list[tuple[str, int]] = [(root, 0)]
        while work:
            node, edge_pos = work[-1]
            if edge_pos == 0:
                index[node] = lowlink[node] = counter
                counter += 1
                stack.append(node)
                on_stack[node] = True
            advanced = False
            for pos in range(edge_pos, len(adj[node])):
                child = adj[node][pos]
                if child not in index:
                    work[-1] = (node, pos + 1)
                    work.append((child, 0))
                    advanced = True
                    break
                if on_stack.get(child, False):
                    lowlink[node] = min(lowlink[node], index[child])
            if advanced:
                continue
            work.pop()
            if work:
                parent = work[-1][0]
                lowlink[parent] = min(lowlink[parent], lowlink[node])
            if lowlink[node] == index[node]:
                comp = []
                while True:
                    w = stack.pop()
                    on_stack[w] = False
                    comp.append(w)
                    if w == node:
                        break
                components.append(comp)
    return components


def theorem1_equal_on_cycle(g: CompatibilityGraph, a: DeterministicAssignment) -> bool:
    """Check that every directed cycle carries a single value.

    The assignment must respect all ordered pairs (value(u) <= value(v));
    otherwise an :class:`InvalidAssignmentError` is raised.  For valid
    assignments the return value is the theorem's claim, so it is always
    True; it is computed rather than assumed so tests can enforce it.
    """
    for v in g.vertices:
        if v not in a.values:
            raise InvalidAssignmentError(f"assignment misses vertex {v}")
    for u, v in g.directed_edges:
        if a.values[u] > a.values[v]:
            raise InvalidAssignmentError(
                f"assignment violates ordered pair ({u}, {v}): {a.values[u]} > {a.values[v]}"
            )
    self_loops = {u for u, v in g.directed_edges if u == v}
    for comp in _strongly_connected_components(g):
        on_cycle = len(comp) > 1 or comp[0] in self_loops
        if not on_cycle:
            continue
        values = {a.values[v] for v in comp}
        if len(values) > 1:
            return False
    return True


def _assignment_blocks(n_vars: int, d: int):
    """Yield (block, n_vars) arrays of outcome values in 1..d covering all d^n_vars."""
    total = d ** n_vars
    weights = d ** np.arange(n_vars, dtype=np.int64)
    start = 0
    while start < total:
        stop = min(start + _BLOCK, total)
        idx = np.arange(start, stop, dtype=np.int64)
        digits = (idx[:, None] // weights[None, :]) % d
        yield digits + 1
        start = stop


def _check_capacity(scenario: Scenario) -> int:
    total = scenario.d ** scenario.n_measurements
    if total > ASSIGNMENT_CAP:
        raise CapacityError(
            f"enumeration of {scenario.d}^{scenario.n_measurements} = {total} assignments "
            f"exceeds the cap of {ASSIGNMENT_CAP}"
        )
    return total


def assignments_total(scenario: Scenario) -> int:
    """Number of deterministic assignments enumerated for this scenario."""
    return _check_capacity(scenario)


def joint_event_impossible(scenario: Scenario) -> bool:
    """True iff no deterministic assignment realizes the event
    (M_2k < M_1) together with M_i <= M_{i+1} for every i = 1..2k-1."""
    _check_capacity(scenario)
    n = scenario.n_measurements
    for block in _assignment_blocks(n, scenario.d):
        ok = block[:, n - 1] < block[:, 0]
        for i in range(n - 1):
            ok &= block[:, i] <= block[:, i + 1]
        if bool(ok.any()):
            return False
    return True


def classical_fraction_bound(scenario: Scenario) -> float:
    """Maximum of P1 - P2 over deterministic assignments that satisfy every
    zero constraint with certainty.  Convexity reduces the LHV optimum to
    these polytope vertices; the result is exactly 0."""
    _check_capacity(scenario)
    n = scenario.n_measurements
    j = scenario.j
    best = -np.inf
    for block in _assignment_blocks(n, scenario.d):
        feasible = np.ones(block.shape[0], dtype=bool)
        for i in range(1, n):
            if i == j:
                continue
            feasible &= block[:, i - 1] <= block[:, i]
        if not feasible.any():
            continue
        sub = block[feasible]
        value = (sub[:, 0] > sub[:, n - 1]).astype(np.int64) - (sub[:, j - 1] > sub[:, j]).astype(np.int64)
        best = max(best, float(value.max()))
    if best == -np.inf:
        raise InvalidAssignmentError("no deterministic assignment satisfies the zero constraints")
    return best


def logical_bell_classical_max(scenario: Scenario) -> int:
    """Maximum of P(M_2k < M_1) + sum_i P(M_i <= M_{i+1}) over deterministic
    assignments; equals 2k - 1, which is why S <= 0 classically."""
    _check_capacity(scenario)
    n = scenario.n_measurements
    best = 0
    for block in _assignment_blocks(n, scenario.d):
        score = (block[:, n - 1] < block[:, 0]).astype(np.int64)
        for i in range(n - 1):
            score += block[:, i] <= block[:, i + 1]
        best = max(best, int(score.max()))
    return best
