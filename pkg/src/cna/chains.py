"""Measurement chains for (k, d, j) scenarios.

Two parties alternate along a chain of 2k von Neumann measurements,
M_1 ... M_2k (odd chain slots belong to the first party, even slots to the
second).  Gauge-fixing M_1 and M_2k to the identity, the zero-probability
constraints P(M_i > M_{i+1}) = 0 on every edge except the j-th determine all
intermediate bases from the state, one orthocomplement at a time.  The
success fraction is then P1 - P2 with P1 = P(M_1 > M_2k) and
P2 = P(M_j > M_{j+1}).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DegenerateConstraintError,
    DimensionError,
    IncompleteDataError,
    LadderDegeneracyError,
    NormalizationError,
    ParityError,
)
from .linalg import ensure_matrix, is_unitary, orthonormal_complement_vector

ROW_IS_ALICE = "row-is-alice"
ROW_IS_BOB = "row-is-bob"


@dataclass(frozen=True)
class Scenario:
    """k settings per party, d outcomes per measurement, break index j."""

    k: int
    d: int
    j: int = 1

    def __post_init__(self):
        if self.k < 2:
            raise ValueError(f"k must be >= 2, got {self.k}")
        if self.d < 2:
            raise ValueError(f"d must be >= 2, got {self.d}")
        if not 1 <= self.j <= 2 * self.k - 1:
            raise ValueError(f"j must lie in 1..{2 * self.k - 1}, got {self.j}")

    @property
    def n_measurements(self) -> int:
        return 2 * self.k

    def label(self) -> str:
        return f"({self.k},{self.d},{self.j})"


@dataclass(eq=False)
class StateMatrix:
    """Normalized d x d amplitude matrix of a bipartite pure qudit state.

    Internally rows always index the first party (Alice); construct with
    ``orientation=ROW_IS_BOB`` to transpose row-is-Bob input on the way in.
    """

    h: np.ndarray
    orientation: str = ROW_IS_ALICE

    def __post_init__(self):
        a = ensure_matrix(self.h, "state matrix")
        if a.shape[0] != a.shape[1]:
            raise DimensionError(f"state matrix must be square, got {a.shape}")
        if self.orientation not in (ROW_IS_ALICE, ROW_IS_BOB):
            raise ValueError(f"unknown orientation {self.orientation!r}")
        if self.orientation == ROW_IS_BOB:
            a = a.T
        norm = float(np.linalg.norm(a))
        if abs(norm - 1.0) > 1e-9:
            raise NormalizationError(
                f"state matrix has Frobenius norm {norm!r}, expected 1 within 1e-9"
            )
        self.h = a

    @property
    def d(self) -> int:
        return self.h.shape[0]

    @staticmethod
    def from_unnormalized(h, orientation: str = ROW_IS_ALICE) -> "StateMatrix":
        a = ensure_matrix(h, "state matrix")
        norm = float(np.linalg.norm(a))
        if norm < 1e-12:
            raise NormalizationError("state matrix is numerically zero")
        return StateMatrix(a / norm, orientation)


@dataclass(eq=False)
class MeasurementBasis:
    """One party's von Neumann basis at a chain slot; row s is the outcome-s vector."""

    chain_index: int
    rows: np.ndarray

    def __post_init__(self):
        self.rows = ensure_matrix(self.rows, "measurement basis")
        if self.chain_index < 1:
            raise ValueError(f"chain_index must be >= 1, got {self.chain_index}")
        if not is_unitary(self.rows, tol=1e-9):
            raise ValueError(f"basis at chain slot {self.chain_index} is not unitary within 1e-9")

    @property
    def party(self) -> str:
        return "alice" if self.chain_index % 2 == 1 else "bob"

    @property
    def d(self) -> int:
        return self.rows.shape[0]


@dataclass(eq=False)
class MeasurementChain:
    """Ordered bases M_1 ... M_2k for a scenario together with the state."""

    scenario: Scenario
    bases: list[MeasurementBasis]
    state: StateMatrix

    def basis(self, i: int) -> MeasurementBasis:
        """1-based chain access."""
        return self.bases[i - 1]

    def zero_edge_residuals(self) -> dict[tuple[int, int], float]:
        res = {}
        for i in range(1, self.scenario.n_measurements):
            if i == self.scenario.j:
                continue
            res[(i, i + 1)] = probability_gt(self.state, self.basis(i), self.basis(i + 1))
        return res

    def validate(self, residual_tol: float = 1e-10, gauge_tol: float = 1e-12) -> None:
        n = self.scenario.n_measurements
        if len(self.bases) != n:
            raise ValueError(f"chain needs {n} bases, got {len(self.bases)}")
        eye = np.eye(self.scenario.d)
        if np.max(np.abs(self.basis(1).rows - eye)) > gauge_tol:
            raise ValueError("gauge violation: M_1 is not the identity")
        if np.max(np.abs(self.basis(n).rows - eye)) > gauge_tol:
            raise ValueError(f"gauge violation: M_{n} is not the identity")
        worst = max(self.zero_edge_residuals().values())
        if worst > residual_tol:
            raise ValueError(f"zero-constraint residual {worst:.3e} exceeds {residual_tol:.1e}")


@dataclass
class FractionReport:
    """Success probabilities of a chain plus the ideal logical Bell expression."""

    p1: float
    p2: float
    fraction: float
    s_ideal: float
    edge_probabilities: dict[tuple[int, int], float] = field(default_factory=dict)


def _party_of_slot(i: int) -> str:
    return "alice" if i % 2 == 1 else "bob"


def _contract(h: np.ndarray, vec: np.ndarray, party: str) -> np.ndarray:
    """Partial inner product <vec|state>, living on the opposite party's space."""
    if party == "alice":
        return np.conj(vec) @ h
    return h @ np.conj(vec)


def joint_outcome_distribution(state: StateMatrix, mi: MeasurementBasis,
                               mj: MeasurementBasis) -> np.ndarray:
    """d x d array with entry [s-1, t-1] = P(M_i = s, M_j = t).

    The two bases must sit on opposite parties (opposite chain-slot parity).
    """
    if mi.party == mj.party:
        raise ParityError(
            f"chain slots {mi.chain_index} and {mj.chain_index} have equal parity; "
            "joint outcomes are only defined across parties"
        )
    d = state.d
    if mi.d != d or mj.d != d:
        raise DimensionError(
            f"basis dimensions {mi.d}, {mj.d} do not match state dimension {d}"
        )
    alice, bob = (mi, mj) if mi.party == "alice" else (mj, mi)
    amplitudes = np.conj(alice.rows) @ state.h @ np.conj(bob.rows).T
    joint_ab = np.abs(amplitudes) ** 2
    return joint_ab if mi.party == "alice" else joint_ab.T


def probability_gt(state: StateMatrix, mi: MeasurementBasis, mj: MeasurementBasis) -> float:
    """P(M_i > M_j): probability that outcome of M_i strictly exceeds M_j's."""
    joint = joint_outcome_distribution(state, mi, mj)
    return float(np.sum(np.tril(joint, -1)))


def _derive_rows_forward(h: np.ndarray, rows_i: np.ndarray, slot_i: int) -> np.ndarray:
    """Rows of M_{i+1} from M_i so that P(M_i > M_{i+1}) = 0."""
    d = h.shape[0]
    party = _party_of_slot(slot_i)
    contractions = [_contract(h, rows_i[s], party) for s in range(d)]
    new_rows: list[np.ndarray] = []
    for t in range(d):
        constraints = contractions[t + 1:] + new_rows
        try:
            new_rows.append(orthonormal_complement_vector(constraints, d))
        except DegenerateConstraintError as exc:
            raise LadderDegeneracyError(
                f"forward ladder from slot {slot_i}: outcome {t + 1} is underdetermined "
                f"(constraint rank {exc.rank})",
                outcome_index=t + 1,
            ) from exc
    return np.array(new_rows)


def _derive_rows_backward(h: np.ndarray, rows_ip1: np.ndarray, slot_ip1: int) -> np.ndarray:
    """Rows of M_i from M_{i+1} so that P(M_i > M_{i+1}) = 0."""
    d = h.shape[0]
    party = _party_of_slot(slot_ip1)
    contractions = [_contract(h, rows_ip1[t], party) for t in range(d)]
    new_rows: list[np.ndarray | None] = [None] * d
    built: list[np.ndarray] = []
    for s in range(d - 1, -1, -1):
        constraints = contractions[:s] + built
        try:
            vec = orthonormal_complement_vector(constraints, d)
        except DegenerateConstraintError as exc:
            raise LadderDegeneracyError(
                f"backward ladder from slot {slot_ip1}: outcome {s + 1} is underdetermined "
                f"(constraint rank {exc.rank})",
                outcome_index=s + 1,
            ) from exc
        new_rows[s] = vec
        built.append(vec)
    return np.array(new_rows)


def derive_next_basis(state: StateMatrix, mi: MeasurementBasis) -> MeasurementBasis:
    """Basis at slot i+1 uniquely determined (up to row phases) by M_i and the state."""
    rows = _derive_rows_forward(state.h, mi.rows, mi.chain_index)
    return MeasurementBasis(chain_index=mi.chain_index + 1, rows=rows)


def derive_prev_basis(state: StateMatrix, mi_plus_1: MeasurementBasis) -> MeasurementBasis:
    """Basis at slot i uniquely determined (up to row phases) by M_{i+1} and the state."""
    if mi_plus_1.chain_index < 2:
        raise ValueError("cannot derive a basis before chain slot 1")
    rows = _derive_rows_backward(state.h, mi_plus_1.rows, mi_plus_1.chain_index)
    return MeasurementBasis(chain_index=mi_plus_1.chain_index - 1, rows=rows)


def build_chain(scenario: Scenario, state: StateMatrix) -> MeasurementChain:
    """Construct the full chain: identity gauge at both ends, forward ladder up
    to M_j, backward ladder down to M_{j+1}."""
    if state.d != scenario.d:
        raise DimensionError(
            f"state dimension {state.d} does not match scenario dimension {scenario.d}"
        )
    n = scenario.n_measurements
    eye = np.eye(scenario.d, dtype=np.complex128)
    slots: list[MeasurementBasis | None] = [None] * (n + 1)
    slots[1] = MeasurementBasis(1, eye.copy())
    slots[n] = MeasurementBasis(n, eye.copy())
    for i in range(1, scenario.j):
        try:
            slots[i + 1] = derive_next_basis(state, slots[i])
        except LadderDegeneracyError as exc:
            exc.chain_position = i + 1
            raise
    for i in range(n - 1, scenario.j, -1):
        try:
            slots[i] = derive_prev_basis(state, slots[i + 1])
        except LadderDegeneracyError as exc:
            exc.chain_position = i
            raise
    return MeasurementChain(scenario=scenario, bases=list(slots[1:]), state=state)


def build_hardy_chain(k: int, d: int, state: StateMatrix) -> MeasurementChain:
    """All-zero-edges variant: M_1 is the identity and every edge constraint
    P(M_i > M_{i+1}) = 0 holds for i = 1..2k-1, so the whole chain follows
    from the forward ladder.  The success probability is P(M_1 > M_2k)
    against the derived (generally non-identity) M_2k."""
    scenario = Scenario(k=k, d=d, j=1)  # j unused; kept for bookkeeping
    if state.d != d:
        raise DimensionError(f"state dimension {state.d} does not match d={d}")
    slots: list[MeasurementBasis] = [MeasurementBasis(1, np.eye(d, dtype=np.complex128))]
    for i in range(1, 2 * k):
        try:
            slots.append(derive_next_basis(state, slots[-1]))
        except LadderDegeneracyError as exc:
            exc.chain_position = i + 1
            raise
    return MeasurementChain(scenario=scenario, bases=slots, state=state)


def cabello_fraction(chain: MeasurementChain) -> FractionReport:
    """Evaluate P1, P2, their difference, all edge probabilities, and the
    ideal Bell expression of a chain."""
    scenario = chain.scenario
    n = scenario.n_measurements
    edges: dict[tuple[int, int], float] = {}
    for i in range(1, n):
        edges[(i, i + 1)] = probability_gt(chain.state, chain.basis(i), chain.basis(i + 1))
    p1 = probability_gt(chain.state, chain.basis(1), chain.basis(n))
    edges[(n, 1)] = p1  # closing edge, stored as P(M_2k < M_1)
    p2 = edges[(scenario.j, scenario.j + 1)]
    s_ideal = bell_expression(edges, scenario.k)
    return FractionReport(p1=p1, p2=p2, fraction=p1 - p2, s_ideal=s_ideal,
                          edge_probabilities=edges)


def bell_expression(probabilities: dict[tuple[int, int], float], k: int) -> float:
    """Logical Bell expression S = P(M_2k < M_1) + sum_i P(M_i <= M_{i+1}) - (2k - 1).

    ``probabilities`` maps in-chain edges (i, i+1) to P(M_i > M_{i+1}) and the
    closing edge (2k, 1) to P(M_2k < M_1).  Classically S <= 0.
    """
    n = 2 * k
    closing = (n, 1)
    if closing not in probabilities:
        raise IncompleteDataError(f"missing closing edge {closing}")
    total = float(probabilities[closing])
    for i in range(1, n):
        edge = (i, i + 1)
        if edge not in probabilities:
            raise IncompleteDataError(f"missing edge {edge}")
        total += 1.0 - float(probabilities[edge])
    return total - (n - 1)


def hardy_success_probability(chain: MeasurementChain) -> float:
    """P(M_1 > M_2k) for a chain built by :func:`build_hardy_chain`."""
    n = chain.scenario.n_measurements
    return probability_gt(chain.state, chain.basis(1), chain.basis(n))
