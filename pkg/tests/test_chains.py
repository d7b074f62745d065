import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from cna.chains import (
    ROW_IS_BOB,
    MeasurementBasis,
    Scenario,
    StateMatrix,
    bell_expression,
    build_chain,
    build_hardy_chain,
    cabello_fraction,
    derive_next_basis,
    derive_prev_basis,
    hardy_success_probability,
    joint_outcome_distribution,
    probability_gt,
)
from cna.errors import (
    DimensionError,
    IncompleteDataError,
    LadderDegeneracyError,
    NormalizationError,
    ParityError,
)
from cna.fixtures import load_fixture

from conftest import random_state_matrix

GOLDEN_FRACTIONS = {
    "H_2_2_1": 0.125000,
    "H_3_2_1": 0.207107,
    "H_4_2_1": 0.259733,
    "H_5_2_1": 0.295755,
    "H_6_2_1": 0.321900,
    "H_2_3_1": 0.193093,
    "H_2_4_1": 0.238389,
}


def identity_basis(i, d):
    return MeasurementBasis(i, np.eye(d, dtype=complex))


class TestTypes:
    @pytest.mark.parametrize("k,d,j", [(1, 2, 1), (2, 1, 1), (2, 2, 0), (2, 2, 4)])
    def test_scenario_bounds(self, k, d, j):
        with pytest.raises(ValueError):
            Scenario(k=k, d=d, j=j)

    def test_state_norm_checked(self):
        with pytest.raises(NormalizationError):
            StateMatrix(np.diag([1.0, 1.0]))

    def test_row_is_bob_transposes(self):
        h = np.array([[0.8, 0.0], [0.6, 0.0]])
        state = StateMatrix(h, orientation=ROW_IS_BOB)
        assert np.allclose(state.h, h.T)

    def test_basis_must_be_unitary(self):
        with pytest.raises(ValueError):
            MeasurementBasis(1, np.diag([1.0, 0.5]))

    def test_party_from_parity(self):
        assert identity_basis(1, 2).party == "alice"
        assert identity_basis(4, 2).party == "bob"


class TestProbability:
    def test_diagonal_state_identity_bases(self):
        state = StateMatrix(np.diag([0.8, 0.6]))
        p = probability_gt(state, identity_basis(1, 2), identity_basis(2, 2))
        assert p == 0.0

    def test_golden_p1(self):
        # P(M_1 > M_4) on the (2,2,1) optimum with both gauge identities
        _, state = load_fixture("H_2_2_1")
        p1 = probability_gt(state, identity_basis(1, 2), identity_basis(4, 2))
        assert abs(p1 - 0.1875) < 1e-5

    def test_same_parity_rejected(self):
        state = StateMatrix(np.diag([0.8, 0.6]))
        with pytest.raises(ParityError):
            probability_gt(state, identity_basis(1, 2), identity_basis(3, 2))

    def test_dimension_mismatch(self):
        state = StateMatrix(np.diag([0.8, 0.6]))
        with pytest.raises(DimensionError):
            probability_gt(state, identity_basis(1, 2), identity_basis(2, 3))

    @given(seed=st.integers(0, 10_000), d=st.integers(2, 4))
    def test_outcome_partition(self, seed, d):
        rng = np.random.default_rng(seed)
        state = StateMatrix(random_state_matrix(rng, d, complex_entries=True))
        from conftest import random_unitary

        mi = MeasurementBasis(1, random_unitary(rng, d))
        mj = MeasurementBasis(2, random_unitary(rng, d))
        joint = joint_outcome_distribution(state, mi, mj)
        p_gt = probability_gt(state, mi, mj)
        p_lt = probability_gt(state, mj, mi)
        p_eq = float(np.trace(joint))
        assert abs(joint.sum() - 1.0) <= 1e-10
        assert abs(p_gt + p_lt + p_eq - 1.0) <= 1e-10


class TestLadder:
    def test_diagonal_state_forward_gives_identity(self):
        state = StateMatrix(np.diag([0.8, 0.6]))
        nxt = derive_next_basis(state, identity_basis(1, 2))
        assert np.allclose(nxt.rows, np.eye(2), atol=1e-12)

    def test_diagonal_state_backward_gives_identity(self):
        state = StateMatrix(np.diag([0.8, 0.6]))
        prev = derive_prev_basis(state, identity_basis(2, 2))
        assert np.allclose(prev.rows, np.eye(2), atol=1e-12)

    def test_zero_schmidt_coefficient_is_degenerate(self):
        state = StateMatrix(np.diag([1.0, 1.0, 0.0]) / np.sqrt(2))
        with pytest.raises(LadderDegeneracyError) as err:
            derive_next_basis(state, identity_basis(1, 3))
        assert err.value.outcome_index >= 1

    def test_forward_enforces_zero_edge(self):
        rng = np.random.default_rng(3)
        state = StateMatrix(random_state_matrix(rng, 3, complex_entries=True))
        nxt = derive_next_basis(state, identity_basis(1, 3))
        assert probability_gt(state, identity_basis(1, 3), nxt) <= 1e-10

    @given(seed=st.integers(0, 10_000), d=st.integers(2, 4), slot=st.integers(1, 4))
    def test_forward_backward_roundtrip(self, seed, d, slot):
        rng = np.random.default_rng(seed)
        state = StateMatrix(random_state_matrix(rng, d, complex_entries=True))
        from conftest import random_unitary

        basis = MeasurementBasis(slot, random_unitary(rng, d))
        nxt = derive_next_basis(state, basis)
        back = derive_prev_basis(state, nxt)
        # rows agree up to a per-row global phase
        for original, recovered in zip(basis.rows, back.rows):
            overlap = np.vdot(recovered, original)
            assert abs(abs(overlap) - 1.0) <= 1e-9


class TestBuildChain:
    @pytest.mark.parametrize("name", sorted(GOLDEN_FRACTIONS))
    def test_golden_fractions(self, name):
        scenario, state = load_fixture(name)
        chain = build_chain(scenario, state)
        report = cabello_fraction(chain)
        assert abs(report.fraction - GOLDEN_FRACTIONS[name]) < 5e-6
        assert max(chain.zero_edge_residuals().values()) <= 1e-10
        chain.validate()

    def test_diagonal_state_gives_identity_chain(self):
        scenario = Scenario(k=3, d=2, j=1)
        state = StateMatrix(np.diag([0.8, 0.6]))
        chain = build_chain(scenario, state)
        for basis in chain.bases:
            assert np.allclose(basis.rows, np.eye(2), atol=1e-12)
        assert cabello_fraction(chain).fraction == 0.0

    def test_error_carries_chain_position(self):
        # forward ladder (j >= 2) hits the rank drop of the zero coefficient
        scenario = Scenario(k=2, d=3, j=2)
        state = StateMatrix(np.diag([1.0, 1.0, 0.0]) / np.sqrt(2))
        with pytest.raises(LadderDegeneracyError) as err:
            build_chain(scenario, state)
        assert err.value.chain_position == 2

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            build_chain(Scenario(k=2, d=3, j=1), StateMatrix(np.diag([0.8, 0.6])))

    @given(seed=st.integers(0, 2_000), j=st.integers(1, 3))
    @settings(max_examples=15)
    def test_random_chain_residuals(self, seed, j):
        rng = np.random.default_rng(seed)
        scenario = Scenario(k=2, d=3, j=j)
        state = StateMatrix(random_state_matrix(rng, 3, complex_entries=True))
        chain = build_chain(scenario, state)
        assert max(chain.zero_edge_residuals().values()) <= 1e-10
        report = cabello_fraction(chain)
        assert abs(report.s_ideal - report.fraction) <= 1e-12
        for (i, jj), p in report.edge_probabilities.items():
            assert -1e-12 <= p <= 1 + 1e-12


class TestFractionReport:
    def test_s_identity_on_goldens(self):
        for name in sorted(GOLDEN_FRACTIONS):
            scenario, state = load_fixture(name)
            report = cabello_fraction(build_chain(scenario, state))
            assert abs(report.s_ideal - report.fraction) <= 1e-12

    def test_edge_probabilities_cover_all_edges(self):
        scenario, state = load_fixture("H_3_2_1")
        report = cabello_fraction(build_chain(scenario, state))
        expected = {(i, i + 1) for i in range(1, 6)} | {(6, 1)}
        assert set(report.edge_probabilities) == expected


class TestBellExpression:
    def test_ideal_optimum(self):
        scenario, state = load_fixture("H_2_2_1")
        report = cabello_fraction(build_chain(scenario, state))
        s = bell_expression(report.edge_probabilities, scenario.k)
        assert abs(s - 0.125) < 5e-6

    def test_classical_deterministic_is_nonpositive(self):
        # deterministic outcomes respecting the chain ordering saturate S = 0
        probs = {(i, i + 1): 0.0 for i in range(1, 4)}
        probs[(4, 1)] = 0.0
        assert bell_expression(probs, 2) == 0.0
        # any classically allowed leak on an edge pushes S below zero
        probs[(2, 3)] = 0.3
        assert bell_expression(probs, 2) == pytest.approx(-0.3)

    def test_missing_edge(self):
        with pytest.raises(IncompleteDataError):
            bell_expression({(4, 1): 0.1}, 2)


class TestOriginalTwoSettingForm:
    """For (2,2,2) the chain rewrites to the original two-qubit argument via
    the relabeling F = 3-2M_3, G = 2M_2-3, D = 2M_1-3, E = 3-2M_4."""

    @pytest.mark.parametrize("seed", [0, 1, 2, 5])
    def test_relabeling_preserves_structure(self, seed):
        rng = np.random.default_rng(seed)
        scenario = Scenario(k=2, d=2, j=2)
        state = StateMatrix(random_state_matrix(rng, 2, complex_entries=True))
        chain = build_chain(scenario, state)
        report = cabello_fraction(chain)

        joint_12 = joint_outcome_distribution(state, chain.basis(1), chain.basis(2))
        joint_23 = joint_outcome_distribution(state, chain.basis(2), chain.basis(3))
        joint_34 = joint_outcome_distribution(state, chain.basis(3), chain.basis(4))
        joint_14 = joint_outcome_distribution(state, chain.basis(1), chain.basis(4))

        # zero constraints are the two relabeled zero events
        assert joint_12[1, 0] <= 1e-10  # P(M_1=2, M_2=1) = P(D=+1, G=-1)
        assert joint_34[1, 0] <= 1e-10  # P(M_3=2, M_4=1) = P(F=-1, E=+1)
        # success events map onto P1 and P2
        p1_relabeled = joint_14[1, 0]  # P(D=+1, E=+1) = P(M_1=2, M_4=1)
        p2_relabeled = joint_23[1, 0]  # P(F=+1, G=+1) = P(M_2=2, M_3=1)
        assert abs(p1_relabeled - report.p1) <= 1e-12
        assert abs(p2_relabeled - report.p2) <= 1e-12
        assert abs((p1_relabeled - p2_relabeled) - report.fraction) <= 1e-12


class TestHardyChain:
    def test_all_edges_zero(self):
        rng = np.random.default_rng(9)
        state = StateMatrix(random_state_matrix(rng, 2, complex_entries=True))
        chain = build_hardy_chain(2, 2, state)
        for i in range(1, 4):
            p = probability_gt(state, chain.basis(i), chain.basis(i + 1))
            assert p <= 1e-10
        assert 0.0 <= hardy_success_probability(chain) <= 1.0

    def test_diagonal_state_scores_zero(self):
        state = StateMatrix(np.diag([0.8, 0.6]))
        chain = build_hardy_chain(2, 2, state)
        assert hardy_success_probability(chain) <= 1e-12
