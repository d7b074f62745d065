"""Chained nonlocality arguments for multisetting qudit systems.

Build measurement ladders from entangled states, evaluate and maximize the
quantum success fraction, certify the classical bound by enumeration, and
simulate the photon-coincidence experiment with shot noise.
"""

__version__ = "0.1.0"

from .chains import (
    FractionReport,
    MeasurementBasis,
    MeasurementChain,
    Scenario,
    StateMatrix,
    bell_expression,
    build_chain,
    build_hardy_chain,
    cabello_fraction,
    derive_next_basis,
    derive_prev_basis,
    joint_outcome_distribution,
    probability_gt,
)
from .experiment import (
    AttenuationMask,
    CoincidenceDataset,
    EstimateReport,
    SchmidtFrameChain,
    SourceSpectrum,
    estimate,
    procrustean_mask,
    simulate_coincidences,
    spiral_spectrum,
    to_schmidt_frame,
)
from .fixtures import fixture_names, load_fixture
from .lhv import (
    CompatibilityGraph,
    DeterministicAssignment,
    chain_cycle_graph,
    classical_fraction_bound,
    has_directed_cycle,
    joint_event_impossible,
    logical_bell_classical_max,
    theorem1_equal_on_cycle,
)
from .linalg import (
    SchmidtForm,
    is_unitary,
    orthonormal_complement_vector,
    schmidt_decompose,
)
from .optimize import (
    OptimizationResult,
    OptimizerConfig,
    maximize_cabello,
    maximize_hardy,
    scan_j,
)
from .reference import ReferenceTable, load_reference
