"""Exception types shared across the package."""

from __future__ import annotations


class CnaError(Exception):
    """Base class for all package-specific failures."""


class DimensionError(CnaError):
    """Array shapes are incompatible with the requested operation."""


class NormalizationError(CnaError):
    """A state matrix or spectrum is not normalized to the required tolerance."""


class DegenerateConstraintError(CnaError):
    """The orthogonality constraints do not pin down a one-dimensional solution space."""

    def __init__(self, message: str, rank: int, dim: int):
        super().__init__(message)
        self.rank = rank
        self.dim = dim


class ParityError(CnaError):
    """Two measurement bases belong to the same party and cannot be measured jointly."""


class LadderDegeneracyError(CnaError):
    """The ladder derivation hit a rank-deficient constraint system.

    Carries the outcome index at which the derivation failed and, when
    raised from a full chain build, the chain position being derived.
    """

    def __init__(self, message: str, outcome_index: int, chain_position: int | None = None):
        super().__init__(message)
        self.outcome_index = outcome_index
        self.chain_position = chain_position


class InvalidAssignmentError(CnaError):
    """A deterministic assignment violates one of the graph's ordered-pair edges."""


class CapacityError(CnaError):
    """The exhaustive enumeration would exceed the configured assignment cap."""


class IncompleteDataError(CnaError):
    """An edge probability required by the Bell expression is missing."""


class InsufficientDataError(CnaError):
    """A coincidence dataset lacks counts for a required setting pair."""


class InfeasibleConcentrationError(CnaError):
    """A target mode cannot be reached by attenuation (zero source amplitude)."""


class OptimizationFailedError(CnaError):
    """Every optimizer restart failed to produce a feasible chain."""
