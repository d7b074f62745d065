"""Complex linear algebra primitives: unitarity checks, phased orthocomplements,
and a deterministic Schmidt (singular value) decomposition.

All functions operate on plain ``numpy`` arrays with complex128 entries.
Phase conventions are fixed so that repeated runs, and the golden-value
tests built on top of them, are bit-reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConstraintError, DimensionError, NormalizationError

# Relative threshold for numeric rank decisions (vs. the largest singular value).
RANK_RTOL = 1e-9
# Components with modulus above this anchor the global-phase convention.
PHASE_EPS = 1e-9


def ensure_matrix(m, name: str = "matrix") -> np.ndarray:
    """Validate and coerce ``m`` to a 2-D complex128 array with finite entries."""
    a = np.asarray(m, dtype=np.complex128)
    if a.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got ndim={a.ndim}")
    if a.shape[0] < 1 or a.shape[1] < 1:
        raise DimensionError(f"{name} must have at least one row and column, got {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError(f"{name} contains non-finite entries")
    return a


def is_unitary(m, tol: float = 1e-10) -> bool:
    """True iff ``m`` is square and max entrywise |m m^dag - I| <= tol."""
    a = ensure_matrix(m)
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"unitarity check needs a square matrix, got {a.shape}")
    gram = a @ a.conj().T
    return bool(np.max(np.abs(gram - np.eye(a.shape[0]))) <= tol)


def fix_phase(v: np.ndarray) -> np.ndarray:
    """Rotate ``v`` by a global phase so its first component with modulus
    > PHASE_EPS is real and positive."""
    significant = np.abs(v) > PHASE_EPS
    if not significant.any():
        return v
    pivot = v[int(np.argmax(significant))]
    return v * (np.conj(pivot) / abs(pivot))


def orthonormal_complement_vector(constraints, dim: int) -> np.ndarray:
    """Unit vector Hermitian-orthogonal to every constraint vector.

    The constraints must span a (dim-1)-dimensional subspace; otherwise a
    :class:`DegenerateConstraintError` carrying the numeric rank is raised.
    The returned vector's phase is fixed by :func:`fix_phase`.
    """
    cons = [np.asarray(c, dtype=np.complex128).ravel() for c in constraints]
    for c in cons:
        if c.size != dim:
            raise DimensionError(f"constraint of length {c.size} does not match dim={dim}")
    if not cons:
        if dim == 1:
            return np.ones(1, dtype=np.complex128)
        raise DegenerateConstraintError(
            f"no constraints but dim={dim}: solution space is {dim}-dimensional",
            rank=0, dim=dim,
        )
    stack = np.conj(np.array(cons))
    _, sigma, vh = np.linalg.svd(stack)
    smax = float(sigma[0]) if sigma.size else 0.0
    rank = int(np.sum(sigma > RANK_RTOL * max(smax, 1.0)))
    if dim - rank != 1:
        raise DegenerateConstraintError(
            f"constraints have numeric rank {rank}, need {dim - 1} for a unique complement",
            rank=rank, dim=dim,
        )
    null_vector = np.conj(vh[-1])
    return fix_phase(null_vector)


@dataclass
class SchmidtForm:
    """Singular value decomposition h = left diag(lambdas) right^dag.

    lambdas are nonnegative and sorted descending; left/right are unitary.
    """

    lambdas: np.ndarray
    left: np.ndarray
    right: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return self.left @ np.diag(self.lambdas).astype(np.complex128) @ self.right.conj().T


def _tie_break_key(column: np.ndarray):
    significant = np.abs(column) > PHASE_EPS
    if not significant.any():
        return (0.0, 0.0)
    pivot = column[int(np.argmax(significant))]
    return (float(pivot.real), float(pivot.imag))


def schmidt_decompose(h) -> SchmidtForm:
    """Deterministic Schmidt decomposition of a normalized square matrix.

    Ties between near-equal singular values (within 1e-10) are broken by
    ordering the left singular vectors lexicographically on the (real, imag)
    parts of their first significant component.  Each left/right column pair
    is then phased so the left column's first significant component is real
    and positive; this shared mode phase leaves the reconstruction invariant.
    """
    a = ensure_matrix(h, "state matrix")
    if a.shape[0] != a.shape[1]:
        raise DimensionError(f"Schmidt decomposition needs a square matrix, got {a.shape}")
    norm = float(np.linalg.norm(a))
    if abs(norm - 1.0) > 1e-9:
        raise NormalizationError(f"state matrix has Frobenius norm {norm!r}, expected 1 within 1e-9")

    u, sigma, vh = np.linalg.svd(a)
    v = vh.conj().T

    # stable reorder inside degenerate groups
    order = list(range(len(sigma)))
    start = 0
    while start < len(sigma):
        stop = start + 1
        while stop < len(sigma) and abs(sigma[start] - sigma[stop]) <= 1e-10:
            stop += 1
        if stop - start > 1:
            group = sorted(order[start:stop], key=lambda g: _tie_break_key(u[:, g]))
            order[start:stop] = group
        start = stop
    u, sigma, v = u[:, order], sigma[order], v[:, order]

    # shared mode-phase convention (applied to both sides)
    phases = np.ones(len(sigma), dtype=np.complex128)
    for g in range(len(sigma)):
        col = u[:, g]
        significant = np.abs(col) > PHASE_EPS
        if significant.any():
            pivot = col[int(np.argmax(significant))]
            phases[g] = np.conj(pivot) / abs(pivot)
    u = u * phases[None, :]
    v = v * phases[None, :]

    return SchmidtForm(lambdas=sigma.astype(np.float64), left=u, right=v)
