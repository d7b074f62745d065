"""Digital twin of the photonic coincidence experiment.

The chain is rewritten in the Schmidt frame of the state, measurement modes
are carried by photon orbital angular momentum (OAM) labels, a Procrustean
attenuation mask tailors the down-conversion spectrum to the target Schmidt
coefficients, and coincidence counts are drawn per setting pair with Poisson
totals and multinomial outcome cells.  Estimators propagate counting noise
per edge and combine errors in quadrature.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field

import numpy as np

from .chains import (
    MeasurementBasis,
    MeasurementChain,
    Scenario,
    StateMatrix,
    bell_expression,
    joint_outcome_distribution,
)
from .errors import (
    InfeasibleConcentrationError,
    InsufficientDataError,
    NormalizationError,
)
from .linalg import schmidt_decompose

# OAM labels used per dimension (units of hbar per photon); the second
# party carries the opposite sign of each label.
DEFAULT_OAM_LABELS = {2: (1, -1), 3: (0, 1, -1), 4: (0, 1, -1, 2)}

ERROR_METHOD = "per-edge binomial standard errors, combined in quadrature"


def default_oam_labels(d: int) -> tuple[int, ...]:
    if d in DEFAULT_OAM_LABELS:
        return DEFAULT_OAM_LABELS[d]
    # symmetric window 0, +1, -1, +2, -2, ... for other dimensions
    labels = [0]
    step = 1
    while len(labels) < d:
        labels.append(step)
        if len(labels) < d:
            labels.append(-step)
        step += 1
    return tuple(labels[:d])


@dataclass(eq=False)
class SchmidtFrameChain:
    """A chain rewritten so the state is diagonal: diag(lambdas) with the
    per-slot bases transformed accordingly and OAM labels assigned to modes."""

    scenario: Scenario
    lambdas: np.ndarray
    bases: list[MeasurementBasis]
    oam_labels: tuple[int, ...]

    def basis(self, i: int) -> MeasurementBasis:
        return self.bases[i - 1]

    @property
    def state(self) -> StateMatrix:
        return StateMatrix(np.diag(self.lambdas / np.linalg.norm(self.lambdas)).astype(np.complex128))

    def setting_pairs(self) -> list[tuple[int, int]]:
        """Measured setting pairs: every chain edge plus the closing pair."""
        n = self.scenario.n_measurements
        return [(i, i + 1) for i in range(1, n)] + [(1, n)]

    def joint_distribution(self, i: int, j: int) -> np.ndarray:
        return joint_outcome_distribution(self.state, self.basis(i), self.basis(j))


def to_schmidt_frame(chain: MeasurementChain, oam_labels: tuple[int, ...] | None = None) -> SchmidtFrameChain:
    """Rotate state and bases into the Schmidt frame; edge probabilities are
    unchanged because both sides transform with the same mode unitaries."""
    form = schmidt_decompose(chain.state.h)
    u_conj = np.conj(form.left)
    v = form.right
    new_bases = []
    for basis in chain.bases:
        transform = u_conj if basis.party == "alice" else v
        new_bases.append(MeasurementBasis(basis.chain_index, basis.rows @ transform))
    labels = oam_labels if oam_labels is not None else default_oam_labels(chain.scenario.d)
    if len(labels) != chain.scenario.d:
        raise ValueError(f"need {chain.scenario.d} OAM labels, got {len(labels)}")
    return SchmidtFrameChain(
        scenario=chain.scenario,
        lambdas=form.lambdas,
        bases=new_bases,
        oam_labels=tuple(labels),
    )


@dataclass
class SourceSpectrum:
    """Down-conversion amplitudes C_l per OAM label l, normalized to sum of squares 1."""

    amplitudes: dict[int, float]

    def __post_init__(self):
        total = sum(a * a for a in self.amplitudes.values())
        if abs(total - 1.0) > 1e-9:
            raise NormalizationError(f"spectrum has sum of squared amplitudes {total!r}")
        if any(a < 0 for a in self.amplitudes.values()):
            raise ValueError("spectrum amplitudes must be nonnegative")

    def amplitude(self, label: int) -> float:
        return self.amplitudes.get(label, 0.0)


def spiral_spectrum(labels, q: float = 0.8) -> SourceSpectrum:
    """Geometric-like spectrum C_l proportional to q^|l| over a label window."""
    if not 0 < q <= 1:
        raise ValueError(f"q must lie in (0, 1], got {q}")
    raw = {int(l): q ** abs(int(l)) for l in labels}
    norm = np.sqrt(sum(a * a for a in raw.values()))
    return SourceSpectrum({l: a / norm for l, a in raw.items()})


@dataclass
class AttenuationMask:
    """Per-mode diffraction efficiencies; the best-transmitted mode is 1."""

    eta: np.ndarray

    def __post_init__(self):
        self.eta = np.asarray(self.eta, dtype=np.float64)
        if np.any(self.eta <= 0) or np.any(self.eta > 1 + 1e-12):
            raise ValueError("efficiencies must lie in (0, 1]")
        if abs(self.eta.max() - 1.0) > 1e-12:
            raise ValueError("the largest efficiency must equal 1")


def procrustean_mask(source: SourceSpectrum, target_lambdas, mode_labels) -> AttenuationMask:
    """Attenuation that concentrates the source spectrum onto the target
    Schmidt coefficients: eta_g proportional to lambda_g / C_{l_g}, rescaled
    so the largest efficiency is 1."""
    lambdas = np.asarray(target_lambdas, dtype=np.float64)
    labels = list(mode_labels)
    if len(labels) != lambdas.size:
        raise ValueError("one OAM label is needed per target mode")
    if np.any(lambdas <= 0):
        raise ValueError("target Schmidt coefficients must be positive")
    ratios = np.empty(lambdas.size)
    for g, label in enumerate(labels):
        c = source.amplitude(label)
        if c <= 0:
            raise InfeasibleConcentrationError(
                f"source spectrum has zero amplitude on needed mode l={label}"
            )
        ratios[g] = lambdas[g] / c
    return AttenuationMask(ratios / ratios.max())


def apply_mask(source: SourceSpectrum, mask: AttenuationMask, mode_labels) -> np.ndarray:
    """Renormalized per-mode amplitudes after attenuation."""
    amps = np.array([source.amplitude(l) for l in mode_labels]) * mask.eta
    return amps / np.linalg.norm(amps)


@dataclass(eq=False)
class CoincidenceDataset:
    """Simulated photon-pair counts per (setting pair, outcome pair)."""

    counts: dict[tuple[int, int], np.ndarray]
    pairs_per_setting: int
    seed: int
    d: int

    def total(self, pair: tuple[int, int]) -> int:
        return int(self.counts[pair].sum())


def _pair_rng(seed: int, i: int, j: int) -> np.random.Generator:
    return np.random.default_rng([seed, i, j])


def simulate_coincidences(frame: SchmidtFrameChain, pairs_per_setting: int, seed: int) -> CoincidenceDataset:
    """Draw outcome-cell counts for every measured setting pair.

    Totals are Poisson with mean ``pairs_per_setting``; cells are multinomial
    in the quantum outcome probabilities.  Each pair owns a generator stream
    derived from (seed, i, j), so the dataset is reproducible and independent
    of sampling order.
    """
    if pairs_per_setting < 1:
        raise ValueError(f"pairs_per_setting must be >= 1, got {pairs_per_setting}")
    d = frame.scenario.d
    counts: dict[tuple[int, int], np.ndarray] = {}
    for (i, j) in frame.setting_pairs():
        rng = _pair_rng(seed, i, j)
        probs = frame.joint_distribution(i, j).ravel()
        probs = np.clip(probs, 0.0, None)
        probs = probs / probs.sum()
        total = int(rng.poisson(pairs_per_setting))
        cells = rng.multinomial(total, probs) if total > 0 else np.zeros(d * d, dtype=np.int64)
        counts[(i, j)] = cells.reshape(d, d)
    return CoincidenceDataset(counts=counts, pairs_per_setting=pairs_per_setting, seed=seed, d=d)


@dataclass
class EstimateReport:
    """Per-edge probability estimates with standard errors, plus the derived
    fraction and logical-Bell estimates."""

    edges: dict[tuple[int, int], tuple[float, float]]
    fraction: float
    fraction_stderr: float
    bell_s: float
    bell_s_stderr: float
    pairs_per_setting: int
    error_method: str = ERROR_METHOD
    extras: dict = field(default_factory=dict)


def _edge_estimate(cells: np.ndarray) -> tuple[float, float, int]:
    total = int(cells.sum())
    if total == 0:
        raise InsufficientDataError("setting pair has no recorded coincidences")
    p = float(np.tril(cells, -1).sum()) / total
    stderr = float(np.sqrt(max(p * (1.0 - p), 0.0) / total))
    return p, stderr, total


def estimate(dataset: CoincidenceDataset, scenario: Scenario) -> EstimateReport:
    """Cell-count ratio estimators for every edge, the fraction P1 - P2, and
    the logical Bell expression, with binomial error propagation."""
    n = scenario.n_measurements
    required = [(i, i + 1) for i in range(1, n)] + [(1, n)]
    edges: dict[tuple[int, int], tuple[float, float]] = {}
    for pair in required:
        if pair not in dataset.counts:
            raise InsufficientDataError(f"dataset lacks setting pair {pair}")
        p, stderr, _ = _edge_estimate(dataset.counts[pair])
        edges[pair] = (p, stderr)

    p1, p1_err = edges[(1, n)]
    p2, p2_err = edges[(scenario.j, scenario.j + 1)]
    fraction = p1 - p2
    fraction_err = float(np.hypot(p1_err, p2_err))

    # S = P(M_2k < M_1) + sum_i (1 - P(M_i > M_{i+1})) - (2k - 1)
    bell_probs = {(n, 1): p1}
    variance = p1_err ** 2
    for i in range(1, n):
        p, err = edges[(i, i + 1)]
        bell_probs[(i, i + 1)] = p
        variance += err ** 2
    s_value = bell_expression(bell_probs, scenario.k)
    return EstimateReport(
        edges=edges,
        fraction=fraction,
        fraction_stderr=fraction_err,
        bell_s=s_value,
        bell_s_stderr=float(np.sqrt(variance)),
        pairs_per_setting=dataset.pairs_per_setting,
    )


def dataset_to_csv(dataset: CoincidenceDataset, path) -> None:
    """Write counts as CSV rows ``setting_i,setting_j,outcome_s,outcome_t,count``.

    Two leading ``#`` comment lines carry pairs_per_setting and seed so the
    file round-trips losslessly.
    """
    with open(path, "w", newline="", encoding="utf-8") as f:
        f.write(f"# pairs_per_setting={dataset.pairs_per_setting}\n")
        f.write(f"# seed={dataset.seed}\n")
        writer = csv.writer(f)
        writer.writerow(["setting_i", "setting_j", "outcome_s", "outcome_t", "count"])
        for (i, j) in sorted(dataset.counts):
            cells = dataset.counts[(i, j)]
            for s in range(cells.shape[0]):
                for t in range(cells.shape[1]):
                    writer.writerow([i, j, s + 1, t + 1, int(cells[s, t])])


def dataset_from_csv(path) -> CoincidenceDataset:
    """Inverse of :func:`dataset_to_csv`."""
    meta = {"pairs_per_setting": 0, "seed": 0}
    rows = []
    with open(path, "r", newline="", encoding="utf-8") as f:
        for line in f:
            if line.startswith("#"):
                key, _, value = line[1:].strip().partition("=")
                if key.strip() in meta:
                    meta[key.strip()] = int(value)
                continue
            rows.append(line)
    reader = csv.DictReader(rows)
    cells: dict[tuple[int, int], dict[tuple[int, int], int]] = {}
    d = 1
    for row in reader:
        pair = (int(row["setting_i"]), int(row["setting_j"]))
        s, t = int(row["outcome_s"]), int(row["outcome_t"])
        d = max(d, s, t)
        cells.setdefault(pair, {})[(s, t)] = int(row["count"])
    counts = {}
    for pair, entries in cells.items():
        grid = np.zeros((d, d), dtype=np.int64)
        for (s, t), c in entries.items():
            grid[s - 1, t - 1] = c
        counts[pair] = grid
    return CoincidenceDataset(
        counts=counts,
        pairs_per_setting=meta["pairs_per_setting"],
        seed=meta["seed"],
        d=d,
    )
