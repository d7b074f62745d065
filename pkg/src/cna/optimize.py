"""Restart-based derivative-free search over normalized state matrices.

Each objective evaluation parametrizes the state by d*d reals (2*d*d when
complex amplitudes are enabled), normalizes to unit Frobenius norm, builds
the measurement chain, and scores the success fraction.  Nelder-Mead simplex
descent with seeded random restarts takes the place of the arbitrary-precision
black-box maximizer originally used for these tables; the best restart gets a
final polishing pass.  Restarts own private generator streams derived from
(seed, restart index), so results do not depend on execution order.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import minimize

from .chains import (
    MeasurementChain,
    Scenario,
    StateMatrix,
    build_chain,
    build_hardy_chain,
    cabello_fraction,
    hardy_success_probability,
)
from .errors import LadderDegeneracyError, NormalizationError, OptimizationFailedError
from .fixtures import fixture_names, load_fixture

_PENALTY = 2.0  # objective value for infeasible states; any real fraction beats it


@dataclass(frozen=True)
class OptimizerConfig:
    restarts: int = 64
    max_iterations: int = 6000
    tolerance: float = 1e-12
    seed: int = 0
    allow_complex: bool = False

    def __post_init__(self):
        if self.restarts < 1:
            raise ValueError(f"restarts must be >= 1, got {self.restarts}")
        if self.tolerance <= 0:
            raise ValueError(f"tolerance must be > 0, got {self.tolerance}")


@dataclass
class OptimizationResult:
    best_state: StateMatrix
    best_fraction: float
    per_restart_values: list[float]
    iterations_used: list[int]
    wall_time: float
    objective: str = "cabello"
    scenario: Scenario | None = None
    config: OptimizerConfig | None = None


def _params_to_state(x: np.ndarray, d: int, allow_complex: bool) -> StateMatrix | None:
    if allow_complex:
        h = x[: d * d].reshape(d, d) + 1j * x[d * d:].reshape(d, d)
    else:
        h = x.reshape(d, d).astype(np.complex128)
    norm = np.linalg.norm(h)
    if norm < 1e-12:
        return None
    return StateMatrix(h / norm)


def _state_to_params(state: StateMatrix, allow_complex: bool) -> np.ndarray:
    if allow_complex:
        return np.concatenate([state.h.real.ravel(), state.h.imag.ravel()])
    return state.h.real.ravel().astype(np.float64)


def _make_objective(scenario: Scenario, objective: str, allow_complex: bool):
    d = scenario.d

    def fun(x: np.ndarray) -> float:
        state = _params_to_state(x, d, allow_complex)
        if state is None:
            return _PENALTY
        try:
            if objective == "hardy":
                chain = build_hardy_chain(scenario.k, d, state)
                return -hardy_success_probability(chain)
            chain = build_chain(scenario, state)
            return -cabello_fraction(chain).fraction
        except (LadderDegeneracyError, NormalizationError):
            return _PENALTY

    return fun


def _warm_start(scenario: Scenario, allow_complex: bool) -> np.ndarray | None:
    name = f"H_{scenario.k}_{scenario.d}_{scenario.j}"
    if name not in fixture_names():
        return None
    _, state = load_fixture(name)
    return _state_to_params(state, allow_complex)


def _run_search(scenario: Scenario, cfg: OptimizerConfig, objective: str) -> OptimizationResult:
    if scenario.d > 6 or scenario.k > 8:
        raise ValueError(f"scenario {scenario.label()} outside the practical envelope (d <= 6, k <= 8)")
    n_params = (2 if cfg.allow_complex else 1) * scenario.d ** 2
    fun = _make_objective(scenario, objective, cfg.allow_complex)
    warm = _warm_start(scenario, cfg.allow_complex) if objective == "cabello" else None

    start = time.perf_counter()
    options = dict(
        maxiter=cfg.max_iterations,
        maxfev=2 * cfg.max_iterations,
        xatol=1e-10,
        fatol=cfg.tolerance,
        adaptive=n_params > 8,
    )
    per_restart: list[float] = []
    iterations: list[int] = []
    best_value = _PENALTY
    best_x: np.ndarray | None = None
    best_index = -1
    for r in range(cfg.restarts):
        rng = np.random.default_rng([cfg.seed, r])
        if r == 0 and warm is not None:
            x0 = warm
        else:
            x0 = rng.standard_normal(n_params)
        res = minimize(fun, x0, method="Nelder-Mead", options=options)
        per_restart.append(-res.fun)
        iterations.append(int(res.nit))
        if res.fun < best_value:
            best_value = float(res.fun)
            best_x = np.asarray(res.x)
            best_index = r

    if best_x is None or best_value >= _PENALTY:
        raise OptimizationFailedError(
            f"all {cfg.restarts} restarts failed ladder solvability for {scenario.label()}"
        )

    polish_options = dict(options, xatol=1e-12, fatol=min(cfg.tolerance, 1e-14))
    res = minimize(fun, best_x, method="Nelder-Mead", options=polish_options)
    if res.fun < best_value:
        best_value = float(res.fun)
        best_x = np.asarray(res.x)
    iterations[best_index] += int(res.nit)
    per_restart[best_index] = -best_value

    best_state = _params_to_state(best_x, scenario.d, cfg.allow_complex)
    elapsed = time.perf_counter() - start
    return OptimizationResult(
        best_state=best_state,
        best_fraction=-best_value,
        per_restart_values=per_restart,
        iterations_used=iterations,
        wall_time=elapsed,
        objective=objective,
        scenario=scenario,
        config=cfg,
    )


def maximize_cabello(scenario: Scenario, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Maximum success fraction P1 - P2 over normalized states for a scenario."""
    return _run_search(scenario, cfg or OptimizerConfig(), "cabello")


def maximize_hardy(k: int, d: int, cfg: OptimizerConfig | None = None) -> OptimizationResult:
    """Maximum of P(M_1 > M_2k) with every chain edge forced to zero
    (the all-zeros comparison baseline; the break index plays no role)."""
    return _run_search(Scenario(k=k, d=d, j=1), cfg or OptimizerConfig(), "hardy")


def scan_j(k: int, d: int, cfg: OptimizerConfig | None = None) -> list[tuple[int, float]]:
    """Optimized fraction for every break index j = 1..k.

    Reversal symmetry identifies (k, d, j) with (k, d, 2k - j), so only the
    first half of the range needs scanning.
    """
    cfg = cfg or OptimizerConfig()
    out = []
    for j in range(1, k + 1):
        result = maximize_cabello(Scenario(k=k, d=d, j=j), cfg)
        out.append((j, result.best_fraction))
    return out


def feasibility_check(result: OptimizationResult, tol: float = 1e-8) -> MeasurementChain:
    """Rebuild the winning chain and confirm it reproduces the reported optimum."""
    scenario = result.scenario
    if result.objective == "hardy":
        chain = build_hardy_chain(scenario.k, scenario.d, result.best_state)
        value = hardy_success_probability(chain)
    else:
        chain = build_chain(scenario, result.best_state)
        value = cabello_fraction(chain).fraction
    if abs(value - result.best_fraction) > tol:
        raise OptimizationFailedError(
            f"best state fails to reproduce its fraction: {value} vs {result.best_fraction}"
        )
    return chain
