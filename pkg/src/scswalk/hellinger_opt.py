"""Fitting SCS angles to a DTQW by minimising the step-averaged Hellinger distance."""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize
from scipy.stats import qmc

from . import tolerances
from .dynamics import PhaseDistribution, evolve_blocks, phase_probabilities
from .operators import ScsParams, StateVector, WalkConfig, dtqw_blocks, scs_blocks

RESULT_SCHEMA = "scswalk.optimization-result/1"


def _as_probabilities(p) -> np.ndarray:
    arr = p.p if isinstance(p, PhaseDistribution) else np.asarray(p, dtype=float)
    if np.any(arr < -tolerances.CLIP_TOL):
        raise ValueError("distribution has negative entries")
    return np.clip(arr, 0.0, None)


def hellinger(p, q) -> float:
    """``||sqrt(p) - sqrt(q)||_2 / sqrt(2)``; accepts arrays or PhaseDistribution."""
    a, b = _as_probabilities(p), _as_probabilities(q)
    if a.shape != b.shape:
        raise ValueError(f"distribution lengths differ: {a.shape} vs {b.shape}")
    return float(np.linalg.norm(np.sqrt(a) - np.sqrt(b)) / math.sqrt(2.0))


def _hellinger_rows(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    diff = np.sqrt(np.clip(p, 0.0, None)) - np.sqrt(np.clip(q, 0.0, None))
    return np.linalg.norm(diff, axis=-1) / math.sqrt(2.0)


class HellingerObjective:
    """Mean Hellinger distance between DTQW and SCS over steps ``1..l0``.

    The target DTQW distributions are computed once at construction.
    """

    def __init__(self, target_theta: float, d: int, l0: int, psi0: StateVector, horizon: int | None = None):
        if l0 < 1:
            raise ValueError("l0 must be >= 1")
        if psi0.d != d:
            raise ValueError(f"initial state has d={psi0.d}, expected {d}")
        self.target_theta = target_theta
        self.d = d
        self.l0 = l0
        self.psi0 = psi0
        self.horizon = max(l0, horizon or l0)
        amps = evolve_blocks(dtqw_blocks(WalkConfig(d, target_theta)), psi0, self.horizon)
        self.target = phase_probabilities(amps, d)

    def scs_distributions(self, u: ScsParams, steps: int) -> np.ndarray:
        return phase_probabilities(evolve_blocks(scs_blocks(self.d, u), self.psi0, steps), self.d)

    def series(self, u: ScsParams, steps: int | None = None) -> np.ndarray:
        """Hellinger distance at steps ``1..steps`` (default ``l0``)."""
        steps = self.l0 if steps is None else steps
        if steps > self.horizon:
            raise ValueError(f"series beyond cached horizon {self.horizon}")
        q = self.scs_distributions(u, steps)
        return _hellinger_rows(self.target[1:steps + 1], q[1:])

    def __call__(self, u: ScsParams) -> float:
        return float(np.mean(self.series(u, self.l0)))


def objective(u: ScsParams, target_theta: float, d: int, l0: int, psi0: StateVector) -> float:
    return HellingerObjective(target_theta, d, l0, psi0)(u)


@dataclass(frozen=True)
class OptimizerConfig:
    """Multistart Nelder-Mead settings; ``None`` bounds default to u1 in [0, 4pi/d], u2 in [0, 6pi]."""

    u1_bounds: tuple[float, float] | None = None
    u2_bounds: tuple[float, float] = (0.0, 6 * math.pi)
    multistarts: int = 16
    xatol: float = 1e-6
    max_evals: int = 2000
    seed: int = 0
    workers: int = 1

    def __post_init__(self):
        for lo, hi in filter(None, (self.u1_bounds, self.u2_bounds)):
            if not lo < hi:
                raise ValueError(f"empty search interval [{lo}, {hi}]")
        if not self.xatol > 0:
            raise ValueError("xatol must be positive")
        if self.multistarts < 1 or self.max_evals < 1:
            raise ValueError("multistarts and max_evals must be >= 1")

    def box(self, d: int) -> tuple[tuple[float, float], tuple[float, float]]:
        u1 = self.u1_bounds if self.u1_bounds is not None else (0.0, 4 * math.pi / d)
        return tuple(u1), tuple(self.u2_bounds)

    def start_points(self, d: int) -> np.ndarray:
        (a1, b1), (a2, b2) = self.box(d)
        unit = qmc.Halton(d=2, scramble=True, seed=self.seed).random(self.multistarts)
        return qmc.scale(unit, [a1, a2], [b1, b2])


@dataclass
class OptimizationResult:
    u1_opt: float
    u2_opt: float
    objective: float
    evaluations: int
    trace: list[tuple[float, float, float]] = field(default_factory=list)
    exhausted: bool = False
    target_theta: float = math.pi / 4
    d: int = 31
    l0: int = 50

    @property
    def params(self) -> ScsParams:
        return ScsParams(self.u1_opt, self.u2_opt)

    def to_json(self) -> dict:
        out = asdict(self)
        out["trace"] = [list(t) for t in self.trace]
        out["schema"] = RESULT_SCHEMA
        return out


@dataclass
class _StartOutcome:
    x: tuple[float, float]
    fun: float
    nfev: int
    converged: bool
    trace: list[tuple[float, float, float]]


def _run_start(f: HellingerObjective, x0: np.ndarray, box, cfg: OptimizerConfig) -> _StartOutcome:
    trace: list[tuple[float, float, float]] = []
    start_value = f(ScsParams(*x0))
    trace.append((float(x0[0]), float(x0[1]), start_value))

    def record(intermediate_result):
        x = intermediate_result.x
        trace.append((float(x[0]), float(x[1]), float(intermediate_result.fun)))

    res = minimize(
        lambda x: f(ScsParams(float(x[0]), float(x[1]))),
        x0,
        method="Nelder-Mead",
        bounds=box,
        callback=record,
        options={"xatol": cfg.xatol, "fatol": np.inf, "maxfev": cfg.max_evals, "maxiter": cfg.max_evals},
    )
    x, fun = (float(res.x[0]), float(res.x[1])), float(res.fun)
    # the simplex never loses its best vertex, but keep the start if it was better
    if start_value < fun:
        x, fun = (float(x0[0]), float(x0[1])), start_value
    return _StartOutcome(x, fun, int(res.nfev) + 1, res.status == 0, trace)


def _run_start_job(args) -> _StartOutcome:
    target_theta, d, l0, psi0, x0, box, cfg = args
    return _run_start(HellingerObjective(target_theta, d, l0, psi0), x0, box, cfg)


def optimize(
    target_theta: float, d: int, l0: int, psi0: StateVector, cfg: OptimizerConfig | None = None
) -> OptimizationResult:
    """Multistart bounded Nelder-Mead over ``(u1, u2)``.

    Deterministic for a given ``cfg.seed``; ``workers > 1`` only changes who
    runs the starts, not the result.  ``exhausted`` is set when any start ran
    out of evaluations before its simplex shrank below ``xatol``.
    """
    cfg = cfg or OptimizerConfig()
    box = cfg.box(d)
    starts = cfg.start_points(d)
    if cfg.workers > 1:
        jobs = [(target_theta, d, l0, psi0, x0, box, cfg) for x0 in starts]
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            outcomes = list(pool.map(_run_start_job, jobs))
    else:
        f = HellingerObjective(target_theta, d, l0, psi0)
        outcomes = [_run_start(f, x0, box, cfg) for x0 in starts]

    best_value = min(o.fun for o in outcomes)
    # near-ties go to the smallest (u2, u1)
    tied = [o for o in outcomes if o.fun <= best_value + 1e-9]
    best = min(tied, key=lambda o: (o.x[1], o.x[0]))
    return OptimizationResult(
        u1_opt=best.x[0],
        u2_opt=best.x[1],
        objective=best.fun,
        evaluations=sum(o.nfev for o in outcomes),
        trace=[t for o in outcomes for t in o.trace],
        exhausted=not all(o.converged for o in outcomes),
        target_theta=target_theta,
        d=d,
        l0=l0,
    )


def default_theta_grid() -> list[float]:
    return [j * math.pi / 64 for j in range(1, 32)]


def theta_sweep(
    grid, d: int, l0: int, psi0: StateVector, cfg: OptimizerConfig | None = None
) -> list[tuple[float, float]]:
    """Optimised mean Hellinger distance for each coin angle in ``grid``."""
    grid = list(grid)
    if not grid:
        raise ValueError("theta grid is empty")
    cfg = cfg or OptimizerConfig()
    return [(float(theta), optimize(theta, d, l0, psi0, cfg).objective) for theta in grid]
