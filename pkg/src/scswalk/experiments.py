"""Experiment runners behind the CLI subcommands.

Each ``cmd_*`` writes its data files into an existing directory and returns
the written paths plus a small summary dict.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

from .dynamics import (
    DensityOperator,
    DephasingSpec,
    PhaseDistribution,
    distribution_std,
    evolve_channel,
    evolve_pure,
    phase_distribution,
    phase_distribution_from_density,
    pure_negativity,
)
from .hellinger_opt import HellingerObjective, OptimizerConfig, hellinger, optimize, theta_sweep
from .operators import ScsParams, WalkConfig, build_dtqw, build_scs, coherent_state
from .runio import fmt, write_csv, write_json
from .spectral import spectrum, winding_number


def initial_state(alpha_mag: float, alpha_phase: float, d: int, coin_s: int = 0):
    return coherent_state(alpha_mag * complex(math.cos(alpha_phase), math.sin(alpha_phase)), d, coin_s)


def walk_operator(kind: str, d: int, theta: float, u: ScsParams | None) -> np.ndarray:
    if kind == "dtqw":
        return build_dtqw(WalkConfig(d, theta))
    if kind == "scs":
        return build_scs(d, u if u is not None else ScsParams.nominal(d, theta))
    raise ValueError(f"unknown walk kind {kind!r}")


def _prob_header(d: int) -> list[str]:
    return [f"p_{n}" for n in range(d)]


def cmd_spectrum(out: Path, kind: str, theta: float, d: int, u: ScsParams | None = None):
    if kind == "scs":
        u = u or ScsParams.nominal(d, theta)
        data = spectrum("scs", u.u2, d, u1=u.u1)
    else:
        data = spectrum("dtqw", theta, d)
    rows = [
        (k, e, -e, *b) for k, e, b in zip(range(d), data.epsilon, data.bloch)
    ]
    csv_path = write_csv(out / "spectrum.csv", ["k", "epsilon_plus", "epsilon_minus", "dx", "dy", "dz"], rows)
    summary = {
        "kind": kind,
        "d": d,
        "theta": theta,
        "u1": None if u is None else u.u1,
        "u2": None if u is None else u.u2,
        "winding_number": winding_number(data),
        "epsilon_min": float(data.epsilon.min()),
        "epsilon_max": float(data.epsilon.max()),
    }
    json_path = write_json(out / "spectrum.json", summary)
    return [csv_path, json_path], summary


def cmd_evolve(out: Path, kind: str, theta: float, u: ScsParams | None, alpha_mag: float,
               alpha_phase: float, d: int, steps: int):
    psi0 = initial_state(alpha_mag, alpha_phase, d)
    states = evolve_pure(walk_operator(kind, d, theta, u), psi0, steps)
    dists = [phase_distribution(s) for s in states]
    header = ["step", "std", "negativity"]
    extra = None
    if kind == "scs":
        header.append("hellinger_to_dtqw")
        target = evolve_pure(build_dtqw(WalkConfig(d, theta)), psi0, steps)
        extra = [hellinger(p, phase_distribution(t)) for p, t in zip(dists, target)]
    rows = []
    for l, (state, p) in enumerate(zip(states, dists)):
        row = [l, distribution_std(p), pure_negativity(state)]
        if extra is not None:
            row.append(extra[l])
        rows.append(row + list(p.p))
    path = write_csv(out / "evolution.csv", header + _prob_header(d), rows)
    summary = {"kind": kind, "steps": steps}
    if extra is not None and steps >= 1:
        summary["hellinger_max"] = float(max(extra[1:]))
    return [path], summary


def cmd_optimize(out: Path, theta: float, d: int, l0: int, alpha_mag: float, alpha_phase: float,
                 cfg: OptimizerConfig, steps: int = 100):
    psi0 = initial_state(alpha_mag, alpha_phase, d)
    result = optimize(theta, d, l0, psi0, cfg)
    series = HellingerObjective(theta, d, l0, psi0, horizon=steps).series(result.params, steps)
    json_path = write_json(out / "optimization.json", result.to_json())
    csv_path = write_csv(out / "hellinger_series.csv", ["step", "hellinger"],
                         [(l, h) for l, h in enumerate(series, start=1)])
    summary = {
        "objective": result.objective,
        "u1_opt": result.u1_opt,
        "u2_opt": result.u2_opt,
        "exhausted": result.exhausted,
        "hellinger_max": float(series.max()) if len(series) else None,
    }
    return [json_path, csv_path], summary


def _td_label(td: float) -> str:
    return "inf" if math.isinf(td) else fmt(td)


def decohere_trajectory(kind: str, d: int, theta: float, u: ScsParams | None, psi0, spec: DephasingSpec,
                        steps: int) -> np.ndarray:
    """Phase distributions ``(steps+1, d)`` of a dephased walk."""
    rhos = evolve_channel(walk_operator(kind, d, theta, u), DensityOperator.from_state(psi0), spec, steps)
    return np.array([phase_distribution_from_density(r).p for r in rhos])


def _decohere_job(args):
    return decohere_trajectory(*args)


def cmd_decohere(out: Path, kinds: list[str], theta: float, u: ScsParams | None, t_dephase: list[float],
                 schedule: str, alpha_mag: float, alpha_phase: float, d: int, steps: int, workers: int = 1):
    psi0 = initial_state(alpha_mag, alpha_phase, d)
    jobs = [(kind, d, theta, u, psi0, DephasingSpec(td, schedule), steps) for td in t_dephase for kind in kinds]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_decohere_job, jobs))
    else:
        results = [_decohere_job(j) for j in jobs]
    dists = {(job[0], job[5].t_dephase): res for job, res in zip(jobs, results)}

    paths = []
    summary: dict = {"t_dephase": [_td_label(td) for td in t_dephase], "schedule": schedule}
    for (kind, td), p in dists.items():
        rows = [[l, distribution_std(PhaseDistribution(d, pl)), *pl] for l, pl in enumerate(p)]
        name = f"distributions_{kind}_Td-{_td_label(td)}.csv"
        paths.append(write_csv(out / name, ["step", "std"] + _prob_header(d), rows))
        summary[f"final_max_dev_{kind}_Td-{_td_label(td)}"] = float(np.max(np.abs(p[-1] - 1.0 / d)))
    if "dtqw" in kinds and "scs" in kinds:
        cols = [[hellinger(a, b) for a, b in zip(dists[("dtqw", td)], dists[("scs", td)])] for td in t_dephase]
        header = ["step"] + [f"Td-{_td_label(td)}" for td in t_dephase]
        paths.append(write_csv(out / "hellinger.csv", header, [[l, *vals] for l, vals in enumerate(zip(*cols))]))
        for td, col in zip(t_dephase, cols):
            summary[f"final_hellinger_Td-{_td_label(td)}"] = col[-1]
    return paths, summary


def cmd_sweep_theta(out: Path, grid: list[float], d: int, l0: int, alpha_mag: float, alpha_phase: float,
                    cfg: OptimizerConfig):
    psi0 = initial_state(alpha_mag, alpha_phase, d)
    sweep = theta_sweep(grid, d, l0, psi0, cfg)
    path = write_csv(out / "sweep.csv", ["theta", "theta_over_pi", "mean_hellinger"],
                     [(t, t / math.pi, v) for t, v in sweep])
    return [path], {"values": [v for _, v in sweep]}
