"""Command line entry point: ``scswalk <subcommand> [options]``.

Every subcommand writes into a fresh ``<out>/<subcommand>-<timestamp>/``
directory, refreshes ``<out>/latest`` and records a ``manifest.json`` that
``scswalk replay`` can re-run and verify byte for byte.

Exit codes: 0 success, 1 replay mismatch, 2 invalid input, 3 optimizer ran
out of evaluations (results are still written).
"""

from __future__ import annotations

import argparse
import math
import re
import sys
import tempfile
import time
from pathlib import Path

from . import __version__, experiments
from .hellinger_opt import OptimizerConfig
from .operators import ScsParams
from .qmath import ToleranceError
from .runio import default_out_root, new_run_dir, read_manifest, write_manifest
from .spectral import GridTooCoarseError, SingularBlochError

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_INVALID = 2
EXIT_EXHAUSTED = 3

_ANGLE = re.compile(r"^\s*(?P<coef>[-+]?\d*\.?\d*)\s*\*?\s*pi\s*(?:/\s*(?P<den>\d+\.?\d*))?\s*$")


def parse_angle(text: str) -> float:
    """Float, ``inf``, or a multiple of pi such as ``pi/4`` or ``3*pi/64``."""
    try:
        return float(text)
    except ValueError:
        pass
    m = _ANGLE.match(text)
    if not m:
        raise argparse.ArgumentTypeError(f"cannot parse {text!r} as a number or multiple of pi")
    coef = m.group("coef")
    value = math.pi * (float(coef) if coef not in ("", "+", "-") else (-1.0 if coef == "-" else 1.0))
    return value / float(m.group("den")) if m.group("den") else value


def _positive_time(text: str) -> float:
    value = parse_angle(text)
    if not value > 0:
        raise argparse.ArgumentTypeError(f"dephasing time must be positive or inf, got {text!r}")
    return value


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--d", type=int, default=31, help="number of walk sites (default 31)")
    p.add_argument("--theta", type=parse_angle, default=math.pi / 4, help="DTQW coin angle (default pi/4)")
    p.add_argument("--out", type=Path, default=None, help="output root (default $SCSWALK_OUT or ./runs)")
    p.add_argument("--seed", type=int, default=0)


def _add_scs(p: argparse.ArgumentParser, default: str) -> None:
    p.add_argument("--u1", type=parse_angle, default=None,
                   help=f"SCS per-quantum angle (default: {default} value)")
    p.add_argument("--u2", type=parse_angle, default=None, help=f"SCS coin angle (default: {default} value)")


def _add_alpha(p: argparse.ArgumentParser) -> None:
    p.add_argument("--alpha-mag", type=float, default=5.0, help="|alpha| of the initial coherent state")
    p.add_argument("--alpha-phase", type=parse_angle, default=math.pi, help="arg(alpha) (default pi)")


def _add_optimizer(p: argparse.ArgumentParser) -> None:
    p.add_argument("--l0", type=int, default=50, help="steps averaged in the objective")
    p.add_argument("--multistarts", type=int, default=16)
    p.add_argument("--max-evals", type=int, default=2000, help="objective evaluations per start")
    p.add_argument("--xatol", type=float, default=1e-6, help="simplex size stopping threshold (rad)")
    p.add_argument("--u1-max", type=parse_angle, default=None, help="upper u1 bound (default 4*pi/d)")
    p.add_argument("--u2-max", type=parse_angle, default=6 * math.pi)
    p.add_argument("--workers", type=int, default=1, help="processes for parallel multistarts")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="scswalk", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"scswalk {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("spectrum", help="quasi-energy bands, Bloch vectors and winding number")
    _add_common(p)
    p.add_argument("--kind", choices=["dtqw", "scs"], default="dtqw")
    _add_scs(p, "nominal (2pi/d, theta)")

    p = sub.add_parser("evolve", help="pure-state phase distributions, spread and negativity")
    _add_common(p)
    p.add_argument("--kind", choices=["dtqw", "scs"], default="dtqw")
    _add_scs(p, "reference angles")
    _add_alpha(p)
    p.add_argument("--steps", type=int, default=100)

    p = sub.add_parser("optimize", help="fit SCS angles to the DTQW")
    _add_common(p)
    _add_alpha(p)
    _add_optimizer(p)
    p.add_argument("--steps", type=int, default=100, help="horizon of the reported Hellinger series")

    p = sub.add_parser("decohere", help="coin-dephased DTQW and SCS dynamics")
    _add_common(p)
    p.add_argument("--kind", choices=["both", "dtqw", "scs"], default="both")
    _add_scs(p, "reference angles")
    _add_alpha(p)
    p.add_argument("--steps", type=int, default=600)
    p.add_argument("--t-dephase", type=_positive_time, action="append", default=None,
                   help="dephasing time in steps; repeatable; 'inf' allowed (default 1, 10, 100, inf)")
    p.add_argument("--lambda-schedule", choices=["per-step", "cumulative"], default="per-step")
    p.add_argument("--workers", type=int, default=1)

    p = sub.add_parser("sweep-theta", help="optimised mean Hellinger distance over coin angles")
    _add_common(p)
    _add_alpha(p)
    _add_optimizer(p)
    p.add_argument("--grid-denom", type=int, default=64, help="theta_j = j*pi/denom")
    p.add_argument("--grid-first", type=int, default=1)
    p.add_argument("--grid-last", type=int, default=31)

    p = sub.add_parser("replay", help="re-run a manifest and compare output digests")
    p.add_argument("manifest", type=Path)
    p.add_argument("--out", type=Path, default=None)
    return parser


def _scs_params(args, default: str) -> ScsParams | None:
    if args.u1 is None and args.u2 is None:
        if default == "reference":
            return ScsParams.reference(args.d)
        return None
    base = ScsParams.reference(args.d) if default == "reference" else ScsParams.nominal(args.d, args.theta)
    return ScsParams(base.u1 if args.u1 is None else args.u1, base.u2 if args.u2 is None else args.u2)


def _optimizer_config(args) -> OptimizerConfig:
    u1_max = args.u1_max if args.u1_max is not None else 4 * math.pi / args.d
    return OptimizerConfig(
        u1_bounds=(0.0, u1_max),
        u2_bounds=(0.0, args.u2_max),
        multistarts=args.multistarts,
        xatol=args.xatol,
        max_evals=args.max_evals,
        seed=args.seed,
        workers=args.workers,
    )


def _run(args, out: Path):
    sc = args.subcommand
    if sc == "spectrum":
        return experiments.cmd_spectrum(out, args.kind, args.theta, args.d, _scs_params(args, "nominal"))
    if sc == "evolve":
        return experiments.cmd_evolve(out, args.kind, args.theta, _scs_params(args, "reference"),
                                      args.alpha_mag, args.alpha_phase, args.d, args.steps)
    if sc == "optimize":
        return experiments.cmd_optimize(out, args.theta, args.d, args.l0, args.alpha_mag, args.alpha_phase,
                                        _optimizer_config(args), args.steps)
    if sc == "decohere":
        kinds = ["dtqw", "scs"] if args.kind == "both" else [args.kind]
        t_dephase = args.t_dephase or [1.0, 10.0, 100.0, math.inf]
        return experiments.cmd_decohere(out, kinds, args.theta, _scs_params(args, "reference"), t_dephase,
                                        args.lambda_schedule, args.alpha_mag, args.alpha_phase, args.d,
                                        args.steps, args.workers)
    if sc == "sweep-theta":
        grid = [j * math.pi / args.grid_denom for j in range(args.grid_first, args.grid_last + 1)]
        return experiments.cmd_sweep_theta(out, grid, args.d, args.l0, args.alpha_mag, args.alpha_phase,
                                           _optimizer_config(args))
    raise AssertionError(sc)


def _validate(args) -> None:
    if args.d < 1:
        raise ValueError("--d must be >= 1")
    if not 0.0 <= args.theta <= math.pi / 2:
        raise ValueError("--theta must lie in [0, pi/2]")
    if getattr(args, "steps", 0) < 0:
        raise ValueError("--steps must be >= 0")
    if getattr(args, "l0", 1) < 1:
        raise ValueError("--l0 must be >= 1")


def _replay(args) -> int:
    manifest = read_manifest(args.manifest)
    root = args.out or Path(tempfile.mkdtemp(prefix="scswalk-replay-"))
    code = main(list(manifest["argv"]) + ["--out", str(root)])
    if code not in (EXIT_OK, EXIT_EXHAUSTED):
        return code
    run_dir = root / (root / "latest").read_text(encoding="utf-8").strip()
    replayed = read_manifest(run_dir / "manifest.json")
    expected = {o["file"]: o["sha256"] for o in manifest["outputs"]}
    got = {o["file"]: o["sha256"] for o in replayed["outputs"]}
    if expected != got:
        for name in sorted(set(expected) | set(got)):
            if expected.get(name) != got.get(name):
                print(f"MISMATCH {name}", file=sys.stderr)
        return EXIT_MISMATCH
    print(f"replay identical: {len(got)} files ({run_dir})")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    args = build_parser().parse_args(argv)
    if args.subcommand == "replay":
        return _replay(args)
    try:
        _validate(args)
        root = args.out if args.out is not None else default_out_root()
        run_dir = new_run_dir(root, args.subcommand)
        t0 = time.perf_counter()
        outputs, summary = _run(args, run_dir)
    except (ValueError, ToleranceError, SingularBlochError, GridTooCoarseError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INVALID
    duration = time.perf_counter() - t0
    params = {k: v for k, v in vars(args).items() if k not in ("out", "subcommand")}
    # --out is not part of the experiment definition
    replay_argv = [a for i, a in enumerate(argv) if a != "--out" and (i == 0 or argv[i - 1] != "--out")]
    replay_argv = [a for a in replay_argv if not a.startswith("--out=")]
    exhausted = bool(summary.get("exhausted", False))
    write_manifest(run_dir, args.subcommand, params, replay_argv, args.seed, __version__, duration, outputs,
                   summary=summary, exhausted=exhausted)
    print(run_dir)
    return EXIT_EXHAUSTED if exhausted else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
