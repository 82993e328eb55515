"""Command-line batch runner.

    resdecay poles   --lambda 6 --a 1 --n 10
    resdecay evolve1 --config run.json --alpha 1
    resdecay evolve2 --alpha 1 --beta 2 --sign -1
    resdecay audit   --alpha 1
    resdecay tailfit --kind entangled --sign -1 --window 100 1000 --quantity wavefunction

Each command writes CSV/JSON into the output directory (config file, then
RESDECAY_OUTPUT_DIR, then --output, later ones winning) and prints a JSON
summary on stdout.  Failures print a JSON error object on stderr and exit
with 2 (configuration), 3 (numerical) or 4 (I/O).
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import __version__
from . import single_particle as sp
from . import two_particle as tp
from .config import ConfigError, RunConfig, load, override, validate
from .delta_shell import ShellPotential, find_poles, normalization_residual
from .errors import (DegenerateNorm, DegenerateState, DomainError, MissedPole, NonConvergence,
                     QuadratureNotConverged, TruncationCapReached, WindowTooShort)
from .resonant_basis import InitialState, ResonantBasis, choose_truncation, strength_sum
from .tables import (coefficient_columns, config_hash, curve_columns, frame_columns,
                     frame_columns_two, pole_columns, write_json, write_table)

OUTPUT_ENV = "RESDECAY_OUTPUT_DIR"
EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL, EXIT_IO = 0, 2, 3, 4
MAX_TWO_BODY_FRAMES = 20

_NUMERICAL = (NonConvergence, MissedPole, DegenerateNorm, QuadratureNotConverged,
              TruncationCapReached, WindowTooShort, DomainError, ArithmeticError,
              FloatingPointError)


# ---------------------------------------------------------------- parallel map

def map_time_blocks(fn, times, workers: int = 1):
    """Apply ``fn`` to fixed-size chunks of ``times`` and concatenate in order.

    Chunks are multiples of the engine's time block, so every sample is
    computed by exactly the same arithmetic whatever ``workers`` is.
    """
    times = np.asarray(times, float)
    step = sp.TIME_BLOCK * 4
    chunks = [times[i:i + step] for i in range(0, len(times), step)]
    if workers <= 1 or len(chunks) == 1:
        parts = [fn(c) for c in chunks]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(fn, chunks))
    return np.concatenate(parts, axis=0)


# ------------------------------------------------------------------- builders

def _potential(cfg: RunConfig) -> ShellPotential:
    return ShellPotential(cfg.potential.lam, cfg.potential.a)


def _orbitals(cfg: RunConfig, two_body: bool) -> list[InitialState]:
    a = cfg.potential.a
    kind = _two_body_kind(cfg) if two_body else "box"
    states = [InitialState.box(cfg.initial.alpha, a)]
    if kind == "entangled":
        if cfg.initial.beta == cfg.initial.alpha:
            raise DegenerateState(
                f"entangled state needs alpha != beta (got {cfg.initial.alpha} twice)")
        states.append(InitialState.box(cfg.initial.beta, a))
    return states


def _two_body_kind(cfg: RunConfig) -> str:
    return "entangled" if cfg.initial.kind == "box" else cfg.initial.kind


def _truncation(cfg: RunConfig, p: ShellPotential, states) -> int:
    if cfg.truncation.n is not None:
        return cfg.truncation.n
    return max(choose_truncation(p, s, cfg.truncation.tol) for s in states)


def _times(cfg: RunConfig, tau: float) -> np.ndarray:
    g = cfg.time_grid
    scale = tau if g.unit == "lifetime" else 1.0
    return np.geomspace(g.t_min * scale, g.t_max * scale, g.points)


def _radii(cfg: RunConfig) -> np.ndarray:
    a = cfg.potential.a
    return np.linspace(0.0, a, cfg.spatial_grid.points, endpoint=False)


def _meta(cfg: RunConfig, command: str, **extra) -> dict:
    meta = {"command": command, "config_hash": config_hash(cfg.physics_dict()),
            "config": cfg.physics_dict(),
            "tolerances": {"pole_residual_rtol": 1e-10, "coefficient_quadrature": 1e-10,
                           "truncation_tol": cfg.truncation.tol}}
    meta.update(extra)
    return meta


def _two_body_state(cfg: RunConfig, basis: ResonantBasis, states):
    if _two_body_kind(cfg) == "factorized":
        return tp.TwoBodyState.factorized(basis, states[0])
    return tp.TwoBodyState.entangled(basis, states[0], states[1], cfg.initial.sign)


# ------------------------------------------------------------------- commands

def cmd_poles(cfg: RunConfig, out: Path, workers: int = 1) -> dict:
    poles = find_poles(_potential(cfg), cfg.poles.n)
    path = write_table(out / "poles.csv", pole_columns(poles), _meta(cfg, "poles"))
    return {"files": [str(path)], "n": len(poles),
            "max_residual": float(np.max(poles.residuals()))}


def cmd_evolve1(cfg: RunConfig, out: Path, workers: int = 1) -> dict:
    p = _potential(cfg)
    states = _orbitals(cfg, two_body=False)
    n = _truncation(cfg, p, states)
    basis = ResonantBasis.build(p, n)
    ex = sp.Expansion.build(basis, states[0])
    times = _times(cfg, basis.poles.lifetime)
    meta = _meta(cfg, "evolve1", n_max=n, lifetime=basis.poles.lifetime)
    files = [write_table(out / "coefficients.csv", coefficient_columns(ex.coeffs), meta)]
    if cfg.outputs.curves:
        amp = map_time_blocks(lambda t: sp.survival_amplitude(ex, t), times, workers)
        prob = map_time_blocks(lambda t: sp.nonescape_probability(ex, t), times, workers)
        files.append(write_table(out / "curves.csv",
                                 curve_columns(times, np.abs(amp) ** 2, prob, amp), meta))
    if cfg.outputs.frames:
        r = _radii(cfg)
        psi = map_time_blocks(lambda t: sp.evolve(ex, r, t), times, workers)
        files.append(write_table(out / "frames.csv", frame_columns(times, r, psi), meta))
    return {"files": [str(f) for f in files], "n_max": n}


def cmd_evolve2(cfg: RunConfig, out: Path, workers: int = 1) -> dict:
    p = _potential(cfg)
    states = _orbitals(cfg, two_body=True)
    n = _truncation(cfg, p, states)
    basis = ResonantBasis.build(p, n)
    state = _two_body_state(cfg, basis, states)
    times = _times(cfg, basis.poles.lifetime)
    meta = _meta(cfg, "evolve2", n_max=n, state=state.label(),
                 lifetime=basis.poles.lifetime)
    files = []
    if cfg.outputs.curves:
        amp = map_time_blocks(lambda t: tp.survival_two(state, t)[0], times, workers)
        prob = map_time_blocks(lambda t: tp.nonescape_two(state, t), times, workers)
        files.append(write_table(out / "curves2.csv",
                                 curve_columns(times, np.abs(amp) ** 2, prob, amp), meta))
    if cfg.outputs.frames:
        r = _radii(cfg)
        pick = np.unique(np.linspace(0, len(times) - 1,
                                     min(len(times), MAX_TWO_BODY_FRAMES)).astype(int))
        ft = times[pick]

        def frame_block(t):
            return np.stack([f.psi for f in tp.frames_two(state, t, r)])

        psi = map_time_blocks(frame_block, ft, workers)
        files.append(write_table(out / "frames2.csv", frame_columns_two(ft, r, psi),
                                 meta))
    return {"files": [str(f) for f in files], "n_max": n, "state": state.label()}


def cmd_audit(cfg: RunConfig, out: Path, workers: int = 1) -> dict:
    p = _potential(cfg)
    states = _orbitals(cfg, two_body=cfg.initial.kind != "box")
    n = _truncation(cfg, p, states)
    basis = ResonantBasis.build(p, n)
    report = {"n_max": n, "lifetime": basis.poles.lifetime,
              "argument_principle": "passed",
              "max_pole_residual_over_lambda": float(np.max(basis.poles.residuals()) / p.lam),
              "max_normalization_residual": float(max(
                  normalization_residual(basis.state(k)) for k in range(1, n + 1))),
              "tolerance": cfg.audit.tolerance, "orbitals": []}
    ok = True
    for s in states:
        total = strength_sum(sp.Expansion.build(basis, s).coeffs)
        within = abs(total - 1.0) <= cfg.audit.tolerance
        ok &= within
        report["orbitals"].append({"state": s.label(), "strength_sum": total,
                                   "deficit": 1.0 - total, "within_tolerance": within})
    report["strength_sum"] = report["orbitals"][0]["strength_sum"]
    report["passed"] = bool(ok)
    report.update({k: v for k, v in _meta(cfg, "audit").items() if k != "config"})
    report["engine_version"] = __version__
    path = write_json(out / "audit.json", report)
    return {"files": [str(path)], "passed": report["passed"],
            "strength_sum": report["strength_sum"]}


def cmd_tailfit(cfg: RunConfig, out: Path, workers: int = 1) -> dict:
    p = _potential(cfg)
    two_body = cfg.initial.kind != "box"
    states = _orbitals(cfg, two_body)
    n = _truncation(cfg, p, states)
    basis = ResonantBasis.build(p, n)
    tau = basis.poles.lifetime
    tf = cfg.tailfit
    scale = tau if cfg.time_grid.unit == "lifetime" else 1.0
    window = (tf.window[0] * scale, tf.window[1] * scale)
    times = np.geomspace(window[0], window[1], tf.points)
    r1, r2 = tf.r

    if two_body:
        state = _two_body_state(cfg, basis, states)
        label = state.label()
        if tf.quantity == "survival":
            values = map_time_blocks(lambda t: tp.survival_two(state, t)[1], times, workers)
        else:
            values = map_time_blocks(lambda t: np.abs(tp.evolve_two(state, r1, r2, t)),
                                     times, workers)
        expo, _ = tp.evolve_two_split(state, r1, r2, times)
        total = tp.evolve_two(state, r1, r2, times)
    else:
        ex = sp.Expansion.build(basis, states[0])
        label = ex.psi.label()
        if tf.quantity == "survival":
            values = map_time_blocks(lambda t: sp.survival_probability(ex, t), times, workers)
        else:
            values = map_time_blocks(lambda t: np.abs(sp.evolve(ex, r1, t)), times, workers)
        expo, _ = sp.evolve_split(ex, r1, times)
        total = sp.evolve(ex, r1, times)

    onset = tp.post_exponential_onset(times, expo, total)
    slope, stderr = tp.tail_fit(times, values, window)
    report = {"state": label, "quantity": tf.quantity, "n_max": n, "lifetime": tau,
              "window": list(window), "window_in_lifetimes": [window[0] / tau, window[1] / tau],
              "points": tf.points, "slope": slope, "stderr": stderr,
              "post_exponential_onset": onset,
              "window_post_exponential": bool(onset <= window[0]),
              "engine_version": __version__,
              "config_hash": config_hash(cfg.physics_dict())}
    if tf.quantity == "wavefunction":
        report["position"] = [r1, r2] if two_body else [r1]
    path = write_json(out / "tailfit.json", report)
    return {"files": [str(path)], "slope": slope, "stderr": stderr}


_HELP = {"poles": "tabulate resonance poles",
         "evolve1": "single-particle decay curves and frames",
         "evolve2": "two-particle decay curves and frames",
         "audit": "strength-sum and normalization report",
         "tailfit": "log-log slope of a long-time tail"}

COMMANDS = {"poles": cmd_poles, "evolve1": cmd_evolve1, "evolve2": cmd_evolve2,
            "audit": cmd_audit, "tailfit": cmd_tailfit}


# ---------------------------------------------------------------------- parser

_FLAGS = [
    # flag, config path, type, help
    ("--lambda", "potential.lam", float, "shell strength"),
    ("--a", "potential.a", float, "shell radius"),
    ("--kind", "initial.kind", str, "box, factorized or entangled"),
    ("--alpha", "initial.alpha", int, "first box orbital"),
    ("--beta", "initial.beta", int, "second box orbital"),
    ("--sign", "initial.sign", int, "+1 symmetric, -1 antisymmetric"),
    ("--tol", "truncation.tol", float, "strength-sum tolerance picking N"),
    ("--n-max", "truncation.n", int, "explicit truncation N"),
    ("--t-min", "time_grid.t_min", float, "first time"),
    ("--t-max", "time_grid.t_max", float, "last time"),
    ("--points", "time_grid.points", int, "number of log-spaced times"),
    ("--unit", "time_grid.unit", str, "lifetime or absolute"),
    ("--r-points", "spatial_grid.points", int, "spatial samples on [0, a)"),
    ("--n", "poles.n", int, "number of poles to tabulate"),
    ("--quantity", "tailfit.quantity", str, "survival or wavefunction"),
    ("--audit-tol", "audit.tolerance", float, "allowed |1 - strength sum|"),
]


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="resdecay", description="Resonant-state decay calculations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)
    for name in COMMANDS:
        sp_ = sub.add_parser(name, help=_HELP[name])
        sp_.add_argument("--config", help="JSON run configuration")
        sp_.add_argument("--output", help="output directory")
        sp_.add_argument("--workers", type=int, default=1, help="worker threads")
        for flag, dest, typ, text in _FLAGS:
            sp_.add_argument(flag, dest=dest.replace(".", "__"), type=typ, help=text)
        sp_.add_argument("--window", nargs=2, type=float, metavar=("LO", "HI"),
                         help="tail-fit window (in the time-grid unit)")
        sp_.add_argument("--r", nargs=2, type=float, metavar=("R1", "R2"),
                         help="interior point(s) for wavefunction tail fits")
        sp_.add_argument("--no-frames", action="store_true", help="skip frame tables")
    return parser


def resolve_config(args) -> RunConfig:
    cfg = load(args.config) if args.config else RunConfig()
    if os.environ.get(OUTPUT_ENV):
        cfg.outputs.directory = os.environ[OUTPUT_ENV]
    if args.output:
        cfg.outputs.directory = args.output
    for _, dest, _, _ in _FLAGS:
        value = getattr(args, dest.replace(".", "__"))
        if value is not None:
            override(cfg, dest, value)
    if args.__dict__.get("truncation__n") is not None:
        cfg.truncation.tol = None
    elif args.__dict__.get("truncation__tol") is not None:
        cfg.truncation.n = None
    if args.window:
        cfg.tailfit.window = list(args.window)
    if args.r:
        cfg.tailfit.r = list(args.r)
    if args.no_frames:
        cfg.outputs.frames = False
    if args.workers < 1:
        raise ConfigError("must be at least 1", "workers")
    return validate(cfg)


def _fail(exc: BaseException, code: int) -> int:
    err = {"error": type(exc).__name__, "message": str(exc), "exit_code": code}
    for attr in ("field", "line"):
        if getattr(exc, attr, None) is not None:
            err[attr] = getattr(exc, attr)
    print(json.dumps(err), file=sys.stderr)
    return code


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        cfg = resolve_config(args)
        out = Path(cfg.outputs.directory)
        summary = COMMANDS[args.command](cfg, out, args.workers)
    except (ConfigError, DegenerateState) as exc:
        return _fail(exc, EXIT_CONFIG)
    except SystemExit as exc:  # --help / --version
        return int(exc.code or 0)
    except OSError as exc:
        return _fail(exc, EXIT_IO)
    except _NUMERICAL as exc:
        return _fail(exc, EXIT_NUMERICAL)
    except ValueError as exc:
        return _fail(exc, EXIT_CONFIG)
    print(json.dumps(dict(summary, command=args.command, exit_code=EXIT_OK)))
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
