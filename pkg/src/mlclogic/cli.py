"""Command line interface.

Subcommands:

  simulate   run one logic program and write the sampled trajectory
  gate       run one program through a gate and score it
  sweep      estimate P(logic) along a noise or forcing grid
  phase      export a phase portrait labeled by input case
  latch      drive the set-reset latch and score both outputs

Every run writes a config.json snapshot of the effective settings next
to its outputs, and reruns with the same settings and seed produce
byte-identical files. Exit codes: 0 success, 1 logic failure, 2 bad
configuration or input, 3 divergence.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .decode import DecodeSettings, gate_spec
from .errors import (
    ConfigError,
    DivergedError,
    ForbiddenInputError,
    MlcLogicError,
)
from .experiments import (
    DESK_BITS_PER_RUN,
    DESK_N_RUNS,
    DESK_N_SETS,
    LATCH_DELTA,
    estimate_plogic,
    export_phase_portrait,
    gate_params,
    run_latch_experiment,
    sweep,
)
from .integrator import IntegratorConfig, integrate
from .seeding import derive_seed
from .signals import (
    COMBINER_ARITY,
    DEFAULT_BIT_DURATION,
    DEFAULT_TRANSIENT,
    LogicProgram,
)

EXIT_OK = 0
EXIT_LOGIC_FAILURE = 1
EXIT_CONFIG = 2
EXIT_DIVERGED = 3

# Flat config-file keys shared by all subcommands. Values in the file
# are overridden by flags given on the command line.
_COMMON_KEYS = {
    "out": ".",
    "seed": 0,
    "bias": None,
    "forcing": None,
    "noise": 0.0,
    "delta": None,
    "bit_duration": DEFAULT_BIT_DURATION,
    "transient": DEFAULT_TRANSIENT,
    "dt": 0.01,
    "stride": 1,
    "settle_fraction": 0.5,
    "agreement_threshold": 0.9,
    "divergence_bound": 1e3,
    "n_bits": 20,
    "bits": None,
}

_SWEEP_KEYS = {
    "sets": DESK_N_SETS,
    "runs": DESK_N_RUNS,
    "bits_per_run": DESK_BITS_PER_RUN,
}


def _add_common(p: argparse.ArgumentParser, gate_required=True) -> None:
    if gate_required:
        p.add_argument("--gate", required=True, help="gate registry name")
    p.add_argument("--config", help="JSON file with flat default settings")
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("--seed", type=int, help="top-level seed")
    p.add_argument("--bias", type=float, help="constant bias E")
    p.add_argument("--forcing", type=float, help="drive amplitude f")
    p.add_argument("--noise", type=float, help="noise intensity D")
    p.add_argument("--delta", type=float, help="logic encoding half-step")
    p.add_argument("--bit-duration", type=float, dest="bit_duration")
    p.add_argument("--transient", type=float)
    p.add_argument("--dt", type=float)
    p.add_argument("--stride", type=int, help="sample every Nth step")
    p.add_argument("--settle-fraction", type=float, dest="settle_fraction")
    p.add_argument(
        "--agreement-threshold", type=float, dest="agreement_threshold"
    )
    p.add_argument(
        "--divergence-bound", type=float, dest="divergence_bound"
    )
    p.add_argument("--n-bits", type=int, dest="n_bits")
    p.add_argument(
        "--bits",
        help="explicit program bits, flat comma list grouped per bit",
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mlclogic",
        description="Logic gates in a driven bistable circuit model.",
    )
    parser.add_argument(
        "--version", action="version", version=f"mlclogic {__version__}"
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_sim = sub.add_parser("simulate", help="write one sampled trajectory")
    _add_common(p_sim)

    p_gate = sub.add_parser("gate", help="score one program through a gate")
    _add_common(p_gate)

    p_sweep = sub.add_parser("sweep", help="P(logic) along a grid")
    _add_common(p_sweep)
    p_sweep.add_argument(
        "--axis", required=True, choices=("noise", "forcing")
    )
    p_sweep.add_argument(
        "--from", dest="grid_from", type=float, required=True
    )
    p_sweep.add_argument("--to", dest="grid_to", type=float, required=True)
    p_sweep.add_argument("--points", type=int, required=True)
    p_sweep.add_argument("--sets", type=int)
    p_sweep.add_argument("--runs", type=int)
    p_sweep.add_argument("--bits-per-run", type=int, dest="bits_per_run")

    p_phase = sub.add_parser("phase", help="export labeled phase samples")
    _add_common(p_phase)

    p_latch = sub.add_parser("latch", help="score the set-reset latch")
    _add_common(p_latch, gate_required=False)

    return parser


def _load_config_file(path) -> dict:
    try:
        with open(path) as fh:
            loaded = json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    if not isinstance(loaded, dict):
        raise ConfigError(f"config {path} must hold a flat JSON object")
    known = set(_COMMON_KEYS) | set(_SWEEP_KEYS) | {
        "gate", "axis", "grid_from", "grid_to", "points",
    }
    unknown = set(loaded) - known
    if unknown:
        raise ConfigError(
            f"unknown config keys: {', '.join(sorted(unknown))}"
        )
    return loaded


def _effective(args: argparse.Namespace, extra_keys=()) -> dict:
    """Merge defaults, config file, and explicit flags, in that order."""
    settings = dict(_COMMON_KEYS)
    for key in extra_keys:
        settings[key] = _SWEEP_KEYS.get(key)
    if getattr(args, "config", None):
        settings.update(_load_config_file(args.config))
    for key in list(settings):
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    for key in ("gate", "axis", "grid_from", "grid_to", "points"):
        val = getattr(args, key, None)
        if val is not None:
            settings[key] = val
    return settings


def _parse_bits(text: str, arity: int) -> tuple:
    try:
        flat = [int(tok) for tok in text.split(",") if tok.strip() != ""]
    except ValueError as exc:
        raise ConfigError(f"--bits must be a comma list of 0/1: {exc}")
    if not flat or len(flat) % arity:
        raise ConfigError(
            f"--bits length must be a positive multiple of {arity}"
        )
    n = len(flat) // arity
    return tuple(
        tuple(flat[k * arity + c] for k in range(n)) for c in range(arity)
    )


def _build_program(settings: dict, combiner: str, delta: float, seed: int):
    from .signals import random_program

    if settings.get("bits"):
        channels = _parse_bits(settings["bits"], COMBINER_ARITY[combiner])
        return LogicProgram(
            channels=channels,
            combiner=combiner,
            delta=delta,
            bit_duration=settings["bit_duration"],
            transient=settings["transient"],
        )
    return random_program(
        settings["n_bits"],
        combiner=combiner,
        seed=derive_seed(seed, "program", 0),
        delta=delta,
        bit_duration=settings["bit_duration"],
        transient=settings["transient"],
    )


def _integrator_config(settings: dict) -> IntegratorConfig:
    return IntegratorConfig(
        dt=settings["dt"],
        divergence_bound=settings["divergence_bound"],
        seed=derive_seed(settings["seed"], "noise", 0, 0),
        stride=settings["stride"],
    )


def _decode_settings(settings: dict) -> DecodeSettings:
    return DecodeSettings(
        settle_fraction=settings["settle_fraction"],
        agreement_threshold=settings["agreement_threshold"],
    )


def _write_snapshot(out_dir: Path, command: str, settings: dict) -> None:
    snapshot = dict(settings)
    snapshot["command"] = command
    snapshot["version"] = __version__
    with open(out_dir / "config.json", "w") as fh:
        json.dump(snapshot, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _resolve_params(settings: dict, spec):
    """Build operating params and write the resolved values back so the
    config snapshot records what actually ran."""
    if settings["delta"] is None:
        settings["delta"] = (
            LATCH_DELTA if spec.combiner == "DIFF2" else 0.2
        )
    params = gate_params(
        spec,
        bias=settings["bias"],
        f=settings["forcing"],
        noise_d=settings["noise"],
        delta=settings["delta"],
    )
    settings["bias"] = params.bias
    settings["forcing"] = params.f
    settings["noise"] = params.noise_d
    return params


def _run_simulate(args) -> int:
    settings = _effective(args)
    spec = gate_spec(settings["gate"])
    params = _resolve_params(settings, spec)
    program = _build_program(
        settings, spec.combiner, settings["delta"], settings["seed"]
    )
    config = _integrator_config(settings)
    out_dir = _ensure_out(settings)
    traj = integrate(
        (0.1, 0.1, 0.0), params, program, program.end_time, config
    )
    traj.write_csv(out_dir / "trajectory.csv")
    program.write_csv(out_dir / "program.csv")
    _write_snapshot(out_dir, "simulate", settings)
    return EXIT_OK


def _run_gate(args) -> int:
    from .decode import score_trial

    settings = _effective(args)
    spec = gate_spec(settings["gate"])
    params = _resolve_params(settings, spec)
    program = _build_program(
        settings, spec.combiner, settings["delta"], settings["seed"]
    )
    config = _integrator_config(settings)
    out_dir = _ensure_out(settings)
    traj = integrate(
        (0.1, 0.1, 0.0), params, program, program.end_time, config
    )
    outcome = score_trial(traj, program, spec, _decode_settings(settings))
    program.write_csv(out_dir / "program.csv")
    with open(out_dir / "outcome.json", "w") as fh:
        json.dump(outcome.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_snapshot(out_dir, "gate", settings)
    return EXIT_OK if outcome.success else EXIT_LOGIC_FAILURE


def _run_sweep(args) -> int:
    settings = _effective(args, extra_keys=_SWEEP_KEYS)
    spec = gate_spec(settings["gate"])
    if settings["points"] < 1:
        raise ConfigError("--points must be >= 1")
    values = np.linspace(
        settings["grid_from"], settings["grid_to"], settings["points"]
    )
    base = _resolve_params(settings, spec)
    config = _integrator_config(settings)
    out_dir = _ensure_out(settings)
    report = sweep(
        spec,
        settings["axis"],
        values,
        base_seed=settings["seed"],
        n_sets=settings["sets"],
        n_runs_per_set=settings["runs"],
        bits_per_run=settings["bits_per_run"],
        delta=settings["delta"],
        bit_duration=settings["bit_duration"],
        transient=settings["transient"],
        config=config,
        settings=_decode_settings(settings),
        params=base,
    )
    report.write_csv(out_dir / "report.csv")
    report.write_json(out_dir / "report.json")
    _write_snapshot(out_dir, "sweep", settings)
    return EXIT_OK


def _run_phase(args) -> int:
    settings = _effective(args)
    spec = gate_spec(settings["gate"])
    params = _resolve_params(settings, spec)
    program = _build_program(
        settings, spec.combiner, settings["delta"], settings["seed"]
    )
    config = _integrator_config(settings)
    out_dir = _ensure_out(settings)
    portrait = export_phase_portrait(program, params, config)
    portrait.write_csv(out_dir / "phase.csv")
    program.write_csv(out_dir / "program.csv")
    _write_snapshot(out_dir, "phase", settings)
    return EXIT_OK


def _run_latch(args) -> int:
    settings = _effective(args)
    spec = gate_spec("SR_HIGH")
    params = _resolve_params(settings, spec)
    program = _build_program(
        settings, "DIFF2", settings["delta"], settings["seed"]
    )
    config = _integrator_config(settings)
    out_dir = _ensure_out(settings)
    result = run_latch_experiment(
        program, params, config, _decode_settings(settings)
    )
    program.write_csv(out_dir / "program.csv")
    with open(out_dir / "latch.json", "w") as fh:
        json.dump(result.to_dict(), fh, indent=2, sort_keys=True)
        fh.write("\n")
    _write_snapshot(out_dir, "latch", settings)
    return EXIT_OK if result.success else EXIT_LOGIC_FAILURE


def _ensure_out(settings: dict) -> Path:
    out_dir = Path(settings["out"])
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise ConfigError(f"cannot create output dir {out_dir}: {exc}")
    return out_dir


_RUNNERS = {
    "simulate": _run_simulate,
    "gate": _run_gate,
    "sweep": _run_sweep,
    "phase": _run_phase,
    "latch": _run_latch,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return _RUNNERS[args.command](args)
    except DivergedError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DIVERGED
    except (ConfigError, ForbiddenInputError, MlcLogicError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
