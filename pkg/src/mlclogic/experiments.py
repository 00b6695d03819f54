"""Logic-reliability experiments: P(logic) estimation and sweeps.

P(logic) for a gate is the probability that a whole random input
program decodes correctly on every bit. It is estimated over a grid of
random programs crossed with independent noise streams; a trial counts
as a success only if all bits match the gate's oracle, and diverged
trials count as failures.

Desk-scale defaults (20 program sets, 5 noise runs each, 20 bits per
run) keep single points in the tens of seconds. All randomness derives
from one base seed through tagged hashing, so every experiment is
exactly repeatable.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, replace

import numpy as np

from .decode import (
    DEFAULT_SETTINGS,
    DecodeRule,
    DecodeSettings,
    GateSpec,
    TrialOutcome,
    gate_spec,
    score_residences,
    score_trial,
)
from .errors import ConfigError, ForbiddenInputError
from .integrator import (
    DEFAULT_X0,
    IntegratorConfig,
    batch_bit_residences,
    integrate,
)
from .params import CANONICAL, CircuitParams
from .seeding import derive_seed
from .signals import (
    DEFAULT_BIT_DURATION,
    DEFAULT_TRANSIENT,
    LogicProgram,
    random_program,
)

# Latch encoding half-step. Set/reset drive the latch at +/-2*delta,
# strong enough to leave only one well; the hold level 0 keeps both
# wells so the latched bit survives. The gate delta of 0.2 would make
# set/reset levels bistable too and holding would not be reliable.
LATCH_DELTA = 0.05

DESK_N_SETS = 20
DESK_N_RUNS = 5
DESK_BITS_PER_RUN = 20


def wilson_interval(successes: int, trials: int, z: float = 1.96):
    """Wilson score interval for a binomial proportion."""
    if trials <= 0:
        raise ConfigError("trials must be > 0")
    if not 0 <= successes <= trials:
        raise ConfigError("successes must be in [0, trials]")
    p = successes / trials
    z2 = z * z
    denom = 1.0 + z2 / trials
    center = (p + z2 / (2 * trials)) / denom
    half = (
        z
        * math.sqrt(p * (1 - p) / trials + z2 / (4 * trials * trials))
        / denom
    )
    # the score equation has exact roots 0 (s=0) and 1 (s=n); keep them
    # free of rounding dust
    lo = 0.0 if successes == 0 else max(0.0, center - half)
    hi = 1.0 if successes == trials else min(1.0, center + half)
    return lo, hi


def gate_params(
    gate,
    base: CircuitParams = CANONICAL,
    *,
    bias: float | None = None,
    f: float | None = None,
    noise_d: float | None = None,
    delta: float | None = None,
) -> CircuitParams:
    """Circuit parameters at a gate's operating point, with overrides."""
    spec = gate_spec(gate) if isinstance(gate, str) else gate
    return replace(
        base,
        bias=spec.bias if bias is None else bias,
        f=spec.f if f is None else f,
        noise_d=base.noise_d if noise_d is None else noise_d,
        delta=base.delta if delta is None else delta,
    )


@dataclass
class PLogicEstimate:
    """One estimated P(logic) value with its Wilson 95% interval."""

    trials: int
    successes: int
    diverged: int
    p_logic: float
    ci_lo: float
    ci_hi: float

    def to_dict(self) -> dict:
        return {
            "trials": self.trials,
            "successes": self.successes,
            "diverged": self.diverged,
            "p_logic": self.p_logic,
            "ci_lo": self.ci_lo,
            "ci_hi": self.ci_hi,
        }


def _trial_programs(
    gate: GateSpec,
    n_sets: int,
    bits_per_run: int,
    base_seed: int,
    delta: float,
    bit_duration: float,
    transient: float,
):
    return [
        random_program(
            bits_per_run,
            combiner=gate.combiner,
            seed=derive_seed(base_seed, "program", i),
            delta=delta,
            bit_duration=bit_duration,
            transient=transient,
        )
        for i in range(n_sets)
    ]


def estimate_plogic(
    gate,
    params: CircuitParams | None = None,
    *,
    n_sets: int = DESK_N_SETS,
    n_runs_per_set: int = DESK_N_RUNS,
    bits_per_run: int = DESK_BITS_PER_RUN,
    base_seed: int = 0,
    delta: float | None = None,
    bit_duration: float = DEFAULT_BIT_DURATION,
    transient: float = DEFAULT_TRANSIENT,
    config: IntegratorConfig | None = None,
    settings: DecodeSettings = DEFAULT_SETTINGS,
    x0=DEFAULT_X0,
) -> PLogicEstimate:
    """Estimate P(logic) for one gate at one operating point.

    Draws n_sets random programs and runs each with n_runs_per_set
    independent noise streams (one stream per trial; deterministic
    runs never consume draws). params defaults to the gate's canonical
    operating point; pass explicit params to move it.
    """
    spec = gate_spec(gate) if isinstance(gate, str) else gate
    if params is None:
        params = gate_params(spec)
    if delta is None:
        delta = LATCH_DELTA if spec.combiner == "DIFF2" else params.delta
    config = config if config is not None else IntegratorConfig()
    if n_sets < 1 or n_runs_per_set < 1 or bits_per_run < 1:
        raise ConfigError("n_sets, n_runs_per_set, bits_per_run must be >= 1")

    programs = _trial_programs(
        spec, n_sets, bits_per_run, base_seed, delta, bit_duration, transient
    )
    levels = np.array([p.levels() for p in programs])
    levels_full = np.repeat(levels, n_runs_per_set, axis=0)
    noise_seeds = [
        derive_seed(base_seed, "noise", i, j)
        for i in range(n_sets)
        for j in range(n_runs_per_set)
    ]
    result = batch_bit_residences(
        params,
        levels_full,
        bit_duration=bit_duration,
        transient=transient,
        config=config,
        indicators=[spec.indicator()],
        settle_fraction=settings.settle_fraction,
        noise_seeds=noise_seeds,
        x0=x0,
    )
    res = result.residences[0]
    successes = 0
    diverged = 0
    n_trials = n_sets * n_runs_per_set
    for t in range(n_trials):
        if result.diverged[t]:
            diverged += 1
            continue
        outcome = score_residences(
            spec, programs[t // n_runs_per_set].bit_tuples(), res[t], settings
        )
        if outcome.success:
            successes += 1
    lo, hi = wilson_interval(successes, n_trials)
    return PLogicEstimate(
        trials=n_trials,
        successes=successes,
        diverged=diverged,
        p_logic=successes / n_trials,
        ci_lo=lo,
        ci_hi=hi,
    )


@dataclass
class PLogicReport:
    """P(logic) along one swept axis."""

    gate: str
    axis: str
    axis_values: list
    points: list

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            fh.write("axis_value,trials,successes,p_logic,ci_lo,ci_hi\n")
            for v, pt in zip(self.axis_values, self.points):
                fh.write(
                    "%.17g,%d,%d,%.17g,%.17g,%.17g\n"
                    % (v, pt.trials, pt.successes, pt.p_logic, pt.ci_lo, pt.ci_hi)
                )

    def to_dict(self) -> dict:
        return {
            "gate": self.gate,
            "axis": self.axis,
            "points": [
                dict(axis_value=v, **pt.to_dict())
                for v, pt in zip(self.axis_values, self.points)
            ],
        }

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")


SWEEP_AXES = ("noise", "forcing")


def sweep(
    gate,
    axis: str,
    values,
    *,
    base_seed: int = 0,
    n_sets: int = DESK_N_SETS,
    n_runs_per_set: int = DESK_N_RUNS,
    bits_per_run: int = DESK_BITS_PER_RUN,
    delta: float | None = None,
    bit_duration: float = DEFAULT_BIT_DURATION,
    transient: float = DEFAULT_TRANSIENT,
    config: IntegratorConfig | None = None,
    settings: DecodeSettings = DEFAULT_SETTINGS,
    params: CircuitParams | None = None,
) -> PLogicReport:
    """Estimate P(logic) along a noise or forcing amplitude grid.

    Each grid point gets its own derived seed, so single points can be
    reproduced in isolation with estimate_plogic.
    """
    spec = gate_spec(gate) if isinstance(gate, str) else gate
    if axis not in SWEEP_AXES:
        raise ConfigError(f"axis must be one of {SWEEP_AXES}")
    values = [float(v) for v in values]
    if len(values) < 1:
        raise ConfigError("sweep needs at least one grid value")
    if any(b <= a for a, b in zip(values, values[1:])):
        raise ConfigError("sweep values must be strictly increasing")
    base = gate_params(spec) if params is None else params
    points = []
    for i, v in enumerate(values):
        if axis == "noise":
            params_i = replace(base, noise_d=v)
        else:
            params_i = replace(base, f=v)
        points.append(
            estimate_plogic(
                spec,
                params_i,
                n_sets=n_sets,
                n_runs_per_set=n_runs_per_set,
                bits_per_run=bits_per_run,
                base_seed=derive_seed(base_seed, "sweep", axis, i),
                delta=delta,
                bit_duration=bit_duration,
                transient=transient,
                config=config,
                settings=settings,
            )
        )
    return PLogicReport(
        gate=spec.kind, axis=axis, axis_values=values, points=points
    )


@dataclass
class PhasePortrait:
    """Post-transient state samples labeled with the active input bits."""

    x1: np.ndarray
    x2: np.ndarray
    bits: np.ndarray

    def write_csv(self, path) -> None:
        n_ch = self.bits.shape[1]
        with open(path, "w", newline="") as fh:
            fh.write(
                "x1,x2," + ",".join(f"bit_ch{i + 1}" for i in range(n_ch))
            )
            fh.write("\n")
            for k in range(len(self.x1)):
                fh.write(
                    "%.17g,%.17g,%s\n"
                    % (
                        self.x1[k],
                        self.x2[k],
                        ",".join(str(int(b)) for b in self.bits[k]),
                    )
                )


def export_phase_portrait(
    program: LogicProgram,
    params: CircuitParams,
    config: IntegratorConfig | None = None,
    rng: np.random.Generator | None = None,
    x0=DEFAULT_X0,
) -> PhasePortrait:
    """Run one program and return its post-transient phase samples.

    Each sample carries the input bit tuple that was active when it
    was taken, so the portrait can be split by input case.
    """
    config = config if config is not None else IntegratorConfig()
    traj = integrate(
        x0, params, program, program.end_time, config, rng=rng
    )
    j = np.rint(traj.t / config.dt).astype(np.int64)
    ts = round(program.transient / config.dt)
    spb = round(program.bit_duration / config.dt)
    keep = j > ts
    k = np.minimum((j[keep] - ts - 1) // spb, program.n_bits - 1)
    tuples = np.array(program.bit_tuples(), dtype=int)
    return PhasePortrait(
        x1=traj.x1[keep], x2=traj.x2[keep], bits=tuples[k]
    )


@dataclass
class LatchResult:
    """Both decoded outputs of one latch run."""

    high: TrialOutcome
    low: TrialOutcome

    @property
    def success(self) -> bool:
        return self.high.success and self.low.success

    def complementary(self) -> bool:
        """True when the two outputs decode to opposite bits everywhere."""
        return all(
            bh.decoded is not None
            and bl.decoded is not None
            and bh.decoded == 1 - bl.decoded
            for bh, bl in zip(self.high.bits, self.low.bits)
        )

    def to_dict(self) -> dict:
        return {
            "success": self.success,
            "complementary": self.complementary(),
            "high": self.high.to_dict(),
            "low": self.low.to_dict(),
        }


def run_latch_experiment(
    program: LogicProgram,
    params: CircuitParams | None = None,
    config: IntegratorConfig | None = None,
    settings: DecodeSettings = DEFAULT_SETTINGS,
    rng: np.random.Generator | None = None,
    x0=DEFAULT_X0,
) -> LatchResult:
    """Drive the latch with a set/reset program and score both outputs.

    The program must use the DIFF2 combiner and contain no (1,1) pair;
    channel 1 is set, channel 2 is reset. One integration scores both
    the latched output (on x2) and its complement (on x1).
    """
    if program.combiner != "DIFF2":
        raise ConfigError("latch programs must use the DIFF2 combiner")
    bad = [
        k for k, b in enumerate(program.bit_tuples()) if b == (1, 1)
    ]
    if bad:
        raise ForbiddenInputError(
            f"latch input (1,1) is forbidden (bits {bad})"
        )
    if params is None:
        params = gate_params("SR_HIGH", delta=LATCH_DELTA)
    config = config if config is not None else IntegratorConfig()
    traj = integrate(
        x0, params, program, program.end_time, config, rng=rng
    )
    high = score_trial(traj, program, gate_spec("SR_HIGH"), settings)
    low = score_trial(traj, program, gate_spec("SR_LOW"), settings)
    return LatchResult(high=high, low=low)


def calibrate_xnor_band(
    grid=None,
    *,
    base_seed: int = 0,
    n_programs: int = 20,
    bits_per_run: int = DESK_BITS_PER_RUN,
    bit_duration: float = DEFAULT_BIT_DURATION,
    transient: float = DEFAULT_TRANSIENT,
    config: IntegratorConfig | None = None,
    settings: DecodeSettings = DEFAULT_SETTINGS,
):
    """Find the x2 rejection band half-width for the exclusive-nor.

    Runs random programs at the exclusive-or operating point and scores
    each candidate half-width theta by bitwise agreement between the
    band-complement decode on x2 and the complement of the exclusive-or
    decode on x1. Returns (best_theta, table) where table holds
    (theta, agreement) pairs and best_theta is the midpoint of the
    widest contiguous run of perfect agreement.
    """
    if grid is None:
        grid = np.round(np.arange(1.0, 1.61, 0.01), 10)
    grid = [float(g) for g in grid]
    config = config if config is not None else IntegratorConfig()
    xor = gate_spec("XOR")
    params = gate_params(xor)
    programs = _trial_programs(
        xor,
        n_programs,
        bits_per_run,
        base_seed,
        params.delta,
        bit_duration,
        transient,
    )
    levels = np.array([p.levels() for p in programs])

    def band_indicator(theta):
        rule = DecodeRule("BAND", -theta, theta)
        return lambda x1, x2: rule.holds(x2)

    result = batch_bit_residences(
        params,
        levels,
        bit_duration=bit_duration,
        transient=transient,
        config=config,
        indicators=[xor.indicator()] + [band_indicator(t) for t in grid],
        settle_fraction=settings.settle_fraction,
    )
    expected = np.array(
        [
            [1 - (b[0] ^ b[1]) for b in p.bit_tuples()]
            for p in programs
        ]
    )
    thr = settings.agreement_threshold
    table = []
    for gi, theta in enumerate(grid):
        # BAND_COMPLEMENT residence is 1 - BAND residence
        res = 1.0 - result.residences[1 + gi]
        decoded = np.full(res.shape, -1)
        decoded[res >= thr] = 1
        decoded[(1.0 - res) >= thr] = 0
        table.append((theta, float(np.mean(decoded == expected))))
    best_run = (0, None)
    run_start = None
    for i, (theta, agr) in enumerate(table + [(None, 0.0)]):
        if agr == 1.0:
            if run_start is None:
                run_start = i
        elif run_start is not None:
            length = i - run_start
            if length > best_run[0]:
                best_run = (length, (run_start + i - 1) // 2)
            run_start = None
    if best_run[1] is None:
        raise ConfigError("no half-width achieved perfect agreement")
    return table[best_run[1]][0], table
