"""Decoding circuit responses into logic outputs, and the gate registry.

Each gate reads one state variable and reduces each bit window to a
residence fraction: the share of post-settle samples where the gate's
decode rule held. A bit decodes to 1 when residence reaches the
agreement threshold, to 0 when (1 - residence) does, and is otherwise
indeterminate, which always scores as a failure.

Sign decoding exploits the two wells of the bistable circuit: x1 > 0
selects the right well and x2 is anti-correlated with x1, so the same
run yields a gate on x1 and its complement on x2 for free. The
exclusive gates instead test whether the orbit stays inside a band
around the origin (small orbit in either well) or escapes it (large
orbit far in a well), which distinguishes the matched-input cases from
the mixed ones at a stronger drive.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import (
    ArityMismatchError,
    ConfigError,
    EmptySegmentError,
    ForbiddenInputError,
)

INDETERMINATE = None

# Calibrated half-width of the x2 rejection band for the complement of
# the exclusive-or decode. The run-all plateau at the standard
# operating point spans [1.28, 1.31]; 1.3 sits inside it.
XNOR_BAND_HALF_WIDTH = 1.3

RULE_KINDS = ("SIGN_POS", "SIGN_NEG", "BAND", "BAND_COMPLEMENT")


@dataclass(frozen=True)
class DecodeRule:
    """Predicate on one decoded variable.

    SIGN_POS          v > 0
    SIGN_NEG          v < 0
    BAND              lo <= v <= hi
    BAND_COMPLEMENT   v < lo or v > hi
    """

    kind: str
    lo: float | None = None
    hi: float | None = None

    def __post_init__(self):
        if self.kind not in RULE_KINDS:
            raise ConfigError(f"unknown decode rule {self.kind!r}")
        if self.kind in ("BAND", "BAND_COMPLEMENT"):
            if self.lo is None or self.hi is None or not self.lo < self.hi:
                raise ConfigError("band rules need lo < hi")

    def holds(self, values):
        """Evaluate the predicate. Polymorphic over scalars/arrays."""
        v = np.asarray(values)
        if self.kind == "SIGN_POS":
            return v > 0.0
        if self.kind == "SIGN_NEG":
            return v < 0.0
        inside = (v >= self.lo) & (v <= self.hi)
        return inside if self.kind == "BAND" else ~inside


@dataclass(frozen=True)
class DecodeSettings:
    """Shared windowing thresholds for bit decoding."""

    settle_fraction: float = 0.5
    agreement_threshold: float = 0.9

    def __post_init__(self):
        if not 0 <= self.settle_fraction < 1:
            raise ConfigError("settle_fraction must be in [0, 1)")
        if not 0.5 < self.agreement_threshold <= 1:
            raise ConfigError("agreement_threshold must be in (0.5, 1]")


DEFAULT_SETTINGS = DecodeSettings()


@dataclass(frozen=True)
class GateSpec:
    """A gate: its oracle kind, operating point, and decode rule.

    kind          truth-table identifier, also the registry key
    decode_var    which state variable carries the output ("x1"/"x2")
    rule          decode predicate on that variable
    bias          constant bias E the gate operates at
    f             sinusoidal drive amplitude the gate operates at
    combiner      how input channels combine into I(t)
    """

    kind: str
    decode_var: str
    rule: DecodeRule
    bias: float
    f: float
    combiner: str

    def __post_init__(self):
        if self.decode_var not in ("x1", "x2"):
            raise ConfigError("decode_var must be 'x1' or 'x2'")

    @property
    def n_inputs(self) -> int:
        return 3 if self.combiner == "SUM3" else 2

    def indicator(self):
        """Per-sample predicate as a callable (x1, x2) -> bool array."""
        rule = self.rule
        if self.decode_var == "x1":
            return lambda x1, x2: rule.holds(x1)
        return lambda x1, x2: rule.holds(x2)


_SIGN_POS = DecodeRule("SIGN_POS")
_SIGN_NEG = DecodeRule("SIGN_NEG")

GATES = {
    "OR": GateSpec("OR", "x1", _SIGN_POS, 0.01, 0.1, "SUM2"),
    "NOR": GateSpec("NOR", "x2", _SIGN_POS, 0.01, 0.1, "SUM2"),
    "AND": GateSpec("AND", "x1", _SIGN_POS, -0.01, 0.1, "SUM2"),
    "NAND": GateSpec("NAND", "x2", _SIGN_POS, -0.01, 0.1, "SUM2"),
    "XOR": GateSpec(
        "XOR", "x1", DecodeRule("BAND", -1.5, 1.5), 0.01, 0.16, "SUM2"
    ),
    "XNOR": GateSpec(
        "XNOR",
        "x2",
        DecodeRule(
            "BAND_COMPLEMENT", -XNOR_BAND_HALF_WIDTH, XNOR_BAND_HALF_WIDTH
        ),
        0.01,
        0.16,
        "SUM2",
    ),
    "OR3": GateSpec("OR3", "x1", _SIGN_POS, 0.25, 0.1, "SUM3"),
    "AND3": GateSpec("AND3", "x1", _SIGN_POS, -0.25, 0.1, "SUM3"),
    "SR_HIGH": GateSpec("SR_HIGH", "x2", _SIGN_NEG, 0.0, 0.1, "DIFF2"),
    "SR_LOW": GateSpec("SR_LOW", "x1", _SIGN_NEG, 0.0, 0.1, "DIFF2"),
}

LATCH_KINDS = ("SR_HIGH", "SR_LOW")


def gate_spec(name: str) -> GateSpec:
    """Look up a gate by its registry key, case-insensitively."""
    spec = GATES.get(name.upper())
    if spec is None:
        raise ConfigError(
            f"unknown gate {name!r}; known: {', '.join(sorted(GATES))}"
        )
    return spec


def oracle(kind: str, bits, prev_q=None) -> int:
    """Expected logic output for one input tuple.

    For the latch kinds, prev_q is the gate's own previous output
    (SR_HIGH threads Q, SR_LOW threads not-Q) and is required when the
    input is the hold pair (0,0). The (1,1) pair is forbidden and
    raises ForbiddenInputError.
    """
    bits = tuple(int(b) for b in bits)
    if any(b not in (0, 1) for b in bits):
        raise ConfigError(f"bits must be 0 or 1, got {bits}")
    kind = kind.upper()
    if kind in ("OR", "NOR", "AND", "NAND", "XOR", "XNOR"):
        _expect_arity(kind, bits, 2)
        val = {
            "OR": bits[0] | bits[1],
            "NOR": 1 - (bits[0] | bits[1]),
            "AND": bits[0] & bits[1],
            "NAND": 1 - (bits[0] & bits[1]),
            "XOR": bits[0] ^ bits[1],
            "XNOR": 1 - (bits[0] ^ bits[1]),
        }[kind]
        return val
    if kind == "OR3":
        _expect_arity(kind, bits, 3)
        return bits[0] | bits[1] | bits[2]
    if kind == "AND3":
        _expect_arity(kind, bits, 3)
        return bits[0] & bits[1] & bits[2]
    if kind == "SR_HIGH":
        _expect_arity(kind, bits, 2)
        return _sr_next(bits, prev_q)
    if kind == "SR_LOW":
        _expect_arity(kind, bits, 2)
        prev_high = None if prev_q is None else 1 - int(prev_q)
        return 1 - _sr_next(bits, prev_high)
    raise ConfigError(f"unknown gate kind {kind!r}")


def _expect_arity(kind: str, bits, n: int) -> None:
    if len(bits) != n:
        raise ArityMismatchError(f"{kind} expects {n} inputs, got {len(bits)}")


def _sr_next(bits, prev_q) -> int:
    set_b, reset_b = bits
    if set_b and reset_b:
        raise ForbiddenInputError("latch input (1,1) is forbidden")
    if set_b:
        return 1
    if reset_b:
        return 0
    if prev_q is None:
        raise ConfigError("hold input (0,0) needs prev_q")
    return int(prev_q)


def decide(residence: float, threshold: float):
    """Map a residence fraction to 1, 0, or INDETERMINATE."""
    if residence >= threshold:
        return 1
    if 1.0 - residence >= threshold:
        return 0
    return INDETERMINATE


def decode_bit(values, rule: DecodeRule, settings: DecodeSettings = DEFAULT_SETTINGS):
    """Decode one bit window from its ordered samples.

    The leading settle_fraction of the samples is discarded; the rest
    vote through the rule. Returns (decoded, residence) with decoded
    in {1, 0, INDETERMINATE}.
    """
    values = np.asarray(values, dtype=float)
    if values.ndim != 1:
        raise ConfigError("decode_bit expects a 1-d sample array")
    start = round(len(values) * settings.settle_fraction)
    kept = values[start:]
    if len(kept) == 0:
        raise EmptySegmentError("no samples left after settle trimming")
    residence = float(np.mean(rule.holds(kept)))
    return decide(residence, settings.agreement_threshold), residence


@dataclass
class BitOutcome:
    """Scored result of one program bit."""

    bit_index: int
    inputs: tuple
    expected: int | None
    decoded: int | None
    residence: float
    match: bool
    forbidden: bool = False

    def to_dict(self) -> dict:
        return {
            "bit_index": self.bit_index,
            "inputs": list(self.inputs),
            "expected": self.expected,
            "decoded": self.decoded,
            "residence": self.residence,
            "match": self.match,
            "forbidden": self.forbidden,
        }


@dataclass
class TrialOutcome:
    """Scored result of one full program run through one gate."""

    gate: str
    success: bool
    bits: list = field(default_factory=list)
    diverged: bool = False

    def to_dict(self) -> dict:
        return {
            "gate": self.gate,
            "success": self.success,
            "diverged": self.diverged,
            "n_bits": len(self.bits),
            "bits": [b.to_dict() for b in self.bits],
        }


def expected_outputs(kind: str, bit_tuples, first_decoded=None) -> list:
    """Oracle outputs for a whole program.

    Latch kinds thread state across bits. The chain is anchored at the
    gate's own first decoded output (first_decoded), since an absolute
    initial latch state is not observable from outside; a leading hold
    bit therefore matches whatever the circuit settled to, unless the
    first bit fails to decode at all.

    Forbidden (1,1) latch inputs yield expected = None at that position
    and reset the thread anchor to the next decodable bit.
    """
    kind = kind.upper()
    if kind not in LATCH_KINDS:
        return [oracle(kind, b) for b in bit_tuples]
    out = []
    prev = None
    for idx, bits in enumerate(bit_tuples):
        try:
            if prev is None and tuple(bits) == (0, 0):
                anchor = first_decoded if idx == 0 else None
                out.append(anchor)
                prev = anchor
                continue
            val = oracle(kind, bits, prev)
        except ForbiddenInputError:
            out.append(None)
            prev = None
            continue
        out.append(val)
        prev = val
    return out


def score_residences(
    gate: GateSpec,
    bit_tuples,
    residences,
    settings: DecodeSettings = DEFAULT_SETTINGS,
) -> TrialOutcome:
    """Score one trial from per-bit residence fractions.

    residences is the per-bit residence of gate.rule on the decode
    variable, in program order. Success requires every bit to decode
    determinately to the oracle output and no forbidden input.
    """
    residences = np.asarray(residences, dtype=float)
    if len(residences) != len(bit_tuples):
        raise ConfigError("one residence per bit required")
    decoded = [
        decide(r, settings.agreement_threshold) for r in residences
    ]
    first = decoded[0] if decoded else None
    expected = expected_outputs(gate.kind, bit_tuples, first_decoded=first)
    outcome = TrialOutcome(gate=gate.kind, success=True)
    for idx, bits in enumerate(bit_tuples):
        forbidden = (
            gate.kind in LATCH_KINDS and tuple(bits) == (1, 1)
        )
        match = (
            not forbidden
            and decoded[idx] is not INDETERMINATE
            and expected[idx] is not None
            and decoded[idx] == expected[idx]
        )
        outcome.bits.append(
            BitOutcome(
                bit_index=idx,
                inputs=tuple(int(b) for b in bits),
                expected=expected[idx],
                decoded=decoded[idx],
                residence=float(residences[idx]),
                match=match,
                forbidden=forbidden,
            )
        )
        if not match:
            outcome.success = False
    return outcome


def score_trial(
    traj,
    program,
    gate: GateSpec,
    settings: DecodeSettings = DEFAULT_SETTINGS,
) -> TrialOutcome:
    """Score a sampled trajectory against a gate's oracle.

    The trajectory must cover the whole program and be sampled with
    stride 1 so bit windows can be cut on the step grid exactly.
    """
    if program.n_channels != gate.n_inputs:
        raise ArityMismatchError(
            f"{gate.kind} expects {gate.n_inputs} channels, "
            f"got {program.n_channels}"
        )
    if traj.stride != 1:
        raise ConfigError("score_trial needs a stride-1 trajectory")
    dt = traj.dt
    ts = round(program.transient / dt)
    spb = round(program.bit_duration / dt)
    if abs(ts * dt - program.transient) > 1e-9 or (
        abs(spb * dt - program.bit_duration) > 1e-9
    ):
        raise ConfigError("program timing must sit on the step grid")
    j = np.rint(traj.t / dt).astype(np.int64)
    values = traj.x1 if gate.decode_var == "x1" else traj.x2
    settle_steps = round(spb * settings.settle_fraction)
    residences = []
    for k in range(program.n_bits):
        lo = ts + k * spb + 1 + settle_steps
        hi = ts + (k + 1) * spb
        mask = (j >= lo) & (j <= hi)
        seg = values[mask]
        if len(seg) == 0:
            raise EmptySegmentError(f"bit {k} has no samples in trajectory")
        residences.append(float(np.mean(gate.rule.holds(seg))))
    return score_residences(gate, program.bit_tuples(), residences, settings)
