"""Deterministic single-sample broadcast protocols and their transcript structure.

A protocol runs ``rounds`` rounds of ``m`` slots; slot ``j`` (1-based) belongs
to node ``((j - 1) mod m) + 1``. Each slot has a fixed alphabet and an
encoder table keyed by the speaker's bit and the transcript so far. Running
the protocol on all ``2^m`` inputs groups them by final transcript; for a
zero-error protocol each group is a monochromatic rectangle.
"""

from __future__ import annotations

import itertools
import json
import math
from dataclasses import dataclass, field
from typing import Callable, Hashable

from .exceptions import InputError, ResourceLimitError, StructuralViolationError
from .symfunc import (
    Rectangle,
    SymmetricFunction,
    decompose_intervals,
    locate_interval,
    project_rectangle,
)

MAX_M = 20
MAX_TABLE_ENTRIES = 10**6


def transcript_key(transcript) -> str:
    return "-".join(str(sym) for sym in transcript)


def parse_transcript(key: str) -> tuple:
    return tuple(int(tok) for tok in key.split("-")) if key else ()


@dataclass(frozen=True)
class Slot:
    alphabet: int
    table: dict = field(default_factory=dict)  # (bit, prior transcript) -> symbol

    def __post_init__(self):
        if self.alphabet < 1:
            raise InputError(f"slot alphabet must have at least one symbol, got {self.alphabet}")

    @property
    def is_null(self) -> bool:
        return self.alphabet == 1

    def emit(self, bit: int, prior: tuple) -> int:
        if self.is_null and (bit, prior) not in self.table:
            return 0
        try:
            sym = self.table[(bit, prior)]
        except KeyError:
            raise InputError(
                f"encoder table has no entry for bit={bit}, transcript={transcript_key(prior)!r}"
            ) from None
        if not 0 <= sym < self.alphabet:
            raise InputError(f"symbol {sym} outside alphabet of size {self.alphabet}")
        return sym


@dataclass(frozen=True)
class ProtocolSpec:
    m: int
    rounds: int
    slots: tuple
    decoder: dict  # transcript tuple -> label

    def __post_init__(self):
        if self.m < 1 or self.rounds < 1:
            raise InputError("m and rounds must be positive")
        object.__setattr__(self, "slots", tuple(self.slots))
        if len(self.slots) != self.m * self.rounds:
            raise InputError(f"expected m*rounds={self.m * self.rounds} slots, got {len(self.slots)}")
        entries = sum(len(s.table) for s in self.slots) + len(self.decoder)
        if entries > MAX_TABLE_ENTRIES:
            raise ResourceLimitError(f"protocol tables hold {entries} entries (cap {MAX_TABLE_ENTRIES})")

    def speaker(self, j: int) -> int:
        """Node (1-based) that speaks in slot ``j`` (1-based)."""
        return (j - 1) % self.m + 1

    def transcript(self, x) -> tuple:
        out: tuple = ()
        for j, slot in enumerate(self.slots, start=1):
            out = out + (slot.emit(x[self.speaker(j) - 1], out),)
        return out

    @classmethod
    def from_dict(cls, data: dict) -> "ProtocolSpec":
        try:
            m, rounds = int(data["m"]), int(data["rounds"])
            slots = []
            for raw in data["slots"]:
                table = {}
                for key, sym in raw.get("table", {}).items():
                    bit, _, prior = key.partition("|")
                    if bit not in ("0", "1"):
                        raise InputError(f"bad encoder key {key!r}")
                    table[(int(bit), parse_transcript(prior))] = int(sym)
                slots.append(Slot(int(raw["alphabet"]), table))
            decoder = {parse_transcript(k): v for k, v in data.get("decoder", {}).items()}
        except (KeyError, TypeError, ValueError) as exc:
            if isinstance(exc, InputError):
                raise
            raise InputError(f"malformed protocol spec: {exc}") from None
        return cls(m, rounds, tuple(slots), decoder)

    @classmethod
    def from_json(cls, text: str) -> "ProtocolSpec":
        return cls.from_dict(json.loads(text))

    def to_dict(self) -> dict:
        slots = []
        for slot in self.slots:
            table = {f"{bit}|{transcript_key(prior)}": sym
                     for (bit, prior), sym in sorted(slot.table.items())}
            slots.append({"alphabet": slot.alphabet, "table": table})
        decoder = {transcript_key(t): lab for t, lab in sorted(self.decoder.items())}
        return {"m": self.m, "rounds": self.rounds, "slots": slots, "decoder": decoder}


def tabulate(m: int, rounds: int, alphabets, encoder: Callable, decoder: Callable) -> ProtocolSpec:
    """Build explicit tables from callables by walking every input.

    ``encoder(j, bit, prior)`` gives slot ``j``'s symbol and
    ``decoder(transcript)`` the sink's output. Only reachable entries are kept.
    """
    if m > MAX_M:
        raise ResourceLimitError(f"m={m} exceeds enumeration cap {MAX_M}")
    alphabets = list(alphabets)
    tables = [dict() for _ in alphabets]
    dec = {}
    for x in itertools.product((0, 1), repeat=m):
        out: tuple = ()
        for j in range(1, len(alphabets) + 1):
            bit = x[(j - 1) % m]
            sym = encoder(j, bit, out)
            tables[j - 1][(bit, out)] = sym
            out = out + (sym,)
        dec[out] = decoder(out)
    slots = tuple(Slot(a, t) for a, t in zip(alphabets, tables))
    return ProtocolSpec(m, rounds, slots, dec)


def full_download(f: SymmetricFunction) -> ProtocolSpec:
    """Every node broadcasts its bit once; the sink evaluates ``f`` exactly."""
    return tabulate(f.m, 1, [2] * f.m, lambda j, bit, prior: bit, lambda t: f(t))


def all_null(m: int, label: Hashable = 0) -> ProtocolSpec:
    """Nobody says anything; the sink always outputs ``label``."""
    return tabulate(m, 1, [1] * m, lambda j, bit, prior: 0, lambda t: label)


def sequential_max(m: int) -> ProtocolSpec:
    """Nodes send their bit until a 1 has been heard, then send a constant 0."""
    def enc(j, bit, prior):
        return 0 if 1 in prior else bit
    return tabulate(m, 1, [2] * m, enc, lambda t: int(1 in t))


def sequential_min(m: int) -> ProtocolSpec:
    """Mirror of :func:`sequential_max`: silence (constant 1) after the first 0."""
    def enc(j, bit, prior):
        return 1 if 0 in prior else bit
    return tabulate(m, 1, [2] * m, enc, lambda t: int(0 not in t))


def run_protocol(ps: ProtocolSpec) -> dict:
    """Map each realised transcript to its sorted list of inputs.

    Keys are in lexicographic transcript order.
    """
    if ps.m > MAX_M:
        raise ResourceLimitError(f"m={ps.m} exceeds enumeration cap {MAX_M}")
    groups: dict = {}
    for x in itertools.product((0, 1), repeat=ps.m):
        groups.setdefault(ps.transcript(x), []).append(x)
    return {t: groups[t] for t in sorted(groups)}


def verify_zero_error(ps: ProtocolSpec, f: SymmetricFunction) -> bool:
    if ps.m != f.m:
        raise InputError(f"protocol has m={ps.m} but function has m={f.m}")
    for t, inputs in run_protocol(ps).items():
        if t not in ps.decoder:
            return False
        out = ps.decoder[t]
        if any(f(x) != out for x in inputs):
            return False
    return True


def worst_case_rate(ps: ProtocolSpec) -> float:
    """Bits per sample with fixed per-slot alphabets: ``sum_j log2 |M_j|``."""
    return math.fsum(math.log2(s.alphabet) for s in ps.slots)


@dataclass(frozen=True)
class TranscriptAnalysis:
    transcript: tuple
    preimage: tuple
    is_rectangle: bool
    is_monochromatic: bool
    alpha: int
    beta: int
    interval: int
    forced_ones: tuple
    forced_zeros: tuple
    rate: float
    label: Hashable = None

    def to_dict(self) -> dict:
        return {
            "transcript": transcript_key(self.transcript),
            "preimage": ["".join(map(str, x)) for x in self.preimage],
            "is_rectangle": self.is_rectangle,
            "is_monochromatic": self.is_monochromatic,
            "alpha": self.alpha,
            "beta": self.beta,
            "interval": self.interval,
            "forced_ones": list(self.forced_ones),
            "forced_zeros": list(self.forced_zeros),
            "rate": self.rate,
            "label": self.label,
        }


def analyze_lemma3(ps: ProtocolSpec, f: SymmetricFunction) -> list[TranscriptAnalysis]:
    """Check the forced-knowledge structure of every transcript.

    For a zero-error protocol each preimage must be a rectangle whose sum
    range sits inside one maximal interval ``[a_v, b_v]``, with at least
    ``a_v`` nodes pinned to 1 and ``m - b_v`` pinned to 0.
    """
    if not verify_zero_error(ps, f):
        raise InputError("protocol does not compute the function with zero error")
    d = decompose_intervals(f)
    rate = worst_case_rate(ps)
    out = []
    for t, inputs in run_protocol(ps).items():
        rect = Rectangle.from_points(inputs)
        if rect is None:
            raise StructuralViolationError(
                f"preimage of transcript {transcript_key(t)!r} is not a rectangle", t
            )
        labels = {f(x) for x in inputs}
        if len(labels) != 1:
            raise StructuralViolationError(
                f"preimage of transcript {transcript_key(t)!r} is not monochromatic", t
            )
        alpha, beta = project_rectangle(rect)
        owners = [v for v, iv in enumerate(d, start=1) if iv.a <= alpha and beta <= iv.b]
        if len(owners) != 1 or locate_interval(d, alpha) != owners[0]:
            raise StructuralViolationError(
                f"sum range [{alpha}, {beta}] of transcript {transcript_key(t)!r} "
                f"is not inside exactly one maximal interval", t
            )
        v = owners[0]
        iv = d[v]
        ones, zeros = sorted(rect.forced_ones), sorted(rect.forced_zeros)
        if len(ones) < iv.a or len(zeros) < f.m - iv.b or set(ones) & set(zeros):
            raise StructuralViolationError(
                f"transcript {transcript_key(t)!r} pins {len(ones)} ones and {len(zeros)} zeros, "
                f"interval [{iv.a}, {iv.b}] needs {iv.a} and {f.m - iv.b}", t
            )
        out.append(
            TranscriptAnalysis(
                transcript=t,
                preimage=tuple(inputs),
                is_rectangle=True,
                is_monochromatic=True,
                alpha=alpha,
                beta=beta,
                interval=v,
                forced_ones=tuple(ones),
                forced_zeros=tuple(zeros),
                rate=rate,
                label=labels.pop(),
            )
        )
    return out
