"""Equivalence checking across program kinds, plus independent reference oracles."""

from __future__ import annotations

import itertools
import random
from collections.abc import Sequence
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Any

from .circuit import (
    Circuit,
    SelfFeedingCircuit,
    circuit_truth_table,
    formula_truth_table,
)
from .fpcompile import FloatCodec
from .integers import IntCodec, IntegerValue, int_oracle
from .nn import NeuralNetwork, simulate
from .program import BnlProgram, as_bits, batch_outputs, bits_text, run
from .sc import ScProgram, run_sc
from .softfloat import FloatSystem, round_rational
from .translate import bits_to_floats, floats_to_bits

# -- codecs -------------------------------------------------------------------


@dataclass(frozen=True)
class Codec:
    """How abstract inputs map to bits and printed bits map back to comparable values."""

    kind: str
    p: int = 0
    q: int = 0
    beta: int = 2

    @classmethod
    def parse(cls, text: str) -> Codec:
        try:
            if text == "id":
                return cls("id")
            name, _, params = text.partition(":")
            values = [int(v) for v in params.split(",")]
            if name == "int" and len(values) == 2:
                return cls("int", values[0], 0, values[1])
            if name == "float" and len(values) == 3:
                return cls("float", values[0], values[1], values[2])
        except ValueError:
            pass
        raise ValueError(f"bad codec {text!r}; expected id, int:P,B or float:P,Q,B")

    @property
    def system(self) -> FloatSystem:
        return FloatSystem(self.p, self.q, self.beta)

    @property
    def block(self) -> int:
        if self.kind == "int":
            return IntCodec(self.p, self.beta).length
        if self.kind == "float":
            return FloatCodec(self.system).length
        return 1

    def encode(self, item) -> str:
        if self.kind == "id":
            return bits_text(as_bits(item))
        if self.kind == "int":
            codec = IntCodec(self.p, self.beta)
            return "".join(codec.encode(v) for v in item)
        codec = FloatCodec(self.system)
        return "".join(codec.encode(v) for v in item)

    def decode(self, bits: str):
        """Comparable value of a printed bit string; undecodable strings compare as raw bits."""
        try:
            if self.kind == "int":
                if (len(bits) - 1) % self.beta == 0 and len(bits) > 1:
                    return IntCodec((len(bits) - 1) // self.beta, self.beta).decode(bits).value
                return bits
            if self.kind == "float":
                codec = FloatCodec(self.system)
                n = codec.length
                if len(bits) % n == 0:
                    return tuple(codec.decode(bits[i : i + n]) for i in range(0, len(bits), n))
                return bits
        except ValueError:
            return f"invalid:{bits}"
        return bits

    def show(self, value) -> str:
        if isinstance(value, tuple):
            return " ".join(str(v) for v in value)
        return str(value)


# -- runnables ------------------------------------------------------------------


def kind_of(obj) -> str:
    for kind, cls in (("bnl", BnlProgram), ("sc", ScProgram), ("circ", SelfFeedingCircuit), ("nn", NeuralNetwork)):
        if isinstance(obj, cls):
            return kind
    raise TypeError(f"cannot run objects of type {type(obj).__name__}")


def input_width(obj) -> int:
    """Number of input bits (bit-level kinds) or input values (networks)."""
    kind = kind_of(obj)
    if kind == "bnl":
        return len(obj.inputs)
    if kind == "sc":
        return len(obj.propositions)
    if kind == "circ":
        return len(obj.input_positions)
    return len(obj.inputs)


def operand_count(obj, codec: Codec) -> int:
    width = input_width(obj)
    if kind_of(obj) == "nn":
        return width
    if codec.kind == "id":
        return width
    if width % codec.block:
        raise ValueError(f"{width} input bits do not split into codec blocks of {codec.block}")
    return width // codec.block


Emission = tuple[int, Any]


def run_outputs(obj, items: Sequence, codec: Codec, horizon: int, limit: int) -> list[list[Emission]]:
    """First ``limit`` decoded emissions within ``horizon`` for every input item."""
    kind = kind_of(obj)
    if kind == "nn":
        results = []
        for item in items:
            if codec.kind == "id":
                values = bits_to_floats(as_bits(item), obj.system)
                decode = floats_to_bits
            elif codec.kind == "float":
                values = list(item)
                decode = tuple
            else:
                raise ValueError("networks take float or binary (id) inputs, not integers")
            _, outs = simulate(obj, values, horizon)
            results.append([(r, decode(v)) for r, v in outs[:limit]])
        return results
    encoded = [codec.encode(item) for item in items]
    if kind == "bnl":
        raw = batch_outputs(obj, encoded, horizon, limit)
    elif kind == "sc":
        raw = [run_sc(obj, bits, horizon)[1][:limit] for bits in encoded]
    else:
        from .circuit import run_self_feeding

        raw = [run_self_feeding(obj, bits, horizon)[1][:limit] for bits in encoded]
    return [[(r, codec.decode(b)) for r, b in outs[:limit]] for outs in raw]


def run_configs(obj, bits: str, horizon: int) -> list[tuple[int, ...]]:
    kind = kind_of(obj)
    if kind == "bnl":
        return run(obj, bits, horizon)[0]
    if kind == "sc":
        return run_sc(obj, bits, horizon)[0]
    if kind == "circ":
        from .circuit import run_self_feeding

        return run_self_feeding(obj, bits, horizon)[0]
    raise ValueError("global comparison needs bit-level configurations; networks have none")


# -- input suites -----------------------------------------------------------------


def enumerate_items(obj, codec: Codec, mode: str, count: int = 0, seed: int = 0, system: FloatSystem | None = None):
    """Inputs for the suite: every input (exhaustive) or ``count`` seeded random ones."""
    n = operand_count(obj, codec)
    rng = random.Random(seed)
    if codec.kind == "id":
        if mode == "exhaustive":
            if n > 20:
                raise ValueError(f"exhaustive binary suite over {n} inputs is too large")
            return ["".join(bits) for bits in itertools.product("01", repeat=n)]
        return ["".join(rng.choice("01") for _ in range(n)) for _ in range(count)]
    if codec.kind == "int":
        ic = IntCodec(codec.p, codec.beta)
        if mode == "exhaustive":
            return list(itertools.product(ic.all_values(), repeat=n))
        return [tuple(ic.random(rng) for _ in range(n)) for _ in range(count)]
    s = system or codec.system
    if mode == "exhaustive":
        return list(itertools.product(s.values(), repeat=n))
    return [tuple(s.random_value(rng) for _ in range(n)) for _ in range(count)]


def parse_inputs(text: str) -> tuple[str, int]:
    if text == "exhaustive":
        return "exhaustive", 0
    if text.startswith("random:"):
        return "random", int(text.split(":", 1)[1])
    raise ValueError(f"bad input suite {text!r}; expected exhaustive or random:N")


# -- equivalence ----------------------------------------------------------------------


@dataclass
class Counterexample:
    input: str
    index: int
    left: list
    right: list
    reason: str = "outputs differ"


@dataclass
class EquivalenceReport:
    verdict: str
    counterexample: Counterexample | None
    inputs_tested: int
    outputs_compared: int
    horizon: tuple[int, int]
    delay_ratio: float | None
    round_shift: int | None
    seed: int
    short_inputs: int = 0
    uneven_inputs: int = 0
    global_checked: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def equivalent(self) -> bool:
        return self.verdict == "equivalent-on-suite"

    def to_dict(self) -> dict:
        return asdict(self)

    def text(self) -> str:
        lines = [f"verdict: {self.verdict}"]
        lines.append(f"inputs tested: {self.inputs_tested}, outputs compared: {self.outputs_compared}")
        lines.append(f"horizons: {self.horizon[0]} / {self.horizon[1]}")
        if self.delay_ratio is not None:
            lines.append(f"delay ratio (right/left output rounds): {self.delay_ratio:g}")
        if self.round_shift is not None:
            lines.append(f"uniform round shift: {self.round_shift:+d}")
        if self.global_checked:
            lines.append("configurations compared round by round")
        if self.short_inputs:
            lines.append(f"warning: {self.short_inputs} inputs produced fewer outputs than requested within the horizon")
        if self.uneven_inputs:
            lines.append(
                f"warning: on {self.uneven_inputs} inputs the two sides emitted different numbers of outputs;"
                " only the common prefix was compared"
            )
        for note in self.notes:
            lines.append(f"note: {note}")
        if self.counterexample:
            c = self.counterexample
            lines.append(f"counterexample: input {c.input}, output #{c.index}: {c.reason}")
            lines.append(f"  left:  {c.left}")
            lines.append(f"  right: {c.right}")
        return "\n".join(lines)


def _describe(item, codec: Codec) -> str:
    if isinstance(item, tuple):
        return ",".join(str(v) for v in item)
    return str(item)


def _run_until(obj, items, codec, horizon: int | None, m: int) -> tuple[list[list[Emission]], int]:
    """Run with the given horizon, or grow one from 10·m until every input yields m outputs."""
    if horizon is not None:
        return run_outputs(obj, items, codec, horizon, m), horizon
    h = 10 * max(m, 1)
    cap = h * 256
    while True:
        outs = run_outputs(obj, items, codec, h, m)
        if all(len(o) >= m for o in outs) or h >= cap:
            return outs, h
        h *= 4


def check_equivalence(
    left,
    right,
    codec: Codec | str = "id",
    inputs: str = "exhaustive",
    outputs: int = 10,
    horizon: int | tuple[int, int] | None = None,
    seed: int = 0,
    global_mode: bool = False,
    global_shift: int | None = None,
) -> EquivalenceReport:
    """Compare the first ``outputs`` decoded emissions of both sides on every suite input.

    In global mode the configurations are also compared round by round on their
    shared leading positions, with the right side shifted by ``global_shift``
    (default: the measured uniform output-round shift). ``horizon`` may be a
    (left, right) pair when the two sides run on different clocks.
    """
    if isinstance(codec, str):
        codec = Codec.parse(codec)
    mode, count = parse_inputs(inputs)
    n_left, n_right = operand_count(left, codec), operand_count(right, codec)
    if n_left != n_right:
        raise ValueError(f"arity mismatch: {n_left} vs {n_right} inputs under codec {codec.kind}")
    system = left.system if isinstance(left, NeuralNetwork) else right.system if isinstance(right, NeuralNetwork) else None
    items = enumerate_items(left, codec, mode, count, seed, system if codec.kind == "float" else None)
    h_pair = horizon if isinstance(horizon, tuple) else (horizon, horizon)
    outs_left, h_left = _run_until(left, items, codec, h_pair[0], outputs)
    outs_right, h_right = _run_until(right, items, codec, h_pair[1], outputs)
    ratios: list[Fraction] = []
    shifts: set[int] = set()
    compared = 0
    short = 0
    uneven = 0
    counterexample = None
    for item, a, b in zip(items, outs_left, outs_right):
        if len(a) < outputs or len(b) < outputs:
            short += 1
        k = min(len(a), len(b))
        for i in range(k):
            (ra, va), (rb, vb) = a[i], b[i]
            if va != vb:
                counterexample = Counterexample(
                    _describe(item, codec), i, [codec.show(v) for _, v in a], [codec.show(v) for _, v in b]
                )
                break
            compared += 1
            shifts.add(rb - ra)
            if ra > 0:
                ratios.append(Fraction(rb, ra))
        if counterexample:
            break
        if len(a) != len(b) and (len(a) < outputs or len(b) < outputs):
            uneven += 1
    shift = shifts.pop() if len(shifts) == 1 else None
    ratio = float(max(ratios)) if ratios else (1.0 if compared else None)
    global_checked = False
    notes = []
    if global_mode and counterexample is None:
        global_checked = True
        offset = global_shift if global_shift is not None else shift if shift is not None and shift >= 0 else 0
        span = h_pair[0] if h_pair[0] is not None else 32
        for item in items:
            bits = codec.encode(item)
            ca = run_configs(left, bits, span)
            cb = run_configs(right, bits, span + offset)
            width = min(len(ca[0]), len(cb[0]))
            for n in range(span + 1):
                if ca[n][:width] != cb[n + offset][:width]:
                    counterexample = Counterexample(
                        _describe(item, codec),
                        n,
                        [bits_text(ca[n])],
                        [bits_text(cb[n + offset])],
                        f"configurations differ at round {n} (right side shifted by {offset})",
                    )
                    break
            if counterexample:
                break
        notes.append(f"global comparison over the first {width if items else 0} configuration positions")
    verdict = "counterexample" if counterexample else "equivalent-on-suite"
    return EquivalenceReport(
        verdict,
        counterexample,
        len(items),
        compared,
        (h_left, h_right),
        ratio,
        shift,
        seed,
        short,
        uneven,
        global_checked,
        notes,
    )


# -- oracles --------------------------------------------------------------------------


ORACLE_LIMITS = {"truth-table": 12, "parity": 4096}


def oracle(kind: str, *args):
    """Independent reference results.

    int-op: (op, x, y) exact integers. rational-fp: (op, a, b) exact rational
    result rounded once. parity: (bits,). truth-table: (formula, names) or (circuit,).
    """
    if kind == "int-op":
        op, x, y = args
        x = x.value if isinstance(x, IntegerValue) else x
        y = y.value if isinstance(y, IntegerValue) else y
        return int_oracle(op, x, y)
    if kind == "rational-fp":
        op, a, b = args
        exact = {"add": a.value + b.value, "mul": a.value * b.value}.get(op)
        if op == "compare":
            return (a.value > b.value) - (a.value < b.value)
        if exact is None:
            raise ValueError(f"unknown floating-point operation {op!r}")
        return round_rational(exact, a.system)
    if kind == "parity":
        (bits,) = args
        bits = as_bits(bits)
        if len(bits) > ORACLE_LIMITS["parity"]:
            raise ValueError("parity oracle limited to 4096 bits")
        return sum(bits) % 2
    if kind == "truth-table":
        if isinstance(args[0], Circuit):
            if len(args[0].input_order) > ORACLE_LIMITS["truth-table"]:
                raise ValueError("truth tables limited to 12 inputs")
            return circuit_truth_table(args[0])
        formula, names = args
        if len(names) > ORACLE_LIMITS["truth-table"]:
            raise ValueError("truth tables limited to 12 variables")
        return formula_truth_table(formula, names)
    raise ValueError(f"unknown oracle {kind!r}")


__all__ = [
    "Codec",
    "Counterexample",
    "EquivalenceReport",
    "check_equivalence",
    "enumerate_items",
    "input_width",
    "kind_of",
    "oracle",
    "run_outputs",
]
