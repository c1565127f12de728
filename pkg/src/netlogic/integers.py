"""The integer system Z(p, β): values, the one-hot codec, and arithmetic compilers.

Encoded layout: one sign bit (1 means '+') followed by p one-hot blocks of β
bits, most significant digit first.
"""

from __future__ import annotations

import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .builder import Builder, Compiled
from .digits import (
    Digit,
    Num,
    compare_unsigned,
    force_num,
    is_zero,
    mul_unsigned,
    signed_add,
)
from .formula import Bot, Formula, Top, conj, disj, evaluate, neg, xor
from .program import Bits, BnlProgram, as_bits, bits_text


@dataclass(frozen=True)
class IntegerValue:
    sign: str
    digits: tuple[int, ...]
    beta: int

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(self.digits))
        if self.sign not in "+-" or len(self.sign) != 1:
            raise ValueError(f"sign must be '+' or '-', got {self.sign!r}")
        if self.beta < 2 or not self.digits:
            raise ValueError("need β ≥ 2 and at least one digit")
        if any(not 0 <= d < self.beta for d in self.digits):
            raise ValueError(f"digit out of range for base {self.beta}")

    @property
    def p(self) -> int:
        return len(self.digits)

    @property
    def value(self) -> int:
        magnitude = 0
        for d in self.digits:
            magnitude = magnitude * self.beta + d
        return magnitude if self.sign == "+" else -magnitude

    @classmethod
    def from_int(cls, value: int, p: int, beta: int) -> IntegerValue:
        magnitude = abs(value)
        if magnitude >= beta**p:
            raise ValueError(f"{value} does not fit in Z({p},{beta})")
        digits = []
        for _ in range(p):
            digits.append(magnitude % beta)
            magnitude //= beta
        return cls("+" if value >= 0 else "-", tuple(reversed(digits)), beta)

    def __str__(self) -> str:
        return self.sign + "".join(_digit_char(d) for d in self.digits)


def _digit_char(d: int) -> str:
    return "0123456789abcdefghijklmnopqrstuvwxyz"[d] if d < 36 else f"[{d}]"


def encode_onehot(digit: int, beta: int) -> list[int]:
    return [1 if d == digit else 0 for d in range(beta)]


def decode_onehot(block: Sequence[int]) -> int:
    if sum(block) != 1:
        raise ValueError(f"block {bits_text(block)} is not one-hot")
    return list(block).index(1)


@dataclass(frozen=True)
class IntCodec:
    p: int
    beta: int

    def __post_init__(self):
        if self.p < 1 or self.beta < 2:
            raise ValueError("need p ≥ 1 and β ≥ 2")

    @property
    def length(self) -> int:
        return 1 + self.p * self.beta

    def encode(self, value: IntegerValue | int) -> str:
        if isinstance(value, int):
            value = IntegerValue.from_int(value, self.p, self.beta)
        if value.p != self.p or value.beta != self.beta:
            raise ValueError("value belongs to a different system")
        sign = "+" if value.value == 0 else value.sign
        bits = [1 if sign == "+" else 0]
        for d in value.digits:
            bits += encode_onehot(d, self.beta)
        return bits_text(bits)

    def decode(self, bits: Bits) -> IntegerValue:
        bits = as_bits(bits)
        if len(bits) != self.length:
            raise ValueError(f"expected {self.length} bits, got {len(bits)}")
        digits = [decode_onehot(bits[1 + i * self.beta : 1 + (i + 1) * self.beta]) for i in range(self.p)]
        sign = "+" if bits[0] else "-"
        if not any(digits):
            sign = "+"
        return IntegerValue(sign, tuple(digits), self.beta)

    def random(self, rng: random.Random) -> IntegerValue:
        return IntegerValue(rng.choice("+-"), tuple(rng.randrange(self.beta) for _ in range(self.p)), self.beta)

    def all_values(self) -> list[IntegerValue]:
        out = []
        for sign in "+-":
            for n in range(self.beta**self.p):
                out.append(IntegerValue(sign, IntegerValue.from_int(n, self.p, self.beta).digits, self.beta))
        return out


def declare_operand(b: Builder, stem: str, p: int, beta: int) -> tuple[Formula, Num]:
    """Declare input predicates ``stem_s`` and ``stem_i_d`` (i=1 most significant) in codec order."""
    sign = b.input(f"{stem}_s")
    msb: list[Digit] = []
    for i in range(1, p + 1):
        msb.append(tuple(b.input(f"{stem}_{i}_{d}") for d in range(beta)))
    return sign, list(reversed(msb))


def emit_result(b: Builder, stem: str, sign: Formula, digits: Num) -> list[str]:
    printed = [b.define(f"{stem}_s", sign, force=True).name]
    for row in force_num(b, stem, digits):
        printed.extend(row)
    return printed


INT_OPS = ("compare", "add", "mul")


def build_int_op(kind: str, p: int, beta: int) -> Compiled:
    """Compile an integer operation; registers expose intermediate values for inspection."""
    if kind not in INT_OPS:
        raise ValueError(f"unknown integer operation {kind!r}; expected one of {INT_OPS}")
    if p < 1 or beta < 2:
        raise ValueError("need p ≥ 1 and β ≥ 2")
    b = Builder()
    sx, x = declare_operand(b, "X", p, beta)
    sy, y = declare_operand(b, "Y", p, beta)
    registers: dict[str, object] = {}
    if kind == "compare":
        gt, lt = compare_unsigned(b, x, y, beta, "Z")
        both_zero = conj(is_zero(x), is_zero(y))
        greater = disj(
            conj(sx, sy, gt),
            conj(sx, neg(sy), neg(both_zero)),
            conj(neg(sx), neg(sy), lt),
        )
        digit = tuple([neg(greater), greater] + [Bot] * (beta - 2))
        printed = emit_result(b, "Z", Top, [digit])
    elif kind == "add":
        sign, digits, info = signed_add(b, sx, x, sy, y, beta, "A")
        registers["carries"] = info["carries"]
        printed = emit_result(b, "Z", sign, digits)
    else:
        product, partials = mul_unsigned(b, x, y, beta, "M")
        sign = disj(neg(xor(sx, sy)), is_zero(x), is_zero(y))
        registers.update(partials)
        printed = emit_result(b, "Z", sign, product)
    program, rounds = b.finish(printed)
    return Compiled(program, rounds, registers)


def compile_int_op(kind: str, p: int, beta: int) -> BnlProgram:
    return build_int_op(kind, p, beta).program


def int_output_codec(kind: str, p: int, beta: int) -> IntCodec:
    return IntCodec({"compare": 1, "add": p + 1, "mul": 2 * p}[kind], beta)


def int_oracle(kind: str, x: int, y: int) -> int:
    if kind == "compare":
        return int(x > y)
    if kind == "add":
        return x + y
    if kind == "mul":
        return x * y
    raise ValueError(kind)


def read_register(config: Mapping[str, int], register) -> object:
    """Evaluate a register (formula, list of formulas, or LSB-first digit list) on a configuration."""
    env = {k: bool(v) for k, v in config.items()}
    if isinstance(register, Formula):
        return int(evaluate(register, env))
    if register and isinstance(register[0], tuple):
        value = 0
        for digit in reversed(register):
            value = value * len(digit) + [evaluate(f, env) for f in digit].index(True)
        return value
    return [int(evaluate(f, env)) for f in register]


__all__ = [
    "INT_OPS",
    "IntCodec",
    "IntegerValue",
    "build_int_op",
    "compile_int_op",
    "declare_operand",
    "emit_result",
    "int_oracle",
    "int_output_codec",
    "read_register",
]
