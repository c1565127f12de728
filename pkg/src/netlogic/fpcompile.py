"""One-hot float codec and compilers from floating-point operations to halting BNL programs.

Encoded layout: exponent sign, fraction sign (1 means '+'), the exponent's
one-hot blocks and then the fraction's, most significant first. Raw values
carry an extra leading fraction block d_0.
"""

from __future__ import annotations

from collections.abc import Sequence
from dataclasses import dataclass

from .builder import Builder, Compiled
from .digits import (
    Digit,
    Num,
    compare_unsigned,
    const_digit,
    const_num,
    define_digit,
    define_num,
    force_num,
    is_zero,
    lex_compare_const,
    mul_unsigned,
    onehot_to_num,
    pad,
    select_digit,
    signed_add,
    value_digits,
)
from .formula import Bot, Formula, Top, conj, disj, ite, neg, xor
from .integers import decode_onehot, encode_onehot
from .program import Bits, BnlProgram, as_bits, bits_text
from .softfloat import (
    FloatSystem,
    FloatValue,
    PiecewisePolynomial,
    RawFloatValue,
    _from_digits,
    _half_tail,
    add_width,
    polynomial_terms,
    power_plan,
    sum_terms,
)


@dataclass(frozen=True)
class FloatCodec:
    system: FloatSystem
    raw_widths: tuple[int, int] | None = None

    @property
    def widths(self) -> tuple[int, int]:
        """(fraction blocks, exponent blocks), counting d_0 for raw values."""
        if self.raw_widths is None:
            return self.system.p, self.system.q
        p_raw, q_raw = self.raw_widths
        return p_raw + 1, q_raw

    @property
    def length(self) -> int:
        frac, exp = self.widths
        return 2 + self.system.beta * (frac + exp)

    def encode(self, value: FloatValue | RawFloatValue) -> str:
        beta = self.system.beta
        frac_blocks, exp_blocks = self.widths
        if self.raw_widths is None:
            if not isinstance(value, FloatValue) or value.system != self.system:
                raise ValueError(f"expected a normalized value of {self.system}")
            fraction = value.digits
        else:
            if not isinstance(value, RawFloatValue) or value.beta != beta:
                raise ValueError("expected a raw value in the same base")
            if len(value.digits) != frac_blocks - 1:
                raise ValueError(f"raw value needs {frac_blocks - 1} fraction digits")
            fraction = (value.lead, *value.digits)
        if abs(value.exponent) >= beta**exp_blocks:
            raise ValueError("exponent does not fit")
        exp_digits = value_digits(abs(value.exponent), exp_blocks, beta)[::-1]
        exp_sign = value.exp_sign if isinstance(value, FloatValue) else ("-" if value.exponent < 0 else "+")
        bits = [int(exp_sign == "+"), int(value.sign == "+")]
        for d in exp_digits + list(fraction):
            bits += encode_onehot(d, beta)
        return bits_text(bits)

    def decode(self, bits: Bits) -> FloatValue | RawFloatValue:
        bits = as_bits(bits)
        if len(bits) != self.length:
            raise ValueError(f"expected {self.length} bits, got {len(bits)}")
        beta = self.system.beta
        frac_blocks, exp_blocks = self.widths
        blocks = [decode_onehot(bits[2 + i * beta : 2 + (i + 1) * beta]) for i in range(frac_blocks + exp_blocks)]
        magnitude = _from_digits(blocks[:exp_blocks], beta)
        exponent = magnitude if bits[0] else -magnitude
        sign = "+" if bits[1] else "-"
        fraction = tuple(blocks[exp_blocks:])
        if self.raw_widths is None:
            return FloatValue(self.system, sign, fraction, exponent)
        return RawFloatValue(sign, fraction[0], fraction[1:], exponent, beta)


@dataclass
class FloatNum:
    """A float held in formulas: signs (true means '+'), exponent LSB first, fraction MSB first."""

    exp_sign: Formula
    frac_sign: Formula
    exp: Num
    frac: list[Digit]


def const_float(value: FloatValue) -> FloatNum:
    s = value.system
    return FloatNum(
        Top if value.exp_sign == "+" else Bot,
        Top if value.sign == "+" else Bot,
        const_num(abs(value.exponent), s.q, s.beta),
        [const_digit(d, s.beta) for d in value.digits],
    )


def declare_float(b: Builder, stem: str, frac_blocks: int, exp_blocks: int, beta: int, first: int = 1) -> FloatNum:
    """Input predicates in codec order; fraction blocks are numbered from ``first`` (0 for raw d_0)."""
    exp_sign = b.input(f"{stem}_Se")
    frac_sign = b.input(f"{stem}_Sf")
    exp_msb = [tuple(b.input(f"{stem}_E_{i}_{d}") for d in range(beta)) for i in range(1, exp_blocks + 1)]
    frac = [tuple(b.input(f"{stem}_F_{i}_{d}") for d in range(beta)) for i in range(first, first + frac_blocks)]
    return FloatNum(exp_sign, frac_sign, exp_msb[::-1], frac)


def define_float(b: Builder, stem: str, x: FloatNum) -> FloatNum:
    return FloatNum(
        b.define(f"{stem}_Se", x.exp_sign),
        b.define(f"{stem}_Sf", x.frac_sign),
        define_num(b, f"{stem}_E", x.exp),
        [define_digit(b, f"{stem}_F_{i + 1}", d) for i, d in enumerate(x.frac)],
    )


def select_float(cond: Formula, then: FloatNum, other: FloatNum) -> FloatNum:
    return FloatNum(
        ite(cond, then.exp_sign, other.exp_sign),
        ite(cond, then.frac_sign, other.frac_sign),
        [select_digit(cond, a, c) for a, c in zip(then.exp, other.exp)],
        [select_digit(cond, a, c) for a, c in zip(then.frac, other.frac)],
    )


def emit_float(b: Builder, stem: str, x: FloatNum) -> list[str]:
    printed = [b.define(f"{stem}_Se", x.exp_sign, force=True).name, b.define(f"{stem}_Sf", x.frac_sign, force=True).name]
    for row in force_num(b, f"{stem}_E", x.exp):
        printed.extend(row)
    for i, digit in enumerate(x.frac):
        printed.extend(b.define(f"{stem}_F_{i + 1}_{d}", f, force=True).name for d, f in enumerate(digit))
    return printed


def _width_for(bound: int, beta: int) -> int:
    width = 1
    while beta**width <= bound:
        width += 1
    return width


def normalize_block(
    b: Builder, sign: Formula, mantissa: Sequence[Digit], exp_sign: Formula, exp: Num, system: FloatSystem, stem: str
) -> FloatNum:
    """Normalize ±0.M × β^(e+1) where M lists digits most significant first. Five levels."""
    beta, p, q = system.beta, system.p, system.q
    m = list(mantissa)
    n = len(m)
    zero = is_zero(m)
    lz = [b.define(f"{stem}_lz{k}", conj([m[i][0] for i in range(k)] + [neg(m[k][0])])) for k in range(n)]

    def shifted_digit(i: int) -> Digit:
        parts = []
        for d in range(beta):
            terms = [conj(lz[k], m[i + k][d]) for k in range(n - i)]
            if d == 0:
                terms += [lz[k] for k in range(n - i, n)]
            parts.append(disj(terms))
        return tuple(parts)

    shifted = [define_digit(b, f"{stem}_sh{i}", shifted_digit(i)) for i in range(n)]
    kept = shifted[:p] + [const_digit(0, beta)] * (p - len(shifted[:p]))
    tail = shifted[p:]
    if tail:
        greater, equal = lex_compare_const(tail, _half_tail(beta, len(tail)))
        odd_last = disj(kept[-1][d] for d in range(1, beta, 2))
        tie_up = conj(equal, odd_last) if beta % 2 == 0 else Bot
        up = b.define(f"{stem}_up", disj(greater, tie_up))
    else:
        up = Bot
    all_max = [conj(kept[j][beta - 1] for j in range(i + 1, p)) for i in range(p)]
    overflow = b.define(f"{stem}_ovf", conj(up, all_max[0], kept[0][beta - 1]))
    one = [const_digit(1, beta)] + [const_digit(0, beta)] * (p - 1)
    rounded = []
    for i in range(p):
        bump = conj(up, all_max[i])
        incremented = tuple(kept[i][(d - 1) % beta] for d in range(beta))
        digit = select_digit(overflow, one[i], select_digit(bump, incremented, kept[i]))
        rounded.append(define_digit(b, f"{stem}_r{i + 1}", digit))

    width = _width_for(beta ** len(exp) + n + 2, beta)
    exp = pad(exp, width, beta)
    plus_flags = [(lz[k], abs(1 - k)) for k in range(n)]
    delta1 = onehot_to_num(plus_flags, width, beta)
    delta2 = onehot_to_num([(lz[k], abs(2 - k)) for k in range(n)], width, beta)
    sign1, e1, _ = signed_add(b, exp_sign, exp, disj(lz[:2]), delta1, beta, f"{stem}_ea")
    sign2, e2, _ = signed_add(b, exp_sign, exp, disj(lz[:3]), delta2, beta, f"{stem}_eb")
    e1 = define_num(b, f"{stem}_E1", e1)
    e2 = define_num(b, f"{stem}_E2", e2)
    sign1 = b.define(f"{stem}_E1s", sign1)
    sign2 = b.define(f"{stem}_E2s", sign2)
    e_final = [select_digit(overflow, a, c) for a, c in zip(e2, e1)]
    e_sign = ite(overflow, sign2, sign1)
    high = disj(neg(digit[0]) for digit in e_final[q:])
    big = conj(e_sign, high)
    tiny = conj(neg(e_sign), high)
    vanish = disj(zero, tiny)
    top = const_digit(beta - 1, beta)
    nought = const_digit(0, beta)
    frac = [select_digit(vanish, nought, select_digit(big, top, rounded[i])) for i in range(p)]
    exp_out = [select_digit(vanish, top, select_digit(big, top, e_final[j])) for j in range(q)]
    return FloatNum(
        conj(neg(vanish), disj(big, e_sign)),
        disj(vanish, sign),
        exp_out,
        frac,
    )


def add_block(b: Builder, x: FloatNum, y: FloatNum, system: FloatSystem, stem: str) -> FloatNum:
    """Exponent compare, early-out beyond p+2, alignment, signed digit add, normalize."""
    beta, p = system.beta, system.p
    ds, dmag, _ = signed_add(b, x.exp_sign, x.exp, neg(y.exp_sign), y.exp, beta, f"{stem}_de")
    ds = b.define(f"{stem}_xl", ds)
    large = define_float(b, f"{stem}_L", select_float(ds, x, y))
    small = define_float(b, f"{stem}_S", select_float(ds, y, x))
    amounts = []
    for k in range(p + 3):
        if k < beta ** len(dmag):
            target = value_digits(k, len(dmag), beta)
            amounts.append(b.define(f"{stem}_amt{k}", conj(dmag[i][target[i]] for i in range(len(dmag)))))
        else:
            amounts.append(Bot)
    early = neg(disj(amounts))
    width = add_width(system)
    aligned = []
    for i in range(width):
        digit = []
        for d in range(beta):
            terms = [conj(amounts[k], small.frac[i - k][d]) for k in range(len(amounts)) if 0 <= i - k < p]
            if d == 0:
                terms += [amounts[k] for k in range(len(amounts)) if not 0 <= i - k < p]
            digit.append(disj(terms))
        aligned.append(define_digit(b, f"{stem}_al{i + 1}", tuple(digit)))
    zero = const_digit(0, beta)
    large_digits = list(large.frac) + [zero] * (width - p)
    sign, total, _ = signed_add(b, large.frac_sign, large_digits[::-1], small.frac_sign, aligned[::-1], beta, f"{stem}_f")
    total = define_num(b, f"{stem}_sum", total)
    sign = b.define(f"{stem}_sums", sign)
    result = normalize_block(b, sign, total[::-1], large.exp_sign, large.exp, system, f"{stem}_n")
    return select_float(early, large, result)


def mul_block(b: Builder, x: FloatNum, y: FloatNum, system: FloatSystem, stem: str) -> FloatNum:
    """Exponent add, 2p-digit fraction product read as 0.0m, normalize."""
    beta = system.beta
    es, e, _ = signed_add(b, x.exp_sign, x.exp, y.exp_sign, y.exp, beta, f"{stem}_e")
    e = define_num(b, f"{stem}_esum", e)
    es = b.define(f"{stem}_esums", es)
    product, _ = mul_unsigned(b, x.frac[::-1], y.frac[::-1], beta, f"{stem}_m")
    sign = neg(xor(x.frac_sign, y.frac_sign))
    mantissa = [const_digit(0, beta)] + product[::-1]
    return normalize_block(b, sign, mantissa, es, e, system, f"{stem}_n")


def less_block(b: Builder, x: FloatNum, y: FloatNum, beta: int, stem: str) -> Formula:
    """x < y on normalized operands. Two levels."""
    egt, elt = compare_unsigned(b, x.exp, y.exp, beta, f"{stem}_e")
    both_zero = conj(is_zero(x.exp), is_zero(y.exp))
    exp_gt = disj(conj(x.exp_sign, y.exp_sign, egt), conj(x.exp_sign, neg(y.exp_sign), neg(both_zero)), conj(neg(x.exp_sign), neg(y.exp_sign), elt))
    exp_lt = disj(conj(y.exp_sign, x.exp_sign, elt), conj(y.exp_sign, neg(x.exp_sign), neg(both_zero)), conj(neg(y.exp_sign), neg(x.exp_sign), egt))
    fgt, flt = compare_unsigned(b, x.frac[::-1], y.frac[::-1], beta, f"{stem}_f")
    exp_eq = conj(neg(exp_gt), neg(exp_lt))
    mag_gt = disj(exp_gt, conj(exp_eq, fgt))
    mag_lt = disj(exp_lt, conj(exp_eq, flt))
    return disj(
        conj(neg(x.frac_sign), y.frac_sign),
        conj(x.frac_sign, y.frac_sign, mag_lt),
        conj(neg(x.frac_sign), neg(y.frac_sign), mag_gt),
    )


def piecewise_block(b: Builder, x: FloatNum, pieces: PiecewisePolynomial, stem: str) -> tuple[FloatNum, list[Formula]]:
    """Select the piece containing x and evaluate its polynomial in the canonical operation order."""
    system = pieces.system
    beta = system.beta
    at_least = [Top]
    for i, t in enumerate(pieces.breakpoints):
        at_least.append(neg(less_block(b, x, const_float(t), beta, f"{stem}_t{i + 1}")))
    at_least.append(Bot)
    flags = [b.define(f"{stem}_piece{i}", conj(at_least[i], neg(at_least[i + 1])), force=True) for i in range(pieces.pieces)]

    memo: dict = {}
    counter = [0]

    def fresh() -> str:
        counter[0] += 1
        return f"{stem}_op{counter[0]}"

    def power(plan) -> FloatNum:
        if plan == "x":
            return x
        if plan not in memo:
            memo[plan] = mul_block(b, power(plan[0]), power(plan[1]), system, fresh())
        return memo[plan]

    results = []
    for coeffs in pieces.polynomials:
        terms = polynomial_terms(
            [const_float(c) for c in coeffs],
            lambda k: power(power_plan(k)),
            lambda c, v: mul_block(b, c, v, system, fresh()),
        )
        results.append(sum_terms(terms, lambda u, v: add_block(b, u, v, system, fresh())))

    def pick(field: str) -> Formula:
        return disj(conj(flag, getattr(r, field)) for flag, r in zip(flags, results))

    def pick_digits(getter) -> list[Digit]:
        rows = [getter(r) for r in results]
        return [
            tuple(disj(conj(flag, row[i][d]) for flag, row in zip(flags, rows)) for d in range(beta))
            for i in range(len(rows[0]))
        ]

    out = FloatNum(pick("exp_sign"), pick("frac_sign"), pick_digits(lambda r: r.exp), pick_digits(lambda r: r.frac))
    return out, flags


FP_OPS = ("normalize", "add", "mul", "piecewise")


def default_raw_widths(system: FloatSystem) -> tuple[int, int]:
    return 2 * system.p + 1, system.q + 1


def build_fp_op(
    kind: str,
    system: FloatSystem,
    pieces: PiecewisePolynomial | None = None,
    raw_widths: tuple[int, int] | None = None,
) -> Compiled:
    if kind not in FP_OPS:
        raise ValueError(f"unknown floating-point operation {kind!r}; expected one of {FP_OPS}")
    beta = system.beta
    b = Builder()
    registers: dict[str, object] = {}
    if kind == "normalize":
        p_raw, q_raw = raw_widths or default_raw_widths(system)
        if p_raw < 0 or q_raw < 1:
            raise ValueError("raw widths must be p' ≥ 0 and q' ≥ 1")
        raw = declare_float(b, "X", p_raw + 1, q_raw, beta, first=0)
        result = normalize_block(b, raw.frac_sign, raw.frac, raw.exp_sign, raw.exp, system, "N")
    elif kind in ("add", "mul"):
        x = declare_float(b, "X", system.p, system.q, beta)
        y = declare_float(b, "Y", system.p, system.q, beta)
        block = add_block if kind == "add" else mul_block
        result = block(b, x, y, system, kind.upper())
    else:
        if pieces is None:
            raise ValueError("piecewise compilation needs a piece table")
        if pieces.system != system:
            raise ValueError("piece table belongs to a different system")
        x = declare_float(b, "X", system.p, system.q, beta)
        result, flags = piecewise_block(b, x, pieces, "P")
        registers["pieces"] = flags
    program, rounds = b.finish(emit_float(b, "Z", result))
    return Compiled(program, rounds, registers)


def compile_fp_op(
    kind: str,
    system: FloatSystem,
    pieces: PiecewisePolynomial | None = None,
    raw_widths: tuple[int, int] | None = None,
) -> BnlProgram:
    return build_fp_op(kind, system, pieces, raw_widths).program


def input_codecs(kind: str, system: FloatSystem, raw_widths: tuple[int, int] | None = None) -> list[FloatCodec]:
    if kind == "normalize":
        return [FloatCodec(system, raw_widths or default_raw_widths(system))]
    if kind in ("add", "mul"):
        return [FloatCodec(system), FloatCodec(system)]
    return [FloatCodec(system)]


__all__ = [
    "FP_OPS",
    "FloatCodec",
    "FloatNum",
    "add_block",
    "build_fp_op",
    "compile_fp_op",
    "const_float",
    "declare_float",
    "default_raw_widths",
    "emit_float",
    "input_codecs",
    "less_block",
    "mul_block",
    "normalize_block",
    "piecewise_block",
]
