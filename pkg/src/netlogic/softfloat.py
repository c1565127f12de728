"""Exact reference arithmetic for the base-β floating-point systems S(p, q, β).

A normalized value is ±0.d_1…d_p × β^e with d_1 ≠ 0 and |e| ≤ β^q − 1, or
the canonical zero (+0.0…0 with the smallest exponent). Digit procedures
here mirror the compiled programs step by step; ``round_rational`` is an
independent oracle that rounds the exact rational result once.
"""

from __future__ import annotations

import heapq
import random
from collections.abc import Callable, Hashable, Sequence
from dataclasses import dataclass
from fractions import Fraction
from typing import TypeVar

DIGIT_CHARS = "0123456789abcdefghijklmnopqrstuvwxyz"


def _digit_char(d: int) -> str:
    return DIGIT_CHARS[d]


def _to_digits(n: int, width: int, beta: int) -> tuple[int, ...]:
    """Base-β digits of n, most significant first."""
    out = []
    for _ in range(width):
        out.append(n % beta)
        n //= beta
    if n:
        raise ValueError("value does not fit")
    return tuple(reversed(out))


def _from_digits(digits: Sequence[int], beta: int) -> int:
    n = 0
    for d in digits:
        n = n * beta + d
    return n


@dataclass(frozen=True)
class FloatSystem:
    p: int
    q: int
    beta: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1 or self.beta < 2:
            raise ValueError("need p ≥ 1, q ≥ 1, β ≥ 2")
        if self.beta > len(DIGIT_CHARS):
            raise ValueError(f"β up to {len(DIGIT_CHARS)} supported")

    @property
    def emax(self) -> int:
        return self.beta**self.q - 1

    @property
    def emin(self) -> int:
        return -self.emax

    @property
    def r(self) -> int:
        return max(self.p, self.q)

    def zero(self) -> FloatValue:
        return FloatValue(self, "+", (0,) * self.p, self.emin)

    def largest(self, sign: str = "+") -> FloatValue:
        return FloatValue(self, sign, (self.beta - 1,) * self.p, self.emax)

    def smallest_positive(self) -> FloatValue:
        return FloatValue(self, "+", (1,) + (0,) * (self.p - 1), self.emin)

    def one(self) -> FloatValue:
        return round_rational(Fraction(1), self)

    def values(self) -> list[FloatValue]:
        """Every normalized value, in increasing order."""
        positives = []
        for e in range(self.emin, self.emax + 1):
            for m in range(self.beta ** (self.p - 1), self.beta**self.p):
                positives.append(FloatValue(self, "+", _to_digits(m, self.p, self.beta), e))
        negatives = [v.negate() for v in reversed(positives)]
        return negatives + [self.zero()] + positives

    def random_value(self, rng: random.Random, zero_weight: float = 0.05) -> FloatValue:
        if rng.random() < zero_weight:
            return self.zero()
        digits = (rng.randrange(1, self.beta),) + tuple(rng.randrange(self.beta) for _ in range(self.p - 1))
        return FloatValue(self, rng.choice("+-"), digits, rng.randint(self.emin, self.emax))

    def parse(self, text: str) -> FloatValue:
        return parse_float(text, self)

    def __str__(self) -> str:
        return f"S({self.p},{self.q},{self.beta})"


@dataclass(frozen=True)
class FloatValue:
    system: FloatSystem
    sign: str
    digits: tuple[int, ...]
    exponent: int

    def __post_init__(self):
        s = self.system
        object.__setattr__(self, "digits", tuple(self.digits))
        if self.sign not in ("+", "-"):
            raise ValueError(f"bad sign {self.sign!r}")
        if len(self.digits) != s.p or any(not 0 <= d < s.beta for d in self.digits):
            raise ValueError(f"fraction must have {s.p} base-{s.beta} digits")
        if not s.emin <= self.exponent <= s.emax:
            raise ValueError(f"exponent {self.exponent} outside [{s.emin}, {s.emax}]")
        if self.digits[0] == 0 and not (self.is_zero and self.exponent == s.emin and self.sign == "+"):
            raise ValueError("not normalized: leading digit is zero")

    @property
    def is_zero(self) -> bool:
        return not any(self.digits)

    @property
    def mantissa(self) -> int:
        return _from_digits(self.digits, self.system.beta)

    @property
    def value(self) -> Fraction:
        s = self.system
        magnitude = Fraction(self.mantissa) * Fraction(s.beta) ** (self.exponent - s.p)
        return magnitude if self.sign == "+" else -magnitude

    @property
    def exp_sign(self) -> str:
        return "-" if self.exponent < 0 else "+"

    @property
    def exp_digits(self) -> tuple[int, ...]:
        return _to_digits(abs(self.exponent), self.system.q, self.system.beta)

    def negate(self) -> FloatValue:
        if self.is_zero:
            return self
        return FloatValue(self.system, "-" if self.sign == "+" else "+", self.digits, self.exponent)

    def __str__(self) -> str:
        frac = "".join(_digit_char(d) for d in self.digits)
        exp = "".join(_digit_char(d) for d in self.exp_digits)
        return f"{self.sign}0.{frac}e{self.exp_sign}{exp}"


def parse_float(text: str, system: FloatSystem) -> FloatValue:
    """Parse the canonical text form ``±0.d…d e±e…e`` (spaces optional)."""
    t = text.replace(" ", "").lower()
    try:
        mantissa, exp = t.split("e")
        sign, rest = mantissa[0], mantissa[1:]
        if sign not in "+-" or not rest.startswith("0."):
            raise ValueError
        digits = tuple(DIGIT_CHARS.index(c) for c in rest[2:])
        esign, edigits = exp[0], tuple(DIGIT_CHARS.index(c) for c in exp[1:])
        if esign not in "+-" or len(edigits) != system.q:
            raise ValueError
    except (ValueError, IndexError):
        raise ValueError(f"cannot parse float {text!r}; expected e.g. '+0.{'1' * system.p}e+{'0' * system.q}'")
    if any(d >= system.beta for d in digits + edigits):
        raise ValueError(f"digit out of range in {text!r}")
    magnitude = _from_digits(edigits, system.beta)
    return FloatValue(system, sign, digits, magnitude if esign == "+" else -magnitude)


@dataclass(frozen=True)
class RawFloatValue:
    """±d_0.d_1…d_{p'} × β^e with no normalization requirement."""

    sign: str
    lead: int
    digits: tuple[int, ...]
    exponent: int
    beta: int

    def __post_init__(self):
        object.__setattr__(self, "digits", tuple(self.digits))
        if self.sign not in ("+", "-"):
            raise ValueError(f"bad sign {self.sign!r}")
        if any(not 0 <= d < self.beta for d in (self.lead, *self.digits)):
            raise ValueError("digit out of range")

    @property
    def value(self) -> Fraction:
        n = _from_digits((self.lead, *self.digits), self.beta)
        magnitude = Fraction(n) * Fraction(self.beta) ** (self.exponent - len(self.digits))
        return magnitude if self.sign == "+" else -magnitude

    def __str__(self) -> str:
        frac = "".join(_digit_char(d) for d in self.digits)
        return f"{self.sign}{_digit_char(self.lead)}.{frac}e{self.exponent:+d}"


def round_rational(value: Fraction, system: FloatSystem) -> FloatValue:
    """Oracle: round the exact value to nearest (ties to even), then saturate or flush to zero."""
    value = Fraction(value)
    if value == 0:
        return system.zero()
    beta, p = system.beta, system.p
    sign = "+" if value > 0 else "-"
    magnitude = abs(value)
    e = 0
    while magnitude >= Fraction(beta) ** e:
        e += 1
    while magnitude < Fraction(beta) ** (e - 1):
        e -= 1
    scaled = round(magnitude / Fraction(beta) ** (e - p))
    if scaled == beta**p:
        scaled, e = beta ** (p - 1), e + 1
    if e > system.emax:
        return system.largest(sign)
    if e < system.emin:
        return system.zero()
    return FloatValue(system, sign, _to_digits(scaled, p, beta), e)


def _half_tail(beta: int, length: int) -> list[int]:
    """Digit string of one half in base β, truncated: exact for even β, a lower bound for odd β."""
    if beta % 2 == 0:
        return [beta // 2] + [0] * (length - 1)
    return [beta // 2] * length


def round_decision(kept: Sequence[int], tail: Sequence[int], beta: int) -> bool:
    """Whether dropping ``tail`` after ``kept`` rounds up under ties-to-even."""
    if not tail:
        return False
    half = _half_tail(beta, len(tail))
    tail = list(tail)
    if tail > half:
        return True
    if tail == half and beta % 2 == 0:
        return bool(kept) and kept[-1] % 2 == 1
    return False


def _round_digits(digits: Sequence[int], p: int, beta: int) -> tuple[list[int], bool]:
    """Round 0.digits to p digits; returns (digits, overflowed past 0.99…9)."""
    digits = list(digits) + [0] * max(0, p - len(digits))
    kept, tail = digits[:p], digits[p:]
    if not round_decision(kept, tail, beta):
        return kept, False
    for i in reversed(range(p)):
        if kept[i] == beta - 1:
            kept[i] = 0
        else:
            kept[i] += 1
            return kept, False
    return [1] + [0] * (p - 1), True


def round_nearest_even(raw: RawFloatValue, p: int) -> RawFloatValue:
    """Round a raw value to p fraction digits; the result has lead digit 0 and d_1 ≠ 0 unless zero."""
    digits = [raw.lead, *raw.digits]
    exponent = raw.exponent + 1
    while digits and digits[0] == 0 and any(digits):
        digits = digits[1:]
        exponent -= 1
    if not any(digits):
        return RawFloatValue("+", 0, (0,) * p, raw.exponent, raw.beta)
    kept, overflow = _round_digits(digits, p, raw.beta)
    return RawFloatValue(raw.sign, 0, tuple(kept), exponent + overflow, raw.beta)


def normalize(raw: RawFloatValue, system: FloatSystem) -> FloatValue:
    """Leading-zero shift, ties-to-even rounding, then the exponent range check."""
    if raw.beta != system.beta:
        raise ValueError("raw value and system use different bases")
    rounded = round_nearest_even(raw, system.p)
    if not any(rounded.digits):
        return system.zero()
    if rounded.exponent > system.emax:
        return system.largest(rounded.sign)
    if rounded.exponent < system.emin:
        return system.zero()
    return FloatValue(system, rounded.sign, rounded.digits, rounded.exponent)


def _check_same(a: FloatValue, b: FloatValue) -> FloatSystem:
    if a.system != b.system:
        raise ValueError(f"system mismatch: {a.system} vs {b.system}")
    return a.system


def add_width(system: FloatSystem) -> int:
    """Fraction digits kept after alignment; holds any shift up to p+2 exactly."""
    return 2 * system.p + 2


def fp_add(a: FloatValue, b: FloatValue) -> FloatValue:
    """Exponent compare, early-out past p+2, align, exact digit add, normalize."""
    s = _check_same(a, b)
    large, small = (a, b) if a.exponent >= b.exponent else (b, a)
    shift = large.exponent - small.exponent
    if shift > s.p + 2:
        return large
    width = add_width(s)
    big = _from_digits(large.digits, s.beta) * s.beta ** (width - s.p)
    little = _from_digits(small.digits, s.beta) * s.beta ** (width - s.p - shift)
    signed = (big if large.sign == "+" else -big) + (little if small.sign == "+" else -little)
    digits = _to_digits(abs(signed), width + 1, s.beta)
    raw = RawFloatValue("+" if signed >= 0 else "-", digits[0], digits[1:], large.exponent, s.beta)
    return normalize(raw, s)


def fp_mul(a: FloatValue, b: FloatValue) -> FloatValue:
    """Exponent add, 2p-digit fraction product read as 0.0m, normalize."""
    s = _check_same(a, b)
    product = a.mantissa * b.mantissa
    sign = "+" if a.sign == b.sign else "-"
    digits = _to_digits(product, 2 * s.p, s.beta)
    raw = RawFloatValue(sign, 0, digits + (0,), a.exponent + b.exponent, s.beta)
    return normalize(raw, s)


def fp_compare(a: FloatValue, b: FloatValue) -> int:
    """-1, 0 or 1 as a is below, equal to or above b."""
    _check_same(a, b)
    return (a.value > b.value) - (a.value < b.value)


def fp_arith(kind: str, a: FloatValue, b: FloatValue):
    if kind == "add":
        return fp_add(a, b)
    if kind == "mul":
        return fp_mul(a, b)
    if kind == "compare":
        return fp_compare(a, b)
    raise ValueError(f"unknown operation {kind!r}")


T = TypeVar("T")


def balanced_reduce(items: Sequence[T], op: Callable[[T, T], T]) -> T:
    """Combine neighbours pairwise, level by level; an odd last element passes through."""
    items = list(items)
    if not items:
        raise ValueError("nothing to reduce")
    while len(items) > 1:
        nxt = [op(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            nxt.append(items[-1])
        items = nxt
    return items[0]


@dataclass(frozen=True)
class PiecewisePolynomial:
    """Piece i covers [t_i, t_{i+1}) with t_0 = -∞ and t_P = +∞; coefficients a_0, a_1, …"""

    system: FloatSystem
    breakpoints: tuple[FloatValue, ...]
    polynomials: tuple[tuple[FloatValue, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "breakpoints", tuple(self.breakpoints))
        object.__setattr__(self, "polynomials", tuple(tuple(c) for c in self.polynomials))
        if len(self.polynomials) != len(self.breakpoints) + 1:
            raise ValueError("need exactly one polynomial per interval (breakpoints + 1)")
        for t in self.breakpoints:
            if t.system != self.system:
                raise ValueError("breakpoint from a different system")
        for lo, hi in zip(self.breakpoints, self.breakpoints[1:]):
            if fp_compare(lo, hi) >= 0:
                raise ValueError("breakpoints must be strictly increasing")
        for coeffs in self.polynomials:
            if not coeffs:
                raise ValueError("every polynomial needs at least one coefficient")
            if any(c.system != self.system for c in coeffs):
                raise ValueError("coefficient from a different system")

    @property
    def pieces(self) -> int:
        return len(self.polynomials)

    @property
    def order(self) -> int:
        return max(len(c) for c in self.polynomials) - 1

    def piece_index(self, x: FloatValue) -> int:
        return sum(1 for t in self.breakpoints if fp_compare(x, t) >= 0)


def relu_pieces(system: FloatSystem) -> PiecewisePolynomial:
    return PiecewisePolynomial(system, (system.zero(),), ((system.zero(),), (system.zero(), system.one())))


def heaviside_pieces(system: FloatSystem) -> PiecewisePolynomial:
    """H(x) = 1 for x > 0, else 0; the breakpoint is the smallest positive value."""
    return PiecewisePolynomial(system, (system.smallest_positive(),), ((system.zero(),), (system.one(),)))


def power_plan(k: int) -> Hashable:
    """Product tree for x^k: k copies of x combined by balanced pairing (nested tuples, leaves 'x')."""
    return balanced_reduce(["x"] * k, lambda a, b: (a, b))


def plan_depth(plan) -> int:
    return 0 if plan == "x" else 1 + max(plan_depth(plan[0]), plan_depth(plan[1]))


def term_readiness(degree: int) -> int:
    """Operation levels before the term a_k·x^k exists: the power tree plus the coefficient product."""
    return 0 if degree == 0 else plan_depth(power_plan(degree)) + 1


def readiness_reduce(items: Sequence[T], ready: Sequence[int], combine: Callable[[T, T], T]) -> T:
    """Sum by always joining the two earliest-ready partial results (ties by creation order).

    A deterministic schedule that keeps late high-degree terms off the bottom of the add tree.
    """
    heap = [(r, i, item) for i, (r, item) in enumerate(zip(ready, items))]
    heapq.heapify(heap)
    serial = len(heap)
    while len(heap) > 1:
        ra, _, a = heapq.heappop(heap)
        rb, _, b = heapq.heappop(heap)
        heapq.heappush(heap, (max(ra, rb) + 1, serial, combine(a, b)))
        serial += 1
    return heap[0][2]


def sum_terms(terms: Sequence[T], add: Callable[[T, T], T]) -> T:
    """Canonical summation order for the terms of :func:`polynomial_terms`."""
    return readiness_reduce(terms, [term_readiness(k) for k in range(len(terms))], add)


def polynomial_terms(coeffs: Sequence[T], power: Callable[[int], T], mul: Callable[[T, T], T]) -> list[T]:
    return [coeffs[0]] + [mul(c, power(k)) for k, c in enumerate(coeffs) if k > 0]


def eval_polynomial(coeffs: Sequence[FloatValue], x: FloatValue) -> FloatValue:
    memo: dict = {}

    def evaluate_plan(plan):
        if plan == "x":
            return x
        if plan not in memo:
            memo[plan] = fp_mul(evaluate_plan(plan[0]), evaluate_plan(plan[1]))
        return memo[plan]

    terms = polynomial_terms(coeffs, lambda k: evaluate_plan(power_plan(k)), fp_mul)
    return sum_terms(terms, fp_add)


def eval_piecewise(pieces: PiecewisePolynomial, x: FloatValue) -> FloatValue:
    if x.system != pieces.system:
        raise ValueError("system mismatch")
    return eval_polynomial(pieces.polynomials[pieces.piece_index(x)], x)


__all__ = [
    "FloatSystem",
    "FloatValue",
    "PiecewisePolynomial",
    "RawFloatValue",
    "add_width",
    "balanced_reduce",
    "eval_piecewise",
    "eval_polynomial",
    "fp_add",
    "fp_arith",
    "fp_compare",
    "fp_mul",
    "heaviside_pieces",
    "normalize",
    "parse_float",
    "power_plan",
    "readiness_reduce",
    "relu_pieces",
    "round_decision",
    "round_nearest_even",
    "round_rational",
    "sum_terms",
]
