"""Combinational building blocks over one-hot digits.

A digit is a tuple of β formulas of which exactly one holds. Numbers are
lists of digits, least significant first. Every block emits predicates
through a :class:`~netlogic.builder.Builder` and costs a fixed number of
levels, independent of the operand width; constant digits fold away.
"""

from __future__ import annotations

from collections.abc import Callable, Sequence

from .builder import Builder
from .formula import Bot, Formula, Top, conj, disj, ite, neg, xor

Digit = tuple[Formula, ...]
Num = list[Digit]


def const_digit(value: int, beta: int) -> Digit:
    return tuple(Top if d == value else Bot for d in range(beta))


def const_num(value: int, width: int, beta: int) -> Num:
    if value < 0 or value >= beta**width:
        raise ValueError(f"{value} does not fit in {width} base-{beta} digits")
    digits = []
    for _ in range(width):
        digits.append(const_digit(value % beta, beta))
        value //= beta
    return digits


def pad(num: Num, width: int, beta: int) -> Num:
    return list(num) + [const_digit(0, beta)] * (width - len(num))


def define_digit(b: Builder, stem: str, digit: Digit) -> Digit:
    return tuple(b.define(f"{stem}_{d}", f) for d, f in enumerate(digit))


def define_num(b: Builder, stem: str, num: Num, msb_names: bool = True) -> Num:
    """Materialise a number; digit predicates are named ``stem_i_d`` with i=1 most significant."""
    n = len(num)
    out = [None] * n
    for i, digit in enumerate(num):
        label = n - i if msb_names else i + 1
        out[i] = define_digit(b, f"{stem}_{label}", digit)
    return out


def force_num(b: Builder, stem: str, num: Num) -> list[list[str]]:
    """Materialise as fresh named predicates even for constants; returns names MSB first."""
    n = len(num)
    names = []
    for i in reversed(range(n)):
        row = []
        for d, f in enumerate(num[i]):
            row.append(b.define(f"{stem}_{n - i}_{d}", f, force=True).name)
        names.append(row)
    return names


def table(x: Digit, y: Digit, fn: Callable[[int, int], int], beta: int) -> Digit:
    """Digit-pair lookup: out[k] = ∨ x[a] ∧ y[c] over pairs with fn(a, c) = k."""
    terms: list[list[Formula]] = [[] for _ in range(beta)]
    for a, fa in enumerate(x):
        for c, fc in enumerate(y):
            k = fn(a, c)
            if 0 <= k < beta:
                terms[k].append(conj(fa, fc))
    return tuple(disj(t) for t in terms)


def pair_flag(x: Digit, y: Digit, pred: Callable[[int, int], bool]) -> Formula:
    return disj(conj(fa, fc) for a, fa in enumerate(x) for c, fc in enumerate(y) if pred(a, c))


def digit_gt_const(x: Digit, c: int) -> Formula:
    return disj(x[d] for d in range(c + 1, len(x)))


def is_zero(num: Num) -> Formula:
    return conj(d[0] for d in num)


def select_digit(cond: Formula, then: Digit, other: Digit) -> Digit:
    return tuple(ite(cond, a, b) for a, b in zip(then, other))


def select_num(cond: Formula, then: Num, other: Num) -> Num:
    return [select_digit(cond, a, b) for a, b in zip(then, other)]


def _prefix_chain(gen: Sequence[Formula], prop: Sequence[Formula], carry_in: Formula = Bot) -> list[Formula]:
    """Carry-lookahead: c_i = ∨_j (g_j ∧ ∧_{j<l≤i} p_l), plus carry_in ∧ all p_l."""
    out = []
    for i in range(len(gen)):
        terms = [conj([gen[j]] + [prop[l] for l in range(j + 1, i + 1)]) for j in range(i + 1)]
        terms.append(conj([carry_in] + [prop[l] for l in range(i + 1)]))
        out.append(disj(terms))
    return out


def add_unsigned(b: Builder, x: Num, y: Num, beta: int, stem: str = "add") -> tuple[Num, list[Formula]]:
    """x + y with one extra digit; returns (sum, carries). Three levels."""
    n = max(len(x), len(y))
    x, y = pad(x, n, beta), pad(y, n, beta)
    gen = [b.define(f"{stem}_g{i + 1}", pair_flag(x[i], y[i], lambda a, c: a + c >= beta)) for i in range(n)]
    prop = [b.define(f"{stem}_p{i + 1}", pair_flag(x[i], y[i], lambda a, c: a + c == beta - 1)) for i in range(n)]
    low = [
        define_digit(b, f"{stem}_t{i + 1}", table(x[i], y[i], lambda a, c: (a + c) % beta, beta)) for i in range(n)
    ]
    carries = [b.define(f"{stem}_C{i + 1}", c) for i, c in enumerate(_prefix_chain(gen, prop))]
    out: Num = [low[0]]
    for i in range(1, n):
        rotated = tuple(low[i][(k - 1) % beta] for k in range(beta))
        out.append(select_digit(carries[i - 1], rotated, low[i]))
    out.append(tuple([neg(carries[-1]), carries[-1]] + [Bot] * (beta - 2)))
    return out, carries


def sub_unsigned_parts(b: Builder, x: Num, y: Num, beta: int, stem: str = "sub") -> Num:
    """x - y for x ≥ y (garbage otherwise); same width as the operands. Three levels."""
    n = max(len(x), len(y))
    x, y = pad(x, n, beta), pad(y, n, beta)
    gen = [b.define(f"{stem}_g{i + 1}", pair_flag(x[i], y[i], lambda a, c: a < c)) for i in range(n)]
    prop = [b.define(f"{stem}_p{i + 1}", pair_flag(x[i], y[i], lambda a, c: a == c)) for i in range(n)]
    low = [
        define_digit(b, f"{stem}_t{i + 1}", table(x[i], y[i], lambda a, c: (a - c) % beta, beta)) for i in range(n)
    ]
    borrows = [b.define(f"{stem}_B{i + 1}", c) for i, c in enumerate(_prefix_chain(gen, prop))]
    out: Num = [low[0]]
    for i in range(1, n):
        shifted = tuple(low[i][(k + 1) % beta] for k in range(beta))
        out.append(select_digit(borrows[i - 1], shifted, low[i]))
    return out


def compare_unsigned(b: Builder, x: Num, y: Num, beta: int, stem: str = "cmp") -> tuple[Formula, Formula]:
    """(x > y, x < y) as formulas over level-1 predicates Z¹_i (x_i > y_i) and Z²_i (x_i < y_i)."""
    n = max(len(x), len(y))
    x, y = pad(x, n, beta), pad(y, n, beta)
    z1 = [b.define(f"{stem}_Z1_{i + 1}", pair_flag(x[i], y[i], lambda a, c: a > c)) for i in range(n)]
    z2 = [b.define(f"{stem}_Z2_{i + 1}", pair_flag(x[i], y[i], lambda a, c: a < c)) for i in range(n)]
    return dominance(z1, z2), dominance(z2, z1)


def dominance(win: Sequence[Formula], lose: Sequence[Formula]) -> Formula:
    """∧_i (lose_i → ∨_{j>i} win_j) ∧ ∨_i win_i: the most significant difference is a win."""
    n = len(win)
    guarded = [disj([neg(lose[i])] + [win[j] for j in range(i + 1, n)]) for i in range(n)]
    return conj(conj(guarded), disj(win))


def signed_add(
    b: Builder, sx: Formula, x: Num, sy: Formula, y: Num, beta: int, stem: str = "sadd"
) -> tuple[Formula, Num, dict]:
    """Sign-magnitude addition (sign 1 = '+'), one extra digit, zero always '+'. Three levels.

    Equal signs add magnitudes; opposite signs subtract the smaller magnitude
    from the larger and take the larger operand's sign.
    """
    n = max(len(x), len(y))
    x, y = pad(x, n, beta), pad(y, n, beta)
    total, carries = add_unsigned(b, x, y, beta, f"{stem}_a")
    gt, lt = compare_unsigned(b, x, y, beta, f"{stem}_c")
    gt = b.define(f"{stem}_gt", gt)
    lt = b.define(f"{stem}_lt", lt)
    diff_xy = sub_unsigned_parts(b, x, y, beta, f"{stem}_s")
    diff_yx = sub_unsigned_parts(b, y, x, beta, f"{stem}_r")
    same = b.define(f"{stem}_same", neg(xor(sx, sy)))
    zero = const_digit(0, beta)
    digits: Num = []
    for i in range(n + 1):
        sub = select_digit(lt, diff_yx[i], diff_xy[i]) if i < n else zero
        digits.append(select_digit(same, total[i], sub))
    both_zero = conj(is_zero(x), is_zero(y))
    sign = ite(
        same,
        disj(sx, both_zero),
        disj(conj(gt, sx), conj(lt, sy), conj(neg(gt), neg(lt))),
    )
    return sign, digits, {"carries": carries, "gt": gt, "lt": lt}


def mul_digit_rows(b: Builder, x: Num, digit: Digit, shift: int, width: int, beta: int, stem: str) -> tuple[Num, Num]:
    """Low and high parts of x · digit, placed at ``shift``; both padded to ``width``."""
    lo = [define_digit(b, f"{stem}_lo{i + 1}", table(xi, digit, lambda a, c: (a * c) % beta, beta)) for i, xi in enumerate(x)]
    hi = [define_digit(b, f"{stem}_hi{i + 1}", table(xi, digit, lambda a, c: (a * c) // beta, beta)) for i, xi in enumerate(x)]
    zero = const_digit(0, beta)
    low = [zero] * shift + lo
    high = [zero] * (shift + 1) + hi
    return pad(low, width, beta)[:width], pad(high, width, beta)[:width]


def mul_unsigned(b: Builder, x: Num, y: Num, beta: int, stem: str = "mul") -> tuple[Num, dict[str, Num]]:
    """x · y in len(x)+len(y) digits via one partial product per digit of y and a pairwise addition tree.

    Returns the product and the partial sums keyed ``z_{level}_{index}`` (1-based).
    """
    width = len(x) + len(y)
    rows: list[Num] = []
    partials: dict[str, Num] = {}
    for j, digit in enumerate(y):
        low, high = mul_digit_rows(b, x, digit, j, width, beta, f"{stem}_d{j + 1}")
        total, _ = add_unsigned(b, low, high, beta, f"{stem}_z1_{j + 1}")
        row = define_num(b, f"{stem}_z1_{j + 1}", total[:width])
        partials[f"z_1_{j + 1}"] = row
        rows.append(row)
    level = 1
    while len(rows) > 1:
        level += 1
        merged = []
        for i in range(0, len(rows) - 1, 2):
            total, _ = add_unsigned(b, rows[i], rows[i + 1], beta, f"{stem}_z{level}_{len(merged) + 1}")
            merged.append(define_num(b, f"{stem}_z{level}_{len(merged) + 1}", total[:width]))
        if len(rows) % 2:
            merged.append(rows[-1])
        rows = merged
        for i, row in enumerate(rows):
            partials[f"z_{level}_{i + 1}"] = row
    return rows[0], partials


def lex_compare_const(digits_msb: Sequence[Digit], const_msb: Sequence[int]) -> tuple[Formula, Formula]:
    """(digits > const, digits == const), comparing most significant first."""
    eqs = [d[c] for d, c in zip(digits_msb, const_msb)]
    gts = [digit_gt_const(d, c) for d, c in zip(digits_msb, const_msb)]
    greater = disj(conj(eqs[:i] + [gts[i]]) for i in range(len(gts)))
    return greater, conj(eqs)


def value_digits(value: int, width: int, beta: int) -> list[int]:
    """Base-β digits of value, least significant first."""
    out = []
    for _ in range(width):
        out.append(value % beta)
        value //= beta
    if value:
        raise ValueError("value does not fit")
    return out


def onehot_to_num(choices: Sequence[tuple[Formula, int]], width: int, beta: int) -> Num:
    """Digits of the value selected by mutually exclusive flags."""
    table_digits = [(flag, value_digits(v, width, beta)) for flag, v in choices]
    num = []
    for i in range(width):
        num.append(tuple(disj(flag for flag, ds in table_digits if ds[i] == d) for d in range(beta)))
    return num
