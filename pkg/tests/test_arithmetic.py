import itertools
import random
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st
from support import assert_halts_at, run_halting

from netlogic.fpcompile import FloatCodec, build_fp_op, default_raw_widths
from netlogic.integers import IntCodec, IntegerValue, build_int_op, int_output_codec
from netlogic.softfloat import (
    FloatSystem,
    FloatValue,
    RawFloatValue,
    eval_piecewise,
    fp_add,
    fp_compare,
    fp_mul,
    heaviside_pieces,
    normalize,
    parse_float,
    readiness_reduce,
    relu_pieces,
    round_nearest_even,
    round_rational,
)

# -- integers ------------------------------------------------------------------------------


def test_int_codec_layout():
    codec = IntCodec(2, 3)
    assert codec.length == 7
    assert codec.encode(-5) == "0" "010" "001"
    assert codec.decode("0010001").value == -5
    assert codec.encode(IntegerValue("-", (0, 0), 3)) == codec.encode(0)


def test_int_codec_roundtrip_all_values():
    for p, beta in ((1, 2), (2, 3), (3, 4)):
        codec = IntCodec(p, beta)
        for v in codec.all_values():
            assert codec.decode(codec.encode(v)).value == v.value


def test_int_codec_rejects_bad_input():
    codec = IntCodec(2, 2)
    with pytest.raises(ValueError):
        codec.decode("1101")
    with pytest.raises(ValueError):
        codec.decode("11111")
    with pytest.raises(ValueError):
        codec.encode(4)


def test_compare_equal_operands_gives_zero():
    codec = IntCodec(3, 10)
    compiled = build_int_op("compare", 3, 10)
    out = int_output_codec("compare", 3, 10)
    rows = [codec.encode(v) * 2 for v in (0, 7, -7, 999, -999)]
    result = run_halting(compiled.program, rows, compiled.output_round)
    assert_halts_at(result, compiled.output_round)
    assert all(str(out.decode(bits)) == "+0" for bits in result.outputs)


def test_compare_signed_zero_and_sign():
    codec = IntCodec(2, 10)
    compiled = build_int_op("compare", 2, 10)
    out = int_output_codec("compare", 2, 10)
    pairs = [(IntegerValue("-", (0, 0), 10), IntegerValue("+", (0, 0), 10)), (IntegerValue.from_int(-1, 2, 10), 0)]
    rows = [codec.encode(x) + codec.encode(y) for x, y in pairs]
    result = run_halting(compiled.program, rows, compiled.output_round)
    assert [out.decode(b).value for b in result.outputs] == [0, 0]


def test_unknown_int_op():
    with pytest.raises(ValueError, match="unknown integer operation"):
        build_int_op("div", 2, 2)


# -- soft float reference -----------------------------------------------------------------

S2110 = FloatSystem(2, 1, 10)
S3210 = FloatSystem(3, 2, 10)


def test_float_text():
    assert str(S2110.zero()) == "+0.00e-9"
    assert str(parse_float("-0.314e+02", S3210)) == "-0.314e+02"
    assert parse_float("-0.314e+02", S3210).value == Fraction(-314, 10)
    with pytest.raises(ValueError, match="not normalized"):
        FloatValue(S2110, "+", (0, 5), 1)


def test_add_rounds_to_nearest():
    x, y = parse_float("+0.99e+2", S2110), parse_float("+0.20e+1", S2110)
    assert str(fp_add(x, y)) == "+0.10e+3"
    assert fp_add(x, y).value == 100


def test_round_ties_to_even():
    assert str(round_nearest_even(RawFloatValue("+", 0, (1, 0, 5), 3, 10), 2)) == "+0.10e+3"
    assert str(round_nearest_even(RawFloatValue("+", 0, (1, 1, 5), 3, 10), 2)) == "+0.12e+3"
    assert str(round_nearest_even(RawFloatValue("+", 0, (1, 0, 6), 3, 10), 2)) == "+0.11e+3"


def test_normalize_shifts_leading_zeros():
    assert str(normalize(RawFloatValue("+", 0, (0, 1, 2), 1, 10), S3210)) == "+0.120e+00"


def test_normalize_flushes_underflow():
    assert normalize(RawFloatValue("+", 0, (0, 0), 4, 10), S2110) == S2110.zero()


def test_add_zero_identity():
    for v in FloatSystem(2, 1, 3).values():
        zero = v.system.zero()
        assert fp_add(v, zero) == v
        assert fp_add(zero, v) == v


def test_activation_tables():
    s = FloatSystem(3, 2, 2)
    relu, heaviside = relu_pieces(s), heaviside_pieces(s)
    for v in s.values():
        assert eval_piecewise(relu, v) == (v if v.value > 0 else s.zero())
        assert eval_piecewise(heaviside, v) == (s.one() if v.value > 0 else s.zero())


def test_readiness_order():
    joins = []
    readiness_reduce(["a", "b", "c", "d"], [0, 3, 0, 1], lambda x, y: joins.append((x, y)) or x + y)
    assert joins[0] == ("a", "c")


@pytest.mark.parametrize("system", [FloatSystem(2, 1, 10), FloatSystem(3, 2, 2), FloatSystem(4, 3, 3)])
def test_float_codec_roundtrip_random(system):
    rng = random.Random(5)
    codec = FloatCodec(system)
    for _ in range(1000):
        v = system.random_value(rng)
        bits = codec.encode(v)
        assert len(bits) == codec.length
        assert codec.decode(bits) == v


def test_float_codec_zero_convention():
    s = FloatSystem(2, 1, 3)
    bits = FloatCodec(s).encode(s.zero())
    assert bits[:2] == "01"
    assert FloatCodec(s).decode(bits) == s.zero()


float_systems = st.sampled_from([FloatSystem(2, 1, 10), FloatSystem(3, 2, 2), FloatSystem(3, 1, 3)])


@given(float_systems, st.integers(0, 2**32))
def test_arith_matches_exact_rounding(system, seed):
    rng = random.Random(seed)
    a, b = system.random_value(rng), system.random_value(rng)
    assert fp_add(a, b) == round_rational(a.value + b.value, system)
    assert fp_mul(a, b) == round_rational(a.value * b.value, system)
    assert fp_compare(a, b) == (a.value > b.value) - (a.value < b.value)


# -- compiled floating point ---------------------------------------------------------------


def test_compiled_normalize_example():
    system = FloatSystem(3, 2, 10)
    widths = default_raw_widths(system)
    compiled = build_fp_op("normalize", system, raw_widths=widths)
    raw = RawFloatValue("+", 0, (0, 1, 2) + (0,) * (widths[0] - 3), 1, 10)
    result = run_halting(compiled.program, [FloatCodec(system, widths).encode(raw)], compiled.output_round)
    assert_halts_at(result, compiled.output_round)
    assert str(FloatCodec(system).decode(result.outputs[0])) == "+0.120e+00"


def test_compiled_add_with_zero_exhaustive():
    system = FloatSystem(2, 2, 2)
    codec = FloatCodec(system)
    compiled = build_fp_op("add", system)
    values = system.values()
    pairs = [(v, system.zero()) for v in values] + [(system.zero(), v) for v in values]
    rows = [codec.encode(a) + codec.encode(b) for a, b in pairs]
    result = run_halting(compiled.program, rows, compiled.output_round)
    assert_halts_at(result, compiled.output_round)
    assert [codec.decode(bits) for bits in result.outputs] == [a if b.is_zero else b for a, b in pairs]


def test_compiled_mul_exhaustive_small():
    system = FloatSystem(2, 1, 2)
    codec = FloatCodec(system)
    compiled = build_fp_op("mul", system)
    pairs = list(itertools.product(system.values(), repeat=2))
    result = run_halting(compiled.program, [codec.encode(a) + codec.encode(b) for a, b in pairs], compiled.output_round)
    assert_halts_at(result, compiled.output_round)
    assert [codec.decode(bits) for bits in result.outputs] == [fp_mul(a, b) for a, b in pairs]


def test_piecewise_needs_table():
    with pytest.raises(ValueError, match="piece table"):
        build_fp_op("piecewise", FloatSystem(2, 1, 2))


def test_normalize_and_add_rounds_do_not_grow():
    rounds = {
        kind: {build_fp_op(kind, FloatSystem(p, 2, beta)).output_round for p in (2, 3, 4, 6) for beta in (2, 3)}
        for kind in ("normalize", "add")
    }
    assert rounds == {"normalize": {6}, "add": {14}}
