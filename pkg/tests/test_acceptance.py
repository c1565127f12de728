"""Acceptance criteria 1-11. Each test records its criterion number; the summary prints one line per criterion."""

from __future__ import annotations

import itertools
import math
import random
from fractions import Fraction

import pytest
from support import assert_halts_at, run_halting

from netlogic.circuit import (
    bnl_to_circuit,
    circuit_to_bnl,
    parity_circuit,
    run_self_feeding,
)
from netlogic.fpcompile import FloatCodec, build_fp_op, default_raw_widths
from netlogic.fully_open import is_fully_open, to_fully_open
from netlogic.generators import random_program, random_sc_program
from netlogic.integers import (
    INT_OPS,
    IntCodec,
    build_int_op,
    int_oracle,
    int_output_codec,
    read_register,
)
from netlogic.nn import Edge, NeuralNetwork, Node, Threshold, random_network, simulate
from netlogic.program import batch_outputs, measure, run
from netlogic.sc import bnl_to_sc, measure_sc, run_sc, sc_to_bnl
from netlogic.softfloat import (
    FloatSystem,
    PiecewisePolynomial,
    RawFloatValue,
    eval_piecewise,
    fp_arith,
    heaviside_pieces,
    normalize,
    relu_pieces,
    round_rational,
)
from netlogic.translate import (
    bits_to_floats,
    bnl_to_nn,
    build_network_program,
    floats_to_bits,
)


@pytest.fixture
def criterion(record_property):
    def mark(number: int) -> None:
        record_property("criterion", number)

    return mark


def int_rows(codec: IntCodec, pairs) -> list[str]:
    return [codec.encode(x) + codec.encode(y) for x, y in pairs]


def check_int_op(kind: str, p: int, beta: int, pairs) -> None:
    compiled = build_int_op(kind, p, beta)
    codec, out = IntCodec(p, beta), int_output_codec(kind, p, beta)
    result = run_halting(compiled.program, int_rows(codec, pairs), compiled.output_round)
    assert_halts_at(result, compiled.output_round)
    wrong = [
        (str(x), str(y), bits)
        for (x, y), bits in zip(pairs, result.outputs)
        if out.decode(bits).value != int_oracle(kind, x.value, y.value)
    ]
    assert not wrong, wrong[:5]


def check_fp_op(kind: str, system: FloatSystem, operands, expected, pieces=None, raw_widths=None) -> int:
    compiled = build_fp_op(kind, system, pieces, raw_widths)
    codec = FloatCodec(system)
    if kind == "normalize":
        raw_codec = FloatCodec(system, raw_widths)
        rows = [raw_codec.encode(v) for (v,) in operands]
    else:
        rows = ["".join(codec.encode(v) for v in ops) for ops in operands]
    result = run_halting(compiled.program, rows, compiled.output_round)
    assert_halts_at(result, compiled.output_round)
    wrong = [
        ([str(v) for v in ops], bits, str(want))
        for ops, bits, want in zip(operands, result.outputs, expected)
        if codec.decode(bits) != want
    ]
    assert not wrong, wrong[:5]
    return compiled.output_round


# -- 1 ---------------------------------------------------------------------------------


def test_criterion_1_worked_examples(criterion):
    criterion(1)
    codec = IntCodec(3, 10)
    add = build_int_op("add", 3, 10)
    configs, outputs = run(add.program, codec.encode(614) + codec.encode(187), add.output_round)
    assert str(int_output_codec("add", 3, 10).decode(outputs[0][1])) == "+0801"
    state = dict(zip(add.program.variables, configs[-1]))
    assert [read_register(state, c) for c in add.registers["carries"]] == [1, 1, 0]

    mul = build_int_op("mul", 3, 10)
    configs, outputs = run(mul.program, codec.encode(187) + codec.encode(463), mul.output_round)
    assert str(int_output_codec("mul", 3, 10).decode(outputs[0][1])) == "+086581"
    state = dict(zip(mul.program.variables, configs[-1]))
    partials = {name: read_register(state, reg) for name, reg in mul.registers.items()}
    assert partials["z_1_1"] == 561
    assert partials["z_1_2"] == 11220
    assert partials["z_1_3"] == 74800
    assert partials["z_2_1"] == 11781
    assert partials["z_2_2"] == 74800

    c3 = parity_circuit(3)
    configs, outputs = run_self_feeding(c3, "010", 2)
    assert ["".join(map(str, c)) for c in configs] == ["0100", "1000", "1001"]
    assert outputs == [(2, "1")]
    configs, outputs = run_self_feeding(c3, "011", 3)
    assert ["".join(map(str, c)) for c in configs] == ["0110", "1100", "0000", "0001"]
    assert outputs == [(3, "0")]

    system = FloatSystem(4, 3, 3)
    value = system.parse("-0.2001e+120")
    bits = "1" "0" "010" "001" "100" "001" "100" "100" "010"
    fc = FloatCodec(system)
    assert fc.encode(value) == bits
    assert fc.decode(bits) == value


# -- 2 ---------------------------------------------------------------------------------


@pytest.mark.parametrize("kind", INT_OPS)
def test_criterion_2_integer_sweep(criterion, kind):
    criterion(2)
    for p, beta in ((2, 2), (2, 3)):
        values = IntCodec(p, beta).all_values()
        check_int_op(kind, p, beta, list(itertools.product(values, values)))
    rng = random.Random(2024)
    for p, beta in ((4, 2), (8, 10)):
        codec = IntCodec(p, beta)
        check_int_op(kind, p, beta, [(codec.random(rng), codec.random(rng)) for _ in range(10_000)])


# -- 3 ---------------------------------------------------------------------------------


def measured_round(kind: str, p: int, beta: int, samples: int = 20) -> int:
    compiled = build_int_op(kind, p, beta)
    codec = IntCodec(p, beta)
    rng = random.Random(p * 100 + beta)
    pairs = [(codec.random(rng), codec.random(rng)) for _ in range(samples)]
    outputs = batch_outputs(compiled.program, int_rows(codec, pairs), compiled.output_round + 5, 1)
    rounds = {seq[0][0] for seq in outputs}
    assert len(rounds) == 1, rounds
    return rounds.pop()


def test_criterion_3_round_laws(criterion):
    criterion(3)
    for beta in (2, 10):
        assert [measured_round("compare", p, beta) for p in (2, 4, 8)] == [2, 2, 2]
        add_rounds = {measured_round("add", p, beta) for p in (2, 4, 8)}
        assert len(add_rounds) == 1, add_rounds
    base = measured_round("mul", 2, 2)
    c = base / (math.log2(2) + math.log2(2))
    for p in (4, 8, 16):
        assert measured_round("mul", p, 2) <= c * (math.log2(p) + math.log2(2))


# -- 4 ---------------------------------------------------------------------------------


def test_criterion_4_float_sweep(criterion):
    criterion(4)
    small = FloatSystem(2, 2, 2)
    pairs = list(itertools.product(small.values(), repeat=2))
    for kind in ("add", "mul"):
        check_fp_op(kind, small, pairs, [fp_arith(kind, x, y) for x, y in pairs])
        exact = [round_rational(x.value + y.value if kind == "add" else x.value * y.value, small) for x, y in pairs]
        assert [fp_arith(kind, x, y) for x, y in pairs] == exact

    system = FloatSystem(3, 2, 2)
    rng = random.Random(4)
    pairs = [(system.random_value(rng), system.random_value(rng)) for _ in range(1000)]
    for kind in ("add", "mul"):
        check_fp_op(kind, system, pairs, [fp_arith(kind, x, y) for x, y in pairs])

    widths = default_raw_widths(system)
    limit = system.beta ** widths[1] - 1
    raws = [
        (
            RawFloatValue(
                rng.choice("+-"),
                rng.randrange(system.beta),
                tuple(rng.randrange(system.beta) for _ in range(widths[0])),
                rng.randint(-limit, limit),
                system.beta,
            ),
        )
        for _ in range(1000)
    ]
    expected = [normalize(raw, system) for (raw,) in raws]
    assert expected == [round_rational(raw.value, system) for (raw,) in raws]
    check_fp_op("normalize", system, raws, expected, raw_widths=widths)


# -- 5 ---------------------------------------------------------------------------------


def polynomial_table(system: FloatSystem, degree: int) -> PiecewisePolynomial:
    """Two pieces split at zero; the right piece is a dense polynomial of the given degree."""
    half = round_rational(Fraction(1, 2), system)
    one = system.one()
    coeffs = [half, one.negate(), one, half, one][: degree + 1]
    return PiecewisePolynomial(system, (system.zero(),), ((system.zero(),), tuple(coeffs)))


def test_criterion_5_piecewise(criterion):
    criterion(5)
    system = FloatSystem(3, 2, 2)
    rng = random.Random(5)
    inputs = [(system.random_value(rng),) for _ in range(500)]
    rounds = {}
    tables = {
        "relu": relu_pieces(system),
        "heaviside": heaviside_pieces(system),
        "quadratic": polynomial_table(system, 2),
    }
    for name, pieces in tables.items():
        rounds[name] = check_fp_op(
            "piecewise", system, inputs, [eval_piecewise(pieces, x) for (x,) in inputs], pieces=pieces
        )

    def law(order: int) -> float:
        return (math.log2(max(order, 1)) + 1) * (math.log2(system.r) + math.log2(system.beta))

    few = [(v,) for v in system.values()[::7]]
    for degree in (1, 2, 4):
        pieces = polynomial_table(system, degree)
        rounds[degree] = check_fp_op("piecewise", system, few, [eval_piecewise(pieces, x) for (x,) in few], pieces=pieces)
    c = rounds[1] / law(1)
    for degree in (2, 4):
        assert rounds[degree] <= c * law(degree), (degree, rounds[degree], c * law(degree))
    for name, pieces in tables.items():
        assert rounds[name] <= c * law(pieces.order)


# -- 6 ---------------------------------------------------------------------------------

SC_SIZE_CONSTANT = 7


def test_criterion_6_sc_bridge(criterion):
    criterion(6)
    rng = random.Random(6)
    horizon = 24
    for _ in range(200):
        sc = random_sc_program(rng, variables=rng.randint(1, 10), propositions=rng.randint(0, 3))
        image = sc_to_bnl(sc)
        assert measure(image)[0] <= SC_SIZE_CONSTANT * measure_sc(sc)
        for valuation in itertools.product("01", repeat=len(sc.propositions)):
            bits = "".join(valuation)
            _, want = run_sc(sc, bits, horizon)
            _, got = run(image, bits, horizon + 1)
            assert got == [(n + 1, out) for n, out in want]

        program = random_program(rng, variables=rng.randint(1, 10), inputs=rng.randint(0, 6))
        back = bnl_to_sc(program)
        for bits in itertools.product("01", repeat=len(program.inputs)):
            text = "".join(bits)
            assert run(program, text, 32) == run_sc(back, text, 32)


# -- 7 ---------------------------------------------------------------------------------

OPEN_SIZE_CONSTANT = 16


def test_criterion_7_fully_open(criterion):
    criterion(7)
    rng = random.Random(7)
    horizon = 16
    for _ in range(200):
        program = random_program(rng, variables=rng.randint(1, 10), inputs=rng.randint(0, 8), depth=rng.randint(1, 4))
        size, depth = measure(program)
        opened, delay = to_fully_open(program)
        assert is_fully_open(opened)
        assert delay == depth + 1
        assert measure(opened)[0] <= OPEN_SIZE_CONSTANT * size * max(depth, 1)
        rows = ["".join(bits) for bits in itertools.product("01", repeat=len(program.inputs))]
        want = batch_outputs(program, rows, horizon)
        got = batch_outputs(opened, rows, delay * horizon + delay - 1)
        for w, g in zip(want, got):
            assert g == [(delay * n, out) for n, out in w]


# -- 8 ---------------------------------------------------------------------------------

BALANCED_DEPTH_CONSTANT = 4


def test_criterion_8_circuits(criterion):
    criterion(8)
    rng = random.Random(8)
    horizon = 12
    for trial in range(100):
        program = random_program(rng, variables=rng.randint(1, 8), inputs=rng.randint(0, 6), depth=rng.randint(1, 5))
        size = measure(program)[0]
        rows = ["".join(bits) for bits in itertools.product("01", repeat=len(program.inputs))]
        for mode in ("direct", "balanced"):
            sfc = bnl_to_circuit(program, mode)
            for row in rows:
                assert run_self_feeding(sfc, row, horizon) == run(program, row, horizon)
            if mode == "balanced":
                assert sfc.circuit.depth <= BALANCED_DEPTH_CONSTANT * max(1.0, math.log2(size))
            if trial % 4 == 0:
                back, delay = circuit_to_bnl(sfc)
                assert delay == sfc.circuit.depth + 1
                for row in rows:
                    _, want = run_self_feeding(sfc, row, horizon)
                    _, got = run(back, row, delay * horizon + delay - 1)
                    assert got == [(delay * n, out) for n, out in want]

    base = parity_circuit(1).circuit.size
    for n in range(1, 65):
        assert parity_circuit(n).circuit.size <= base * n
    for n in range(1, 11):
        sfc = parity_circuit(n)
        back, delay = circuit_to_bnl(sfc)
        assert delay == sfc.circuit.depth + 1
        limit = math.ceil(math.log2(n)) + 1
        for bits in itertools.product("01", repeat=n):
            row = "".join(bits)
            _, outputs = run_self_feeding(sfc, row, limit)
            assert outputs and outputs[0][0] <= limit
            assert outputs[0][1] == str(row.count("1") % 2)
            _, translated = run(back, row, delay * limit)
            assert translated[0] == (delay * outputs[0][0], outputs[0][1])


# -- 9 ---------------------------------------------------------------------------------


def test_criterion_9_bnl_to_nn(criterion):
    criterion(9)
    rng = random.Random(9)
    system = FloatSystem(3, 2, 2)
    oversized = []
    for _ in range(100):
        program = random_program(
            rng, variables=rng.randint(1, 8), inputs=rng.randint(0, 8), depth=rng.randint(1, 3), max_size=40
        )
        size = measure(program)[0]
        # an already fully-open program is translated node for node and runs without delay
        delay = 1 if is_fully_open(program) else measure(program)[1] + 1
        rows = ["".join(bits) for bits in itertools.product("01", repeat=len(program.inputs))]
        want = batch_outputs(program, rows, 60, 10)
        for activation in ("relu", "heaviside"):
            network = bnl_to_nn(program, activation, system)
            assert network.degree <= 2
            if len(network.nodes) > size:
                oversized.append((len(network.nodes), size))
            for row, w in zip(rows, want):
                # simulate just far enough to see the network's counterpart of every expected output
                horizon = delay * (w[-1][0] if w else 20)
                _, outputs = simulate(network, bits_to_floats(row, system), horizon)
                got = [(n, floats_to_bits(values)) for n, values in outputs]
                assert got[: len(w)] == [(delay * n, out) for n, out in w]
                assert len(w) == 10 or got == [(delay * n, out) for n, out in w]
    assert not oversized, f"{len(oversized)} networks have more nodes than the program size, e.g. {oversized[:3]}"


# -- 10 --------------------------------------------------------------------------------


def size_shape(network: NeuralNetwork) -> int:
    s = network.system
    r, beta = s.r, s.beta
    return len(network.nodes) * (network.degree + network.piece_size * network.order**2) * (
        r**4 + r**3 * beta**2 + r * beta**4
    )


def dense_network(rng: random.Random, system: FloatSystem, nodes: int, degree: int) -> NeuralNetwork:
    """Every node has two quadratic pieces and min(degree, nodes) distinct in-edges."""
    ids = [f"n{i}" for i in range(nodes)]

    def quadratic():
        return tuple(system.random_value(rng, 0) for _ in range(3))

    def pieces():
        return PiecewisePolynomial(system, (system.random_value(rng, 0),), (quadratic(), quadratic()))

    node_list = tuple(
        Node(i, system.random_value(rng, 0), pieces(), None if k == 0 else system.random_value(rng))
        for k, i in enumerate(ids)
    )
    edges = tuple(Edge(s, t, system.random_value(rng, 0)) for t in ids for s in rng.sample(ids, min(degree, nodes)))
    return NeuralNetwork(system, node_list, edges, (ids[0],), (ids[-1],), (Threshold(ids[-1], system.zero()),))


def test_criterion_10_nn_to_bnl(criterion):
    criterion(10)
    system = FloatSystem(3, 2, 2)
    rng = random.Random(10)
    rounds = 6
    for trial in range(50):
        network = random_network(
            rng,
            system,
            rng.randint(1, 6),
            rng.randint(1, 3),
            max_pieces=2,
            max_order=2,
            aggregation=rng.choice(["balanced", "left"]),
            threshold_attention=rng.random() < 0.8,
        )
        assert network.degree <= 3 and network.piece_size <= 2 and network.order <= 2
        compiled = build_network_program(network)
        codec = compiled.codec
        inputs = [[system.random_value(rng) for _ in network.inputs] for _ in range(100)]
        rows = ["".join(codec.encode(v) for v in values) for values in inputs]
        horizon = rounds * compiled.period + compiled.offset
        got = batch_outputs(compiled.program, rows, horizon)
        for values, g in zip(inputs, got):
            _, want = simulate(network, values, rounds)
            decoded = [
                (n, tuple(codec.decode(bits[i : i + codec.length]) for i in range(0, len(bits), codec.length)))
                for n, bits in g
            ]
            expected = [(n * compiled.period + compiled.offset, out) for n, out in want]
            assert decoded[:3] == expected[:3]
            assert decoded == expected

    ratios = []
    for nodes in (2, 4, 6):
        for degree in (1, 2, 3):
            network = dense_network(rng, system, nodes, degree)
            ratios.append(measure(build_network_program(network).program)[0] / size_shape(network))
    c = max(ratios)
    assert all(r <= c for r in ratios)
    # the shape must explain the growth: one constant within 25% of every grid point
    assert c / min(ratios) <= 1.25, ratios


# -- 11 --------------------------------------------------------------------------------


def test_criterion_11_halting(criterion):
    criterion(11)
    for kind in INT_OPS:
        values = IntCodec(2, 3).all_values()
        check_int_op(kind, 2, 3, list(itertools.product(values, values)))
    system = FloatSystem(2, 2, 2)
    values = system.values()
    pairs = list(itertools.product(values, repeat=2))[::3]
    for kind in ("add", "mul"):
        check_fp_op(kind, system, pairs, [fp_arith(kind, x, y) for x, y in pairs])
    widths = default_raw_widths(system)
    raws = [(RawFloatValue(s, d0, (d1, 0, d1, 1, 0), e, 2),) for s in "+-" for d0 in (0, 1) for d1 in (0, 1) for e in range(-7, 8)]
    check_fp_op("normalize", system, raws, [normalize(r, system) for (r,) in raws], raw_widths=widths)
    singles = [(v,) for v in values]
    for pieces in (relu_pieces(system), heaviside_pieces(system), polynomial_table(system, 2)):
        check_fp_op("piecewise", system, singles, [eval_piecewise(pieces, x) for (x,) in singles], pieces=pieces)
