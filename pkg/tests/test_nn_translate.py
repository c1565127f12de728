import itertools
import json
import random

import pytest

from netlogic.formula import And, Not
from netlogic.fully_open import is_fully_open, to_fully_open
from netlogic.nn import (
    Edge,
    NetworkError,
    NeuralNetwork,
    Node,
    Threshold,
    identity_pieces,
    network_from_json,
    network_to_json,
    random_network,
    simulate,
    step_network,
    validate,
)
from netlogic.program import External, batch_outputs, measure, run
from netlogic.rounds import parse_round_map
from netlogic.softfloat import FloatSystem, heaviside_pieces, parse_float, relu_pieces
from netlogic.syntax import parse_program
from netlogic.translate import (
    bits_to_floats,
    bnl_to_nn,
    build_network_program,
    floats_to_bits,
    gadget_values,
    threshold_below_one,
)

S = FloatSystem(2, 1, 10)


def f(text: str, system: FloatSystem = S):
    return parse_float(text, system)


def every_round():
    return External(parse_round_map("arith:0,1"))


def hand_network() -> NeuralNetwork:
    """n1 = relu(2·n0 - 1), n2 = n0 + n1/2, with n0 the input."""
    zero = S.zero()
    nodes = (
        Node("n0", zero, identity_pieces(S)),
        Node("n1", f("-0.10e+1"), relu_pieces(S), zero),
        Node("n2", zero, identity_pieces(S), zero),
    )
    edges = (Edge("n0", "n1", f("+0.20e+1")), Edge("n1", "n2", f("+0.50e+0")), Edge("n0", "n2", f("+0.10e+1")))
    return NeuralNetwork(S, nodes, edges, ("n0",), ("n1", "n2"), every_round())


def test_hand_network_trace():
    states, outputs = simulate(hand_network(), [f("+0.30e+1")], 3)
    assert [(s["n1"].value, s["n2"].value) for s in states] == [(0, 0), (5, 3), (0, 2.5), (0, 0)]
    assert [n for n, _ in outputs] == [0, 1, 2, 3]


def test_identity_single_node():
    node = Node("a", S.zero(), identity_pieces(S), None)
    net = NeuralNetwork(S, (node,), (Edge("a", "a", f("+0.10e+1")),), ("a",), ("a",), every_round())
    states, _ = simulate(net, [f("-0.42e+3")], 5)
    assert {s["a"] for s in states} == {f("-0.42e+3")}


def test_validate_reports_every_problem():
    zero = S.zero()
    other = FloatSystem(2, 1, 2)
    net = NeuralNetwork(
        S,
        (Node("a", zero, relu_pieces(S), None), Node("a", other.zero(), relu_pieces(S), zero), Node("b", zero, relu_pieces(S))),
        (Edge("a", "z", zero), Edge("a", "b", zero), Edge("a", "b", zero)),
        ("a",),
        ("q",),
        (Threshold("w", zero),),
        "sideways",
    )
    problems = "\n".join(validate(net))
    for needle in (
        "duplicate node ids",
        "unknown aggregation",
        "belongs to S(2,1,2)",
        "node b has no initial value",
        "undeclared node 'z'",
        "declared twice",
        "output node 'q'",
        "attention node 'w'",
    ):
        assert needle in problems
    with pytest.raises(NetworkError):
        simulate(net, [zero], 1)


def test_json_roundtrip():
    rng = random.Random(4)
    for _ in range(20):
        net = random_network(rng, FloatSystem(3, 2, 2), rng.randint(1, 5), 3, threshold_attention=rng.random() < 0.5)
        text = json.dumps(network_to_json(net))
        assert network_from_json(json.loads(text)) == net


def test_json_malformed():
    with pytest.raises(NetworkError, match="malformed"):
        network_from_json({"nodes": []})
    with pytest.raises(NetworkError, match="unknown activation"):
        network_from_json({"system": [2, 1, 10], "nodes": [{"id": "a", "activation": "tanh"}]})


# -- network to program -------------------------------------------------------------------


def test_hand_network_compiles_exactly():
    net = hand_network()
    compiled = build_network_program(net)
    codec = compiled.codec
    inputs = [f(t) for t in ("+0.30e+1", "-0.12e+2", "+0.99e+9", "+0.10e-9")] + [S.zero()]
    rows = [codec.encode(v) for v in inputs]
    rounds = 4
    got = batch_outputs(compiled.program, rows, rounds * compiled.period + compiled.offset)
    for value, g in zip(inputs, got):
        _, want = simulate(net, [value], rounds)
        decoded = [(n, (codec.decode(b[: codec.length]), codec.decode(b[codec.length :]))) for n, b in g]
        assert decoded == [(n * compiled.period + compiled.offset, out) for n, out in want]


def test_threshold_attention_offset():
    zero = S.zero()
    node = Node("a", zero, identity_pieces(S), None)
    net = NeuralNetwork(S, (node,), (Edge("a", "a", f("+0.10e+1")),), ("a",), ("a",), (Threshold("a", zero),))
    compiled = build_network_program(net)
    assert compiled.offset >= 1 and compiled.period > compiled.offset
    got = batch_outputs(compiled.program, [compiled.codec.encode(f("+0.50e+0")), compiled.codec.encode(f("-0.50e+0"))], 3 * compiled.period)
    assert [n for n, _ in got[0]] == [k * compiled.period + compiled.offset for k in range(3)]
    assert got[1] == []


# -- program to network -------------------------------------------------------------------


def test_gadget_constants():
    consts = gadget_values(S)
    assert [consts[k].value for k in (-1, 0, 1, 2)] == [-1, 0, 1, 2]
    assert threshold_below_one(S).value < 1
    assert all(v.value <= threshold_below_one(S).value or v.value >= 1 for v in S.values())
    with pytest.raises(ValueError, match="cannot represent"):
        gadget_values(FloatSystem(2, 1, 2))


@pytest.mark.parametrize("activation, pieces", [("relu", relu_pieces), ("heaviside", heaviside_pieces)])
def test_gadgets_compute_boolean_rules(activation, pieces):
    one, zero, minus = (gadget_values(S)[k] for k in (1, 0, -1))
    conj_node = NeuralNetwork(
        S,
        (Node("y", zero, pieces(S)), Node("z", zero, pieces(S)), Node("x", minus, pieces(S), zero)),
        (Edge("y", "x", one), Edge("z", "x", one)),
        ("y", "z"),
        ("x",),
        every_round(),
    )
    neg_node = NeuralNetwork(
        S, (Node("y", zero, pieces(S)), Node("x", one, pieces(S), zero)), (Edge("y", "x", minus),), ("y",), ("x",), every_round()
    )
    for y, z in itertools.product((0, 1), repeat=2):
        state = {"y": gadget_values(S)[y], "z": gadget_values(S)[z], "x": zero}
        assert step_network(conj_node, state)["x"].value == (y and z)
        assert step_network(neg_node, {"y": state["y"], "x": zero})["x"].value == 1 - y


def test_bnl_to_nn_node_weights():
    program = parse_program("X(0):-F. X:-Y&!Z. W(0):-T. W:-!(X&Y). Y:-Y. Z:-Z.\n#print W\n#attention W")
    opened, _ = to_fully_open(program)
    net = bnl_to_nn(program, "relu", S)
    assert [n.id for n in net.nodes] == list(opened.variables)
    for node in net.nodes:
        body = opened.rules[node.id]
        weights = sorted(e.weight.value for e in net.in_edges(node.id))
        if isinstance(body, And):
            assert node.bias.value == -1 and weights in ([1, 1], [2])
        elif isinstance(body, Not):
            assert node.bias.value == 1 and weights == [-1]
    assert net.degree <= 2
    assert len(net.nodes) == len(opened.variables) <= measure(opened)[0]


@pytest.mark.parametrize("activation", ["relu", "heaviside"])
@pytest.mark.parametrize(
    "text, delay",
    [
        ("X(0):-T. Y:-Y&X. X:-!X.\n#print X,Y\n#attention X", 1),
        ("X(0):-T. Y:-!(Y&X). X:-!X.\n#print X,Y\n#attention X", 3),
    ],
)
def test_bnl_to_nn_outputs(activation, text, delay):
    program = parse_program(text)
    assert (delay == 1) == is_fully_open(program)
    net = bnl_to_nn(program, activation, S)
    if delay == 1:
        assert len(net.nodes) == len(program.variables)
    for bits in "01":
        _, want = run(program, bits, 6)
        _, got = simulate(net, bits_to_floats(bits, S), 6 * delay)
        assert [(n, floats_to_bits(v)) for n, v in got] == [(delay * n, out) for n, out in want]


def test_floats_to_bits_marks_non_boolean():
    assert floats_to_bits([S.zero(), S.one(), f("+0.20e+1")]) == "01?"
