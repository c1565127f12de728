"""Translations between neural networks over S(p, q, β) and BNL programs.

``nn_to_bnl`` keeps every node value as one-hot predicates. A combinational
pipeline (edge products, aggregation, activation) computes the next values,
and a one-hot counter of period T latches them all on the same tick, so
program round m·T holds network round m.

``bnl_to_nn`` opens the program first, so every rule is ⊤, Y, ¬Y or Y∧Z.
Each predicate then becomes one node computing that gate on 0/1 values.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .builder import Builder
from .formula import And, Formula, Not, Var, _TopType, conj, disj
from .fpcompile import (
    FloatCodec,
    FloatNum,
    add_block,
    const_float,
    declare_float,
    less_block,
    mul_block,
    piecewise_block,
)
from .fully_open import is_fully_open, to_fully_open
from .nn import Edge, NetworkError, NeuralNetwork, Node, Threshold, validate
from .program import BnlProgram, External, Predicates, apply_flag, make_counter
from .rounds import Affine
from .softfloat import (
    FloatSystem,
    FloatValue,
    balanced_reduce,
    heaviside_pieces,
    relu_pieces,
    round_rational,
)


@dataclass
class NetworkProgram:
    """A compiled network: value predicates land every ``period`` rounds; attention fires ``offset`` rounds later."""

    program: BnlProgram
    period: int
    offset: int
    codec: FloatCodec
    value_predicates: dict[str, list[str]]


def _float_bits(x: FloatNum) -> list[Formula]:
    bits = [x.exp_sign, x.frac_sign]
    for digit in reversed(x.exp):
        bits.extend(digit)
    for digit in x.frac:
        bits.extend(digit)
    return bits


def build_network_program(network: NeuralNetwork) -> NetworkProgram:
    problems = validate(network)
    if problems:
        raise NetworkError("; ".join(problems))
    system = network.system
    beta = system.beta
    codec = FloatCodec(system)
    b = Builder()
    order = list(network.inputs) + [n.id for n in network.nodes if n.id not in network.inputs]
    index = {n.id: i for i, n in enumerate(network.nodes)}
    values: dict[str, FloatNum] = {}
    for node_id in order:
        values[node_id] = declare_float(b, f"V{index[node_id]}", system.p, system.q, beta)
    value_names = {node_id: [f.name for f in _float_bits(values[node_id])] for node_id in order}

    new_bits: dict[str, list[Formula]] = {}
    for node in network.nodes:
        i = index[node.id]
        terms = [const_float(node.bias)]
        for k, edge in enumerate(network.in_edges(node.id)):
            terms.append(mul_block(b, values[edge.source], const_float(edge.weight), system, f"U{i}_m{k + 1}"))
        counter = [0]

        def add(u: FloatNum, v: FloatNum, i=i, counter=counter) -> FloatNum:
            counter[0] += 1
            return add_block(b, u, v, system, f"U{i}_a{counter[0]}")

        if network.aggregation == "left":
            total = terms[0]
            for t in terms[1:]:
                total = add(total, t)
        else:
            total = balanced_reduce(terms, add)
        result, _ = piecewise_block(b, total, node.activation, f"U{i}_act")
        new_bits[node.id] = _float_bits(result)

    latest = max((b.level_of(f) for bits in new_bits.values() for f in bits), default=0)
    offset = 0
    if isinstance(network.attention, External):
        watch = None
    else:
        watch = disj(
            less_block(b, const_float(t.value), values[t.node], beta, f"A{k + 1}") for k, t in enumerate(network.attention)
        )
        offset = b.level_of(watch) + 1
    period = max(latest + 1, offset + 1, 2)

    taken = set(b.rules)
    prefix = "K"
    while any(f"{prefix}_{i}" in taken for i in range(period)):
        prefix += "K"
    ring = make_counter(period - 1, prefix)
    tick = Var(ring.variables[-1])
    rules = dict(b.rules)
    terminal = dict(b.terminal)
    for node in network.nodes:
        names = value_names[node.id]
        for name, body in zip(names, new_bits[node.id]):
            rules[name] = apply_flag(body, tick, Var(name))
        if node.id not in network.inputs:
            for name, bit in zip(names, codec.encode(node.init)):
                terminal[name] = bit == "1"
    variables = list(b.variables) + list(ring.variables)
    rules.update(ring.rules)
    terminal.update(ring.terminal)
    if isinstance(network.attention, External):
        attention = External(Affine(period, 0, network.attention.rounds))
    else:
        flag = "ATT"
        while flag in rules:
            flag += "_"
        rules[flag] = conj(Var(ring.variables[offset - 1]), watch)
        terminal[flag] = False
        variables.append(flag)
        attention = Predicates((flag,))
    printed = tuple(name for node_id in network.outputs for name in value_names[node_id])
    program = BnlProgram(tuple(variables), terminal, rules, printed, attention)
    return NetworkProgram(program, period, offset, codec, value_names)


def nn_to_bnl(network: NeuralNetwork) -> BnlProgram:
    return build_network_program(network).program


def gadget_values(system: FloatSystem) -> dict[int, FloatValue]:
    """The constants -1, 0, 1, 2 of S; raises if one of them is not exactly representable."""
    out = {}
    for k in (-1, 0, 1, 2):
        v = round_rational(Fraction(k), system)
        if v.value != k:
            raise ValueError(f"{system} cannot represent {k} exactly; pick a larger exponent range")
        out[k] = v
    return out


def threshold_below_one(system: FloatSystem) -> FloatValue:
    """The largest value of S strictly below 1, so that 'value > threshold' means 'value ≥ 1'."""
    s = system
    return FloatValue(s, "+", (s.beta - 1,) * s.p, 0)


def bnl_to_nn(program: BnlProgram, activation: str, system: FloatSystem) -> NeuralNetwork:
    """One ReLU or Heaviside node per predicate of the fully-open program."""
    if activation not in ("relu", "heaviside"):
        raise ValueError("activation must be 'relu' or 'heaviside'")
    consts = gadget_values(system)
    pieces = relu_pieces(system) if activation == "relu" else heaviside_pieces(system)
    # an already fully-open program maps node for node, without delay
    opened = program if is_fully_open(program) else to_fully_open(program)[0]
    nodes = []
    edges = []
    for name in opened.variables:
        body = opened.rules[name]
        if isinstance(body, _TopType):
            bias, incoming = 1, []
        elif isinstance(body, Var):
            bias, incoming = 0, [(body.name, 1)]
        elif isinstance(body, Not):
            bias, incoming = 1, [(body.child.name, -1)]
        elif isinstance(body, And):
            left, right = body.left.name, body.right.name
            bias = -1
            incoming = [(left, 2)] if left == right else [(left, 1), (right, 1)]
        else:
            raise AssertionError(f"unexpected rule shape for {name}")
        init = None
        if name in opened.terminal:
            init = consts[1] if opened.terminal[name] else consts[0]
        nodes.append(Node(name, consts[bias], pieces, init))
        edges.extend(Edge(source, name, consts[w]) for source, w in incoming)
    if isinstance(opened.attention, External):
        attention: tuple | External = opened.attention
    else:
        below = threshold_below_one(system)
        attention = tuple(Threshold(a, below) for a in opened.attention.names)
    return NeuralNetwork(system, tuple(nodes), tuple(edges), opened.inputs, opened.printed, attention)


def bits_to_floats(bits, system: FloatSystem) -> list[FloatValue]:
    consts = gadget_values(system)
    return [consts[int(b)] for b in bits]


def floats_to_bits(values) -> str:
    """Decode 0/1 activations; any other value is reported as '?'."""
    out = []
    for v in values:
        out.append("0" if v.value == 0 else "1" if v.value == 1 else "?")
    return "".join(out)


__all__ = [
    "NetworkProgram",
    "bits_to_floats",
    "bnl_to_nn",
    "build_network_program",
    "floats_to_bits",
    "gadget_values",
    "nn_to_bnl",
    "threshold_below_one",
]
