"""General recurrent neural networks over a floating-point system S(p, q, β).

Every node updates synchronously:
``g_{t+1}(v) = act_v(b_v + Σ g_t(u) · w_(u,v))`` with each product rounded
first and the sum aggregated in a configurable order (rounded after every
addition). Input nodes differ only in taking their round-0 value from the
input instead of ``init``.
"""

from __future__ import annotations

import json
import random
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from pathlib import Path

from .program import External
from .rounds import format_round_map, parse_round_map
from .softfloat import (
    FloatSystem,
    FloatValue,
    PiecewisePolynomial,
    balanced_reduce,
    eval_piecewise,
    fp_add,
    fp_compare,
    fp_mul,
    heaviside_pieces,
    parse_float,
    relu_pieces,
)

AGGREGATIONS = ("balanced", "left")


def identity_pieces(system: FloatSystem) -> PiecewisePolynomial:
    return PiecewisePolynomial(system, (), ((system.zero(), system.one()),))


NAMED_ACTIVATIONS = {"relu": relu_pieces, "heaviside": heaviside_pieces, "identity": identity_pieces}


@dataclass(frozen=True)
class Node:
    id: str
    bias: FloatValue
    activation: PiecewisePolynomial
    init: FloatValue | None = None


@dataclass(frozen=True)
class Edge:
    source: str
    target: str
    weight: FloatValue


@dataclass(frozen=True)
class Threshold:
    node: str
    value: FloatValue


@dataclass(frozen=True)
class NeuralNetwork:
    system: FloatSystem
    nodes: tuple[Node, ...]
    edges: tuple[Edge, ...]
    inputs: tuple[str, ...]
    outputs: tuple[str, ...]
    attention: tuple[Threshold, ...] | External = ()
    aggregation: str = "balanced"
    _index: dict = field(default=None, init=False, repr=False, compare=False)
    _incoming: dict = field(default=None, init=False, repr=False, compare=False)

    def __post_init__(self):
        for name in ("nodes", "edges", "inputs", "outputs"):
            object.__setattr__(self, name, tuple(getattr(self, name)))
        if not isinstance(self.attention, External):
            object.__setattr__(self, "attention", tuple(self.attention))
        object.__setattr__(self, "_index", {n.id: i for i, n in enumerate(self.nodes)})
        incoming: dict[str, list[Edge]] = {}
        for e in self.edges:
            incoming.setdefault(e.target, []).append(e)
        for edges in incoming.values():
            edges.sort(key=lambda e: self._index.get(e.source, -1))
        object.__setattr__(self, "_incoming", incoming)

    def node(self, node_id: str) -> Node:
        return self.nodes[self._index[node_id]]

    def in_edges(self, node_id: str) -> list[Edge]:
        """Incoming edges ordered by their source's position in the node order."""
        return list(self._incoming.get(node_id, ()))

    @property
    def degree(self) -> int:
        return max((len(self.in_edges(n.id)) for n in self.nodes), default=0)

    @property
    def piece_size(self) -> int:
        return max((n.activation.pieces for n in self.nodes), default=1)

    @property
    def order(self) -> int:
        return max((n.activation.order for n in self.nodes), default=0)


class NetworkError(ValueError):
    pass


def validate(network: NeuralNetwork) -> list[str]:
    """Diagnostics for every violated invariant; empty when the network is well formed."""
    problems: list[str] = []
    s = network.system
    ids = [n.id for n in network.nodes]
    known = set(ids)
    if len(known) != len(ids):
        problems.append("duplicate node ids")
    if network.aggregation not in AGGREGATIONS:
        problems.append(f"unknown aggregation {network.aggregation!r}")

    def check_value(what: str, value) -> None:
        if not isinstance(value, FloatValue):
            problems.append(f"{what} is not a float value")
        elif value.system != s:
            problems.append(f"{what} belongs to {value.system}, not {s}")

    for n in network.nodes:
        check_value(f"bias of {n.id}", n.bias)
        if n.activation.system != s:
            problems.append(f"activation of {n.id} belongs to a different system")
        if n.id not in network.inputs:
            if n.init is None:
                problems.append(f"node {n.id} has no initial value")
            else:
                check_value(f"initial value of {n.id}", n.init)
    seen_pairs = set()
    for e in network.edges:
        label = f"edge {e.source}->{e.target}"
        for end in (e.source, e.target):
            if end not in known:
                problems.append(f"{label} references undeclared node {end!r}")
        if (e.source, e.target) in seen_pairs:
            problems.append(f"{label} is declared twice")
        seen_pairs.add((e.source, e.target))
        check_value(f"weight of {label}", e.weight)
    for group, names in (("input", network.inputs), ("output", network.outputs)):
        for name in names:
            if name not in known:
                problems.append(f"{group} node {name!r} is not declared")
    if len(set(network.inputs)) != len(network.inputs):
        problems.append("input nodes listed twice")
    if not isinstance(network.attention, External):
        for t in network.attention:
            if t.node not in known:
                problems.append(f"attention node {t.node!r} is not declared")
            check_value(f"threshold of {t.node}", t.value)
    return problems


def _require_valid(network: NeuralNetwork) -> None:
    problems = validate(network)
    if problems:
        raise NetworkError("; ".join(problems))


NetworkState = dict[str, FloatValue]


def aggregate(values: Sequence[FloatValue], order: str) -> FloatValue:
    if order == "left":
        total = values[0]
        for v in values[1:]:
            total = fp_add(total, v)
        return total
    return balanced_reduce(values, fp_add)


def step_network(network: NeuralNetwork, state: Mapping[str, FloatValue], memo: dict | None = None) -> NetworkState:
    """One synchronous update; ``memo`` caches node results by (node, incoming values)."""
    new: NetworkState = {}
    for n in network.nodes:
        edges = network.in_edges(n.id)
        incoming = tuple(state[e.source] for e in edges)
        key = (n.id, incoming)
        if memo is not None and key in memo:
            new[n.id] = memo[key]
            continue
        terms = [n.bias] + [fp_mul(v, e.weight) for v, e in zip(incoming, edges)]
        new[n.id] = eval_piecewise(n.activation, aggregate(terms, network.aggregation))
        if memo is not None:
            memo[key] = new[n.id]
    return new


def initial_state(network: NeuralNetwork, inputs: Sequence[FloatValue]) -> NetworkState:
    if len(inputs) != len(network.inputs):
        raise ValueError(f"expected {len(network.inputs)} input values, got {len(inputs)}")
    given = dict(zip(network.inputs, inputs))
    state = {}
    for n in network.nodes:
        value = given[n.id] if n.id in given else n.init
        if value.system != network.system:
            raise ValueError(f"value for {n.id} belongs to a different system")
        state[n.id] = value
    return state


def fires(network: NeuralNetwork, state: Mapping[str, FloatValue], round_no: int, key: str = "") -> bool:
    if isinstance(network.attention, External):
        return network.attention.rounds.contains(round_no, key)
    return any(fp_compare(state[t.node], t.value) > 0 for t in network.attention)


def input_key(inputs: Sequence[FloatValue]) -> str:
    return ",".join(str(v) for v in inputs)


def simulate(
    network: NeuralNetwork, inputs: Sequence[FloatValue], horizon: int
) -> tuple[list[NetworkState], list[tuple[int, tuple[FloatValue, ...]]]]:
    """States g_0..g_horizon and the output sequence within the horizon."""
    _require_valid(network)
    state = initial_state(network, inputs)
    states = [state]
    memo: dict = {}
    for _ in range(horizon):
        state = step_network(network, state, memo)
        states.append(state)
    key = input_key(inputs)
    outputs = [
        (t, tuple(s[o] for o in network.outputs)) for t, s in enumerate(states) if fires(network, s, t, key)
    ]
    return states, outputs


def _pieces_to_json(pieces: PiecewisePolynomial):
    for name, make in NAMED_ACTIVATIONS.items():
        if make(pieces.system) == pieces:
            return name
    return {
        "breakpoints": [str(t) for t in pieces.breakpoints],
        "polynomials": [[str(c) for c in coeffs] for coeffs in pieces.polynomials],
    }


def _pieces_from_json(data, system: FloatSystem) -> PiecewisePolynomial:
    if isinstance(data, str):
        if data not in NAMED_ACTIVATIONS:
            raise NetworkError(f"unknown activation {data!r}; expected one of {sorted(NAMED_ACTIVATIONS)} or a piece table")
        return NAMED_ACTIVATIONS[data](system)
    return PiecewisePolynomial(
        system,
        tuple(parse_float(t, system) for t in data.get("breakpoints", [])),
        tuple(tuple(parse_float(c, system) for c in coeffs) for coeffs in data["polynomials"]),
    )


def network_to_json(network: NeuralNetwork) -> dict:
    s = network.system
    if isinstance(network.attention, External):
        attention = {"rounds": format_round_map(network.attention.rounds)}
    else:
        attention = [{"node": t.node, "threshold": str(t.value)} for t in network.attention]
    return {
        "system": [s.p, s.q, s.beta],
        "aggregation": network.aggregation,
        "nodes": [
            {
                "id": n.id,
                "bias": str(n.bias),
                "activation": _pieces_to_json(n.activation),
                **({"init": str(n.init)} if n.init is not None else {}),
            }
            for n in network.nodes
        ],
        "edges": [{"from": e.source, "to": e.target, "weight": str(e.weight)} for e in network.edges],
        "inputs": list(network.inputs),
        "outputs": list(network.outputs),
        "attention": attention,
    }


def network_from_json(data: dict) -> NeuralNetwork:
    try:
        system = FloatSystem(*data["system"])
        nodes = tuple(
            Node(
                n["id"],
                parse_float(n.get("bias", str(FloatSystem(*data["system"]).zero())), system),
                _pieces_from_json(n.get("activation", "identity"), system),
                parse_float(n["init"], system) if "init" in n else None,
            )
            for n in data["nodes"]
        )
        edges = tuple(Edge(e["from"], e["to"], parse_float(e["weight"], system)) for e in data.get("edges", []))
        raw_attention = data.get("attention", [])
        if isinstance(raw_attention, dict):
            attention: tuple | External = External(parse_round_map(raw_attention["rounds"]))
        else:
            attention = tuple(Threshold(a["node"], parse_float(a["threshold"], system)) for a in raw_attention)
        return NeuralNetwork(
            system,
            nodes,
            edges,
            tuple(data.get("inputs", [])),
            tuple(data.get("outputs", [])),
            attention,
            data.get("aggregation", "balanced"),
        )
    except (KeyError, TypeError) as exc:
        raise NetworkError(f"malformed network description: {exc}") from exc


def load_network(path: str | Path) -> NeuralNetwork:
    return network_from_json(json.loads(Path(path).read_text()))


def save_network(network: NeuralNetwork, path: str | Path) -> None:
    Path(path).write_text(json.dumps(network_to_json(network), indent=2) + "\n")


def random_pieces(rng: random.Random, system: FloatSystem, max_pieces: int, max_order: int) -> PiecewisePolynomial:
    count = rng.randint(1, max_pieces)
    values = system.values()
    breakpoints = sorted(set(rng.sample(values, count - 1)), key=lambda v: v.value)
    polys = []
    for _ in range(len(breakpoints) + 1):
        order = rng.randint(0, max_order)
        polys.append(tuple(system.random_value(rng, zero_weight=0.2) for _ in range(order + 1)))
    return PiecewisePolynomial(system, tuple(breakpoints), tuple(polys))


def random_network(
    rng: random.Random,
    system: FloatSystem,
    nodes: int,
    max_degree: int,
    max_pieces: int = 2,
    max_order: int = 2,
    inputs: int | None = None,
    outputs: int | None = None,
    aggregation: str = "balanced",
    threshold_attention: bool = True,
) -> NeuralNetwork:
    """A random recurrent network; activations alternate between named ones and random piece tables."""
    ids = [f"n{i}" for i in range(nodes)]
    n_in = inputs if inputs is not None else rng.randint(1, max(1, nodes // 2))
    n_out = outputs if outputs is not None else rng.randint(1, max(1, nodes // 2))
    node_list = []
    for i, node_id in enumerate(ids):
        choice = rng.random()
        if choice < 0.3:
            act = relu_pieces(system)
        elif choice < 0.4:
            act = heaviside_pieces(system)
        else:
            act = random_pieces(rng, system, max_pieces, max_order)
        init = None if i < n_in else system.random_value(rng)
        node_list.append(Node(node_id, system.random_value(rng, zero_weight=0.2), act, init))
    edges = []
    for target in ids:
        for source in rng.sample(ids, rng.randint(0, min(max_degree, nodes))):
            edges.append(Edge(source, target, system.random_value(rng, zero_weight=0.0)))
    if threshold_attention:
        attention: tuple | External = tuple(
            Threshold(node_id, system.random_value(rng)) for node_id in rng.sample(ids, rng.randint(1, min(2, nodes)))
        )
    else:
        attention = External(parse_round_map("arith:0,1"))
    return NeuralNetwork(
        system, tuple(node_list), tuple(edges), tuple(ids[:n_in]), tuple(rng.sample(ids, n_out)), attention, aggregation
    )


__all__ = [
    "AGGREGATIONS",
    "NAMED_ACTIVATIONS",
    "Edge",
    "NetworkError",
    "NetworkState",
    "NeuralNetwork",
    "Node",
    "Threshold",
    "aggregate",
    "identity_pieces",
    "initial_state",
    "load_network",
    "network_from_json",
    "network_to_json",
    "random_network",
    "save_network",
    "simulate",
    "step_network",
    "validate",
]
