"""Boolean circuits and self-feeding circuits.

Positions are 0-based throughout the API. A self-feeding circuit has as many
outputs as inputs; configuration ``g_{n+1}`` is the circuit applied to ``g_n``.
"""

from __future__ import annotations

import json
import math
import re
import sys
from collections.abc import Mapping, Sequence
from dataclasses import dataclass

from .formula import (
    And,
    Formula,
    Not,
    Top,
    Var,
    _TopType,
    as_or,
    conj,
    disj,
    evaluate,
    formula_size,
    is_false,
    is_true,
    neg,
    variables_of,
)
from .program import (
    Bits,
    BnlProgram,
    Configuration,
    External,
    OutputSequence,
    Predicates,
    as_bits,
    bits_text,
    make_counter,
)
from .rounds import Affine, RoundMap, format_round_map, parse_round_map

LABELS = ("AND", "OR", "NOT", "INPUT")


@dataclass(frozen=True)
class Gate:
    id: str
    label: str
    inputs: tuple[str, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        if self.label not in LABELS:
            raise ValueError(f"unknown gate label {self.label!r}")
        if self.label == "NOT" and len(self.inputs) != 1:
            raise ValueError(f"NOT gate {self.id!r} needs fan-in 1")
        if self.label == "INPUT" and self.inputs:
            raise ValueError(f"INPUT gate {self.id!r} cannot have fan-in")


@dataclass(frozen=True)
class Circuit:
    gates: tuple[Gate, ...]
    input_order: tuple[str, ...]
    output_order: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        object.__setattr__(self, "input_order", tuple(self.input_order))
        object.__setattr__(self, "output_order", tuple(self.output_order))
        by_id = {}
        for g in self.gates:
            if g.id in by_id:
                raise ValueError(f"duplicate gate id {g.id!r}")
            by_id[g.id] = g
        for g in self.gates:
            for src in g.inputs:
                if src not in by_id:
                    raise ValueError(f"gate {g.id!r} reads unknown gate {src!r}")
        inputs = [g.id for g in self.gates if g.label == "INPUT"]
        if sorted(inputs) != sorted(self.input_order):
            raise ValueError("input order must list exactly the INPUT gates")
        for out in self.output_order:
            if out not in by_id:
                raise ValueError(f"unknown output gate {out!r}")
        object.__setattr__(self, "_order", _topological(self.gates, by_id))
        object.__setattr__(self, "_by_id", by_id)

    def gate(self, gid: str) -> Gate:
        return self._by_id[gid]

    @property
    def size(self) -> int:
        return len(self.gates)

    @property
    def edges(self) -> int:
        return sum(len(g.inputs) for g in self.gates)

    @property
    def max_fan_in(self) -> int:
        return max((len(g.inputs) for g in self.gates), default=0)

    def heights(self) -> dict[str, int]:
        """Longest path counted in non-input gates; INPUT gates sit at 0, constants at 1."""
        height: dict[str, int] = {}
        for gid in self._order:
            g = self._by_id[gid]
            height[gid] = 0 if g.label == "INPUT" else 1 + max((height[s] for s in g.inputs), default=0)
        return height

    @property
    def depth(self) -> int:
        h = self.heights()
        return max((h[o] for o in self.output_order), default=0)

    def evaluate_words(self, words: Sequence[int], mask: int) -> list[int]:
        """Bit-parallel evaluation: one integer per input gate, one per output gate."""
        value: dict[str, int] = dict(zip(self.input_order, words))
        for gid in self._order:
            g = self._by_id[gid]
            if g.label == "INPUT":
                continue
            if g.label == "NOT":
                value[gid] = mask ^ value[g.inputs[0]]
            elif g.label == "AND":
                acc = mask
                for s in g.inputs:
                    acc &= value[s]
                value[gid] = acc
            else:
                acc = 0
                for s in g.inputs:
                    acc |= value[s]
                value[gid] = acc
        return [value[o] for o in self.output_order]

    def evaluate(self, bits: Bits) -> tuple[int, ...]:
        row = as_bits(bits)
        if len(row) != len(self.input_order):
            raise ValueError("input length does not match the circuit")
        return tuple(self.evaluate_words(list(row), 1))


def _topological(gates, by_id) -> list[str]:
    order: list[str] = []
    state: dict[str, int] = {}
    for root in gates:
        if root.id in state:
            continue
        stack = [(root.id, 0)]
        while stack:
            gid, i = stack.pop()
            if i == 0:
                if state.get(gid) == 2:
                    continue
                if state.get(gid) == 1:
                    raise ValueError(f"circuit has a cycle through {gid!r}")
                state[gid] = 1
            children = by_id[gid].inputs
            if i < len(children):
                stack.append((gid, i + 1))
                child = children[i]
                if state.get(child) == 1:
                    raise ValueError(f"circuit has a cycle through {child!r}")
                if state.get(child) != 2:
                    stack.append((child, 0))
            else:
                state[gid] = 2
                order.append(gid)
    return order


@dataclass(frozen=True)
class SelfFeedingCircuit:
    circuit: Circuit
    input_positions: tuple[int, ...]
    init: Mapping[int, int]
    printed: tuple[int, ...]
    attention: tuple[int, ...] = ()
    rounds: RoundMap | None = None

    def __post_init__(self):
        k = len(self.circuit.input_order)
        if len(self.circuit.output_order) != k:
            raise ValueError("a self-feeding circuit needs as many outputs as inputs")
        object.__setattr__(self, "input_positions", tuple(self.input_positions))
        object.__setattr__(self, "printed", tuple(self.printed))
        object.__setattr__(self, "attention", tuple(self.attention))
        object.__setattr__(self, "init", {int(p): int(b) for p, b in self.init.items()})
        for p in self.input_positions + self.printed + self.attention:
            if not 0 <= p < k:
                raise ValueError(f"position {p} outside [0, {k})")
        aux = set(range(k)) - set(self.input_positions)
        if set(self.init) != aux:
            raise ValueError("initialising function must cover exactly the auxiliary positions")

    @property
    def k(self) -> int:
        return len(self.circuit.input_order)

    def initial(self, bits: Sequence[int]) -> list[int]:
        config = [0] * self.k
        for p, b in zip(self.input_positions, bits):
            config[p] = b
        for p, b in self.init.items():
            config[p] = b
        return config


def run_self_feeding(
    sfc: SelfFeedingCircuit, input_bits: Bits, horizon: int
) -> tuple[list[Configuration], OutputSequence]:
    bits = as_bits(input_bits)
    if len(bits) != len(sfc.input_positions):
        raise ValueError(f"expected {len(sfc.input_positions)} input bits, got {len(bits)}")
    config = sfc.initial(bits)
    configs = [tuple(config)]
    for _ in range(horizon):
        config = sfc.circuit.evaluate_words(config, 1)
        configs.append(tuple(config))
    key = bits_text(bits)
    outputs: OutputSequence = []
    for n, c in enumerate(configs):
        fires = sfc.rounds.contains(n, key) if sfc.rounds is not None else any(c[a] for a in sfc.attention)
        if fires:
            outputs.append((n, bits_text(c[p] for p in sfc.printed)))
    return configs, outputs


# -- parity family ------------------------------------------------------------


def parity_circuit(n: int) -> SelfFeedingCircuit:
    """Self-feeding parity: XOR over disjoint pairs each round until one bit is left.

    Positions 0..n-1 carry the data bits, position n the attention bit ``a``.
    """
    if n < 1:
        raise ValueError("parity circuit needs n >= 1")
    k = max(1, math.ceil(math.log2(n)))
    width = 2**k
    gates: list[Gate] = [Gate(f"x{i}", "INPUT") for i in range(1, n + 1)] + [Gate("a", "INPUT")]
    gates += [Gate(f"x{i}", "OR") for i in range(n + 1, width + 1)]
    negated = {}
    for i in range(1, n + 1):
        negated[i] = f"nx{i}"
        gates.append(Gate(f"nx{i}", "NOT", (f"x{i}",)))

    def neg_of(i: int) -> str:
        if i not in negated:
            negated[i] = f"nx{i}"
            gates.append(Gate(f"nx{i}", "NOT", (f"x{i}",)))
        return negated[i]

    outputs = []
    for i in range(1, n + 1):
        if i <= width // 2:
            left, right = 2 * i - 1, 2 * i
            gates.append(Gate(f"l{i}", "AND", (f"x{left}", neg_of(right))))
            gates.append(Gate(f"r{i}", "AND", (neg_of(left), f"x{right}")))
            gates.append(Gate(f"o{i}", "OR", (f"l{i}", f"r{i}")))
        else:
            padding = (f"x{n + 1}",) if n < width else ()
            gates.append(Gate(f"o{i}", "OR", padding))
        outputs.append(f"o{i}")
    gates.append(Gate("single", "AND", tuple(["x1"] + [negated[i] for i in range(2, n + 1)])))
    gates.append(Gate("zero", "AND", tuple(negated[i] for i in range(1, n + 1))))
    gates.append(Gate("o", "OR", ("a", "single", "zero")))
    outputs.append("o")
    circuit = Circuit(tuple(gates), tuple(f"x{i}" for i in range(1, n + 1)) + ("a",), tuple(outputs))
    return SelfFeedingCircuit(circuit, tuple(range(n)), {n: 0}, (0,), (n,))


# -- formula balancing -----------------------------------------------------------


def _tree_sizes(f: Formula) -> dict[int, int]:
    sizes: dict[int, int] = {}
    stack = [(f, False)]
    while stack:
        node, done = stack.pop()
        if id(node) in sizes:
            continue
        if isinstance(node, Not):
            if done:
                sizes[id(node)] = 1 + sizes[id(node.child)]
            else:
                stack += [(node, True), (node.child, False)]
        elif isinstance(node, And):
            if done:
                sizes[id(node)] = 1 + sizes[id(node.left)] + sizes[id(node.right)]
            else:
                stack += [(node, True), (node.left, False), (node.right, False)]
        else:
            sizes[id(node)] = 1
    return sizes


def _fold(f: Formula, target: Formula | None = None, value: bool = False) -> Formula:
    """Rebuild ``f`` with the node ``target`` (by identity) replaced by a constant, folding constants."""
    memo: dict[int, Formula] = {}

    def visit(node: Formula) -> Formula:
        if node is target:
            return Top if value else Not(Top)
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Not):
            child = visit(node.child)
            if is_true(child):
                result = Not(Top)
            elif is_false(child):
                result = Top
            else:
                result = node if child is node.child else Not(child)
        elif isinstance(node, And):
            left, right = visit(node.left), visit(node.right)
            if is_false(left) or is_false(right):
                result = Not(Top)
            elif is_true(left):
                result = right
            elif is_true(right):
                result = left
            else:
                result = node if (left is node.left and right is node.right) else And(left, right)
        else:
            result = node
        memo[key] = result
        return result

    return visit(f)


def _separator(f: Formula, sizes: dict[int, int]) -> Formula:
    total = sizes[id(f)]
    node = f
    while sizes[id(node)] > 2 * total / 3:
        if isinstance(node, Not):
            node = node.child
        elif isinstance(node, And):
            node = node.left if sizes[id(node.left)] >= sizes[id(node.right)] else node.right
        else:
            break
    return node


def balanced_formula(f: Formula, leaf_size: int = 4) -> Formula:
    """Equivalent formula of depth O(log size), by conditioning on a 1/3-2/3 separator."""
    f = _fold(f)
    sizes = _tree_sizes(f)
    if sizes[id(f)] <= leaf_size:
        return f
    sep = _separator(f, sizes)
    if sep is f:
        # a negation chain: peel one layer
        if isinstance(f, Not):
            return neg(balanced_formula(f.child, leaf_size))
        return conj(balanced_formula(f.left, leaf_size), balanced_formula(f.right, leaf_size))
    cond = balanced_formula(sep, leaf_size)
    when_true = balanced_formula(_fold(f, sep, True), leaf_size)
    when_false = balanced_formula(_fold(f, sep, False), leaf_size)
    return disj(conj(cond, when_true), conj(neg(cond), when_false))


class _GateBuilder:
    def __init__(self, prefix: str = "g"):
        self.prefix = prefix
        self.gates: list[Gate] = []
        self.cache: dict[tuple, str] = {}

    def gate(self, label: str, inputs: tuple[str, ...]) -> str:
        key = (label, inputs)
        if key not in self.cache:
            gid = f"{self.prefix}{len(self.gates)}"
            self.gates.append(Gate(gid, label, inputs))
            self.cache[key] = gid
        return self.cache[key]

    def from_formula(self, f: Formula, leaves: Mapping[str, str], use_or: bool = True) -> str:
        memo: dict[int, str] = {}
        limit = sys.getrecursionlimit()
        sys.setrecursionlimit(max(limit, 200000))

        def visit(node: Formula) -> str:
            key = id(node)
            if key in memo:
                return memo[key]
            pair = as_or(node) if use_or else None
            if isinstance(node, Var):
                result = leaves[node.name]
            elif isinstance(node, _TopType):
                result = self.gate("AND", ())
            elif pair is not None:
                result = self.gate("OR", (visit(pair[0]), visit(pair[1])))
            elif isinstance(node, Not):
                if isinstance(node.child, _TopType):
                    result = self.gate("OR", ())
                else:
                    result = self.gate("NOT", (visit(node.child),))
            else:
                result = self.gate("AND", (visit(node.left), visit(node.right)))
            memo[key] = result
            return result

        try:
            return visit(f)
        finally:
            sys.setrecursionlimit(limit)


def balance_formula(f: Formula) -> Circuit:
    """Single-output circuit with fan-in ≤ 2 and depth O(log size) computing ``f``."""
    names = variables_of(f)
    builder = _GateBuilder()
    leaves = {}
    for name in names:
        leaves[name] = f"in_{name}"
        builder.gates.append(Gate(f"in_{name}", "INPUT"))
    out = builder.from_formula(balanced_formula(f), leaves)
    return Circuit(tuple(builder.gates), tuple(leaves[n] for n in names), (out,))


# -- BNL <-> circuits --------------------------------------------------------------


def bnl_to_circuit(program: BnlProgram, mode: str = "direct") -> SelfFeedingCircuit:
    """One input gate per variable; each rule body becomes the subcircuit of its output."""
    if mode not in ("direct", "balanced"):
        raise ValueError("mode must be 'direct' or 'balanced'")
    builder = _GateBuilder()
    leaves = {}
    for name in program.variables:
        leaves[name] = f"in_{name}"
        builder.gates.append(Gate(f"in_{name}", "INPUT"))
    outputs = []
    for name in program.variables:
        body = program.rules[name]
        if mode == "balanced":
            outputs.append(builder.from_formula(balanced_formula(body), leaves))
        else:
            outputs.append(builder.from_formula(body, leaves, use_or=False))
    circuit = Circuit(tuple(builder.gates), tuple(leaves[n] for n in program.variables), tuple(outputs))
    index = {name: i for i, name in enumerate(program.variables)}
    init = {index[n]: int(v) for n, v in program.terminal.items()}
    inputs = tuple(index[n] for n in program.inputs)
    printed = tuple(index[n] for n in program.printed)
    if isinstance(program.attention, External):
        return SelfFeedingCircuit(circuit, inputs, init, printed, (), program.attention.rounds)
    attention = tuple(index[n] for n in program.attention.names)
    return SelfFeedingCircuit(circuit, inputs, init, printed, attention)


_SAFE = re.compile(r"[^A-Za-z0-9_]")


def circuit_to_bnl(sfc: SelfFeedingCircuit) -> tuple[BnlProgram, int]:
    """Asynchronously equivalent program; returns it with its delay factor D+1.

    Input-gate predicates are pulsed: they carry g_m on rounds m(D+1) and are
    false in between, so print and attention can read them directly. A gate of
    height h latches on tick h-1 and holds its value for the rest of the
    period. Reads of input gates from above height 1 go through chains of
    fan-in-1 AND pads, which is the height uniformisation this needs.
    """
    c = sfc.circuit
    # keep only gates that can reach an output
    live: set[str] = set()
    stack = list(c.output_order)
    while stack:
        gid = stack.pop()
        if gid in live:
            continue
        live.add(gid)
        stack.extend(c.gate(gid).inputs)
    live.update(c.input_order)
    height = c.heights()
    depth = max((height[o] for o in c.output_order), default=0)

    def pred(gid: str) -> str:
        return "G_" + _SAFE.sub("_", gid)

    names = {gid: pred(gid) for gid in live}
    if len(set(names.values())) != len(names):
        names = {gid: f"G{i}" for i, gid in enumerate(sorted(live))}
    taken = set(names.values())

    def fresh(stem: str) -> str:
        name = stem
        while name in taken:
            name += "_"
        taken.add(name)
        return name

    prefix = "T"
    while any(f"{prefix}_{i}" in taken for i in range(depth + 1)):
        prefix += "'"
    counter = make_counter(depth, prefix)
    tick = [Var(t) for t in counter.variables]

    variables: list[str] = []
    terminal: dict[str, bool] = {}
    rules: dict[str, Formula] = {}

    def latched(name: str, h: int, body: Formula) -> None:
        variables.append(name)
        terminal[name] = False
        rules[name] = disj(conj(tick[h - 1], body), conj(neg(tick[h - 1]), Var(name)))

    pads: dict[tuple[str, int], str] = {}

    def at_height(gid: str, h: int) -> str:
        """Predicate holding gate ``gid``'s value from round h of each period."""
        name = names[gid]
        if c.gate(gid).label != "INPUT" or h <= 1:
            return name
        key = (gid, h)
        if key not in pads:
            below = at_height(gid, h - 1)
            pad = fresh(f"{name}_pad{h - 1}")
            pads[key] = pad
            latched(pad, h - 1, Var(below))
        return pads[key]

    def body_of(g: Gate, h: int) -> Formula:
        args = [Var(at_height(s, h)) for s in g.inputs]
        if g.label == "AND":
            return conj(args)
        if g.label == "OR":
            return disj(args)
        return neg(args[0])

    input_names = [names[g] for g in c.input_order]
    for gid in c._order:
        g = c.gate(gid)
        if gid in live and g.label != "INPUT":
            latched(names[gid], height[gid], body_of(g, height[gid]))

    # a latched gate holds its value until its next latch, which comes after tick D
    rules_in: dict[str, Formula] = {}
    for j, gid in enumerate(c.output_order):
        rules_in[input_names[j]] = conj(tick[depth], Var(at_height(gid, depth + 1)))
    var_order = input_names + variables + list(counter.variables)
    all_rules = {**rules_in, **rules, **counter.rules}
    all_terminal = {**terminal, **counter.terminal}
    for p, b in sfc.init.items():
        all_terminal[input_names[p]] = bool(b)
    printed = tuple(input_names[p] for p in sfc.printed)
    if sfc.rounds is not None:
        attention = External(Affine(depth + 1, 0, sfc.rounds))
    else:
        attention = Predicates(tuple(input_names[p] for p in sfc.attention))
    program = BnlProgram(tuple(var_order), all_terminal, all_rules, printed, attention)
    return program, depth + 1


# -- structured file format ---------------------------------------------------------


def circuit_to_json(sfc: SelfFeedingCircuit) -> str:
    data = {
        "gates": [{"id": g.id, "label": g.label, "inputs": list(g.inputs)} for g in sfc.circuit.gates],
        "input_order": list(sfc.circuit.input_order),
        "output_order": list(sfc.circuit.output_order),
        "input_positions": list(sfc.input_positions),
        "init": {str(p): b for p, b in sorted(sfc.init.items())},
        "print": list(sfc.printed),
    }
    if sfc.rounds is not None:
        data["rounds"] = format_round_map(sfc.rounds)
    else:
        data["attention"] = list(sfc.attention)
    return json.dumps(data, indent=1)


def circuit_from_json(text: str) -> SelfFeedingCircuit:
    data = json.loads(text)
    gates = tuple(Gate(g["id"], g["label"], tuple(g.get("inputs", ()))) for g in data["gates"])
    circuit = Circuit(gates, tuple(data["input_order"]), tuple(data["output_order"]))
    rounds = parse_round_map(data["rounds"]) if "rounds" in data else None
    return SelfFeedingCircuit(
        circuit,
        tuple(data["input_positions"]),
        {int(p): int(b) for p, b in data.get("init", {}).items()},
        tuple(data.get("print", ())),
        tuple(data.get("attention", ())),
        rounds,
    )


def formula_truth_table(f: Formula, names: Sequence[str]) -> list[int]:
    rows = []
    for mask in range(2 ** len(names)):
        env = {n: (mask >> i) & 1 for i, n in enumerate(names)}
        rows.append(int(evaluate(f, env)))
    return rows


def circuit_truth_table(c: Circuit) -> list[list[int]]:
    n = len(c.input_order)
    rows = []
    for mask in range(2**n):
        rows.append(list(c.evaluate([(mask >> i) & 1 for i in range(n)])))
    return rows


__all__ = [
    "Circuit",
    "Gate",
    "SelfFeedingCircuit",
    "balance_formula",
    "balanced_formula",
    "bnl_to_circuit",
    "circuit_from_json",
    "circuit_to_bnl",
    "circuit_to_json",
    "formula_size",
    "parity_circuit",
    "run_self_feeding",
]
