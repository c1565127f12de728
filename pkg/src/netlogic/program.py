"""BNL programs: data model, synchronous semantics, measurement and dynamics."""

from __future__ import annotations

from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field
from typing import Union

from .engine import column, simulator_for
from .formula import (
    And,
    Formula,
    Not,
    Or,
    Var,
    formula_depth,
    formula_size,
    variables_of,
)
from .rounds import RoundMap

Bits = Union[str, Sequence[int]]
Configuration = tuple[int, ...]
OutputSequence = list[tuple[int, str]]


@dataclass(frozen=True)
class Predicates:
    names: tuple[str, ...]

    def __post_init__(self):
        object.__setattr__(self, "names", tuple(self.names))


@dataclass(frozen=True)
class External:
    rounds: RoundMap

    names = ()


AttentionSpec = Union[Predicates, External]


class ProgramError(ValueError):
    pass


@dataclass(frozen=True)
class BnlProgram:
    variables: tuple[str, ...]
    terminal: Mapping[str, bool]
    rules: Mapping[str, Formula]
    printed: tuple[str, ...] = ()
    attention: AttentionSpec = field(default_factory=lambda: Predicates(()))

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "printed", tuple(self.printed))
        object.__setattr__(self, "terminal", {k: bool(v) for k, v in self.terminal.items()})
        object.__setattr__(self, "rules", dict(self.rules))
        declared = set(self.variables)
        if len(declared) != len(self.variables):
            raise ProgramError("duplicate variable")
        if set(self.rules) != declared:
            missing = declared - set(self.rules)
            extra = set(self.rules) - declared
            raise ProgramError(f"rules/variables mismatch: missing {sorted(missing)}, extra {sorted(extra)}")
        if not set(self.terminal) <= declared:
            raise ProgramError(f"terminal clause for undeclared {sorted(set(self.terminal) - declared)}")
        for name in self.printed:
            if name not in declared:
                raise ProgramError(f"print names unknown variable {name!r}")
        for name in self.attention.names:
            if name not in declared:
                raise ProgramError(f"attention names unknown variable {name!r}")

    @property
    def inputs(self) -> tuple[str, ...]:
        return tuple(v for v in self.variables if v not in self.terminal)

    def check_references(self) -> None:
        declared = set(self.variables)
        for head, body in self.rules.items():
            for name in variables_of(body):
                if name not in declared:
                    raise ProgramError(f"rule for {head!r} references undeclared {name!r}")

    def replace(self, **changes) -> BnlProgram:
        fields = dict(
            variables=self.variables,
            terminal=self.terminal,
            rules=self.rules,
            printed=self.printed,
            attention=self.attention,
        )
        fields.update(changes)
        return BnlProgram(**fields)


@dataclass(frozen=True)
class DynamicsReport:
    transient: int
    kind: str  # "fixed point" or "cycle"
    cycle_length: int

    @property
    def is_fixed_point(self) -> bool:
        return self.cycle_length == 1


def as_bits(bits: Bits) -> tuple[int, ...]:
    if isinstance(bits, str):
        if any(ch not in "01" for ch in bits):
            raise ValueError(f"not a bit-string: {bits!r}")
        return tuple(int(ch) for ch in bits)
    return tuple(int(bool(b)) for b in bits)


def bits_text(bits: Sequence[int]) -> str:
    return "".join("1" if b else "0" for b in bits)


def step(program: BnlProgram, config: Sequence[int]) -> Configuration:
    if len(config) != len(program.variables):
        raise ValueError("configuration length does not match the program")
    sim = simulator_for(program)
    state = [1 if b else 0 for b in config]
    return tuple(sim.step(state, 1))


def initial_configuration(program: BnlProgram, input_bits: Bits) -> Configuration:
    bits = as_bits(input_bits)
    if len(bits) != len(program.inputs):
        raise ValueError(f"expected {len(program.inputs)} input bits, got {len(bits)}")
    return column(simulator_for(program).initial_state([bits]), 0)


def outputs_from(program: BnlProgram, configs: Sequence[Configuration], key: str = "") -> OutputSequence:
    index = {name: i for i, name in enumerate(program.variables)}
    printed = [index[name] for name in program.printed]
    attention = program.attention
    result: OutputSequence = []
    for n, config in enumerate(configs):
        if isinstance(attention, External):
            fires = attention.rounds.contains(n, key)
        else:
            fires = any(config[index[name]] for name in attention.names)
        if fires:
            result.append((n, bits_text(config[i] for i in printed)))
    return result


def run(program: BnlProgram, input_bits: Bits, horizon: int) -> tuple[list[Configuration], OutputSequence]:
    """Configurations g_0..g_horizon and the output sequence within that window."""
    bits = as_bits(input_bits)
    if len(bits) != len(program.inputs):
        raise ValueError(f"expected {len(program.inputs)} input bits, got {len(bits)}")
    if horizon < 0:
        raise ValueError("horizon must be non-negative")
    states = simulator_for(program).trajectory([bits], horizon)
    configs = [column(s, 0) for s in states]
    return configs, outputs_from(program, configs, bits_text(bits))


def run_batch(
    program: BnlProgram, inputs: Sequence[Bits], horizon: int
) -> list[tuple[list[Configuration], OutputSequence]]:
    """:func:`run` for many inputs at once, sharing one bit-parallel simulation."""
    rows = [as_bits(b) for b in inputs]
    if not rows:
        return []
    for bits in rows:
        if len(bits) != len(program.inputs):
            raise ValueError(f"expected {len(program.inputs)} input bits, got {len(bits)}")
    states = simulator_for(program).trajectory(rows, horizon)
    results = []
    for b, bits in enumerate(rows):
        configs = [column(s, b) for s in states]
        results.append((configs, outputs_from(program, configs, bits_text(bits))))
    return results


def batch_outputs(
    program: BnlProgram, inputs: Sequence[Bits], horizon: int, max_outputs: int | None = None
) -> list[OutputSequence]:
    """Output sequences only, for many inputs; stops once every case has ``max_outputs`` emissions."""
    rows = [as_bits(b) for b in inputs]
    if not rows:
        return []
    for bits in rows:
        if len(bits) != len(program.inputs):
            raise ValueError(f"expected {len(program.inputs)} input bits, got {len(bits)}")
    sim = simulator_for(program)
    keys = [bits_text(bits) for bits in rows]
    mask = (1 << len(rows)) - 1
    printed = [sim.index[name] for name in program.printed]
    attention = program.attention
    results: list[OutputSequence] = [[] for _ in rows]
    pending = set(range(len(rows)))
    state = sim.initial_state(rows)
    for n in range(horizon + 1):
        if n:
            state = sim.step(state, mask)
        if isinstance(attention, External):
            firing = [b for b in pending if attention.rounds.contains(n, keys[b])]
        else:
            word = sim.attention_word(state)
            firing = [b for b in pending if (word >> b) & 1]
        for b in firing:
            results[b].append((n, "".join(str((state[i] >> b) & 1) for i in printed)))
            if max_outputs is not None and len(results[b]) >= max_outputs:
                pending.discard(b)
        if not pending:
            break
    return results


def measure(program: BnlProgram) -> tuple[int, int]:
    """(size, depth): terminal clauses count their head and body, iteration clauses their body."""
    size = 0
    for name in program.variables:
        if name in program.terminal:
            size += 1 + (1 if program.terminal[name] else 2)
        size += formula_size(program.rules[name])
    depth = max((formula_depth(program.rules[v]) for v in program.variables), default=0)
    return size, depth


def analyze_dynamics(program: BnlProgram, input_bits: Bits) -> DynamicsReport:
    bits = as_bits(input_bits)
    sim = simulator_for(program)
    state = sim.initial_state([bits])
    seen: dict[tuple[int, ...], int] = {}
    n = 0
    while True:
        key = tuple(state)
        if key in seen:
            first = seen[key]
            length = n - first
            return DynamicsReport(first, "fixed point" if length == 1 else "cycle", length)
        seen[key] = n
        state = sim.step(state, 1)
        n += 1


def fixed_point_mask(program: BnlProgram, state: list[int], mask: int) -> int:
    """Bits of the batch whose configuration is unchanged by one more step."""
    after = simulator_for(program).step(state, mask)
    moved = 0
    for a, b in zip(state, after):
        moved |= a ^ b
    return mask & ~moved


# -- program fragments -------------------------------------------------------


@dataclass(frozen=True)
class Fragment:
    """Clauses meant to be merged into a larger program."""

    variables: tuple[str, ...]
    terminal: Mapping[str, bool]
    rules: Mapping[str, Formula]


def make_counter(n: int, prefix: str = "T") -> Fragment:
    """One-hot ring T_0..T_n: T_0 starts true and the token moves one step per round."""
    if n < 0:
        raise ValueError("counter length must be non-negative")
    names = tuple(f"{prefix}_{i}" for i in range(n + 1))
    terminal = {name: i == 0 for i, name in enumerate(names)}
    rules = {names[0]: Var(names[-1])}
    for i in range(1, n + 1):
        rules[names[i]] = Var(names[i - 1])
    return Fragment(names, terminal, rules)


def apply_flag(body: Formula, flag: Formula, backup: Formula) -> Formula:
    """(flag ∧ body) ∨ (¬flag ∧ backup), without constant folding."""
    return Or(And(flag, body), And(Not(flag), backup))


def merge(program: BnlProgram, *fragments: Fragment, **changes) -> BnlProgram:
    variables = list(program.variables)
    terminal = dict(program.terminal)
    rules = dict(program.rules)
    for frag in fragments:
        for name in frag.variables:
            if name in rules:
                raise ProgramError(f"fragment redefines {name!r}")
            variables.append(name)
        terminal.update(frag.terminal)
        rules.update(frag.rules)
    return program.replace(variables=tuple(variables), terminal=terminal, rules=rules, **changes)


__all__ = [
    "AttentionSpec",
    "BnlProgram",
    "DynamicsReport",
    "External",
    "Fragment",
    "Predicates",
    "ProgramError",
    "analyze_dynamics",
    "apply_flag",
    "as_bits",
    "bits_text",
    "fixed_point_mask",
    "initial_configuration",
    "make_counter",
    "measure",
    "merge",
    "outputs_from",
    "run",
    "run_batch",
    "step",
]
