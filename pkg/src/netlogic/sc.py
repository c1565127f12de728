"""SC programs: terminal clauses are propositional formulas over p0, p1, ...

The two translations relate SC and BNL. ``sc_to_bnl`` turns propositions into
input predicates and spends one extra round computing the terminal clauses,
so outputs arrive one round later. ``bnl_to_sc`` binds each input predicate to
a proposition and is exact round by round.
"""

from __future__ import annotations

from collections.abc import Mapping
from dataclasses import dataclass, field

from .engine import compile_step
from .formula import (
    Formula,
    Not,
    Top,
    Var,
    evaluate,
    formula_size,
    substitute,
    variables_of,
)
from .program import (
    AttentionSpec,
    Bits,
    BnlProgram,
    Configuration,
    External,
    OutputSequence,
    Predicates,
    ProgramError,
    apply_flag,
    as_bits,
    bits_text,
)
from .rounds import Affine
from .syntax import format_sc_source, is_proposition, parse_sc_source


def _prop_index(name: str) -> int:
    return int(name[1:])


@dataclass(frozen=True)
class ScProgram:
    variables: tuple[str, ...]
    terminal: Mapping[str, Formula]
    rules: Mapping[str, Formula]
    printed: tuple[str, ...] = ()
    attention: AttentionSpec = field(default_factory=lambda: Predicates(()))

    def __post_init__(self):
        object.__setattr__(self, "variables", tuple(self.variables))
        object.__setattr__(self, "printed", tuple(self.printed))
        object.__setattr__(self, "terminal", dict(self.terminal))
        object.__setattr__(self, "rules", dict(self.rules))
        declared = set(self.variables)
        if set(self.rules) != declared or set(self.terminal) != declared:
            raise ProgramError("every SC variable needs exactly one terminal and one iteration clause")
        for name, body in self.terminal.items():
            if any(not is_proposition(v) for v in variables_of(body)):
                raise ProgramError(f"terminal clause for {name!r} must be propositional")
        for name, body in self.rules.items():
            for v in variables_of(body):
                if v not in declared and not is_proposition(v):
                    raise ProgramError(f"rule for {name!r} references undeclared {v!r}")
        for name in tuple(self.printed) + tuple(self.attention.names):
            if name not in declared:
                raise ProgramError(f"unknown variable {name!r} in print/attention")

    @property
    def propositions(self) -> tuple[str, ...]:
        props = set()
        for body in list(self.terminal.values()) + list(self.rules.values()):
            props.update(v for v in variables_of(body) if is_proposition(v))
        return tuple(sorted(props, key=_prop_index))


def parse_sc(text: str) -> ScProgram:
    return ScProgram(*parse_sc_source(text))


def format_sc(program: ScProgram, header: str = "") -> str:
    return format_sc_source(
        program.variables, program.terminal, program.rules, program.printed, program.attention, header
    )


def measure_sc(program: ScProgram) -> int:
    """Size with the same counting as BNL: terminal clauses include their head."""
    return sum(1 + formula_size(program.terminal[v]) + formula_size(program.rules[v]) for v in program.variables)


def run_sc(program: ScProgram, valuation: Bits, horizon: int) -> tuple[list[Configuration], OutputSequence]:
    props = program.propositions
    bits = as_bits(valuation)
    if len(bits) != len(props):
        raise ValueError(f"expected {len(props)} proposition bits, got {len(bits)}")
    env = dict(zip(props, bits))
    state = [int(evaluate(program.terminal[v], env)) for v in program.variables]
    names = list(program.variables) + list(props)
    stepper = compile_step(names, [program.rules[v] for v in program.variables] + [Var(p) for p in props])
    full = state + list(bits)
    configs = [tuple(state)]
    for _ in range(horizon):
        full = stepper(full, 1)
        configs.append(tuple(full[: len(program.variables)]))
    index = {name: i for i, name in enumerate(program.variables)}
    outputs: OutputSequence = []
    for n, config in enumerate(configs):
        if isinstance(program.attention, External):
            fires = program.attention.rounds.contains(n, bits_text(bits))
        else:
            fires = any(config[index[a]] for a in program.attention.names)
        if fires:
            outputs.append((n, bits_text(config[index[p]] for p in program.printed)))
    return configs, outputs


def _fresh(stem: str, taken: set[str]) -> str:
    name = stem
    while name in taken:
        name += "_"
    taken.add(name)
    return name


def sc_to_bnl(program: ScProgram) -> BnlProgram:
    """Inputs become predicates P_i; a flag spends round 0 evaluating the terminal clauses."""
    taken = set(program.variables)
    props = program.propositions
    prop_names = {p: _fresh(f"P{_prop_index(p)}", taken) for p in props}
    flag = _fresh("Tflag", taken)
    renaming = {p: Var(n) for p, n in prop_names.items()}
    rules: dict[str, Formula] = {}
    terminal: dict[str, bool] = {}
    for name in program.variables:
        iteration = substitute(program.rules[name], renaming)
        start = substitute(program.terminal[name], renaming)
        rules[name] = apply_flag(iteration, Var(flag), start)
        terminal[name] = False
    for p in props:
        rules[prop_names[p]] = Var(prop_names[p])
    rules[flag] = Top
    terminal[flag] = False
    attention = program.attention
    if isinstance(attention, External):
        attention = External(Affine(1, 1, attention.rounds))
    variables = tuple(program.variables) + tuple(prop_names[p] for p in props) + (flag,)
    return BnlProgram(variables, terminal, rules, program.printed, attention)


def bnl_to_sc(program: BnlProgram) -> ScProgram:
    """Input predicate number i reads proposition p_i at round 0."""
    terminal: dict[str, Formula] = {}
    position = {name: i for i, name in enumerate(program.inputs)}
    for name in program.variables:
        if name in program.terminal:
            terminal[name] = Top if program.terminal[name] else Not(Top)
        else:
            terminal[name] = Var(f"p{position[name]}")
    return ScProgram(program.variables, terminal, dict(program.rules), program.printed, program.attention)


__all__ = ["ScProgram", "bnl_to_sc", "format_sc", "measure_sc", "parse_sc", "run_sc", "sc_to_bnl"]
