"""Rewriting a program so that every iteration body is ⊤, Y, ¬Y or Y∧Z.

Each distinct subformula gets its own predicate. Operands arriving after
different numbers of rounds are padded with delay predicates, so every
original head receives its new value exactly d'+1 rounds after the values it
was computed from. The rewritten program thus runs d'+1 interleaved copies
of the original, and only rounds divisible by d'+1 carry meaningful values.
"""

from __future__ import annotations

import hashlib

from .formula import And, Formula, Not, Top, Var, _TopType, evaluate, variables_of
from .program import BnlProgram, External, make_counter, merge
from .rounds import Affine
from .syntax import format_formula


def is_fully_open(program: BnlProgram) -> bool:
    return all(_is_open_body(program.rules[v]) for v in program.variables)


def _is_open_body(body: Formula) -> bool:
    if isinstance(body, (_TopType, Var)):
        return True
    if isinstance(body, Not):
        return isinstance(body.child, Var)
    if isinstance(body, And):
        return isinstance(body.left, Var) and isinstance(body.right, Var)
    return False


def _digest(text: str) -> str:
    return hashlib.sha1(text.encode()).hexdigest()[:10]


class _Opener:
    def __init__(self, program: BnlProgram):
        self.program = program
        self.taken = set(program.variables)
        self.variables: list[str] = []
        self.terminal: dict[str, bool] = {}
        self.rules: dict[str, Formula] = {}
        self.by_formula: dict[Formula, tuple[str, int]] = {}
        self.delays: dict[tuple[str, int], str] = {}

    def fresh(self, stem: str) -> str:
        name = stem
        while name in self.taken:
            name += "_"
        self.taken.add(name)
        return name

    def add(self, name: str, body: Formula, initial: bool = False) -> None:
        self.variables.append(name)
        self.terminal[name] = initial
        self.rules[name] = body

    def constant(self, value: bool) -> str:
        key = Top if value else Not(Top)
        if key not in self.by_formula:
            name = self.fresh("X_top" if value else "X_bot")
            self.add(name, Var(name), initial=value)
            self.by_formula[key] = (name, -1)
        return self.by_formula[key][0]

    def node(self, f: Formula) -> tuple[str, int]:
        """Predicate holding ``f`` evaluated ``latency`` rounds earlier (-1: constant)."""
        if isinstance(f, Var):
            return f.name, 0
        if f in self.by_formula:
            return self.by_formula[f]
        if not variables_of(f):
            return self.constant(evaluate(f, {})), -1
        if isinstance(f, Not):
            child, lat = self.node(f.child)
            body: Formula = Not(Var(child))
            latency = lat + 1
        else:
            (left, la), (right, lb) = self.node(f.left), self.node(f.right)
            target = max(la, lb)
            left = self.delay(left, la, target)
            right = self.delay(right, lb, target)
            body = And(Var(left), Var(right))
            latency = target + 1
        name = self.fresh("X_" + _digest(format_formula(f)))
        self.add(name, body)
        self.by_formula[f] = (name, latency)
        return name, latency

    def delay(self, name: str, latency: int, target: int) -> str:
        if latency < 0:
            return name
        while latency < target:
            key = (name, latency)
            if key not in self.delays:
                dummy = self.fresh("D_" + _digest(f"{name}@{latency}"))
                self.add(dummy, Var(name))
                self.delays[key] = dummy
            name = self.delays[key]
            latency += 1
        return name


def to_fully_open(program: BnlProgram) -> tuple[BnlProgram, int]:
    """Return the fully-open program and its delay factor d'+1."""
    from .program import measure

    depth = measure(program)[1]
    if depth == 0:
        # every body is already ⊤ or an atom: nothing to open, no counter needed
        return program, 1
    opener = _Opener(program)
    prefix = "T"
    while any(f"{prefix}_{i}" in opener.taken for i in range(depth + 1)):
        prefix += "'"
    counter = make_counter(depth, prefix)
    opener.taken.update(counter.variables)
    last_tick = Var(counter.variables[-1])
    attention = set(program.attention.names)

    rules: dict[str, Formula] = {}
    for head in program.variables:
        body = program.rules[head]
        if isinstance(body, _TopType) and head not in attention:
            rules[head] = Top
            continue
        name, latency = opener.node(body)
        if latency < 0:
            latency = depth
        source = opener.delay(name, latency, depth)
        if head in attention:
            # attention bits only light up on rounds that carry original values
            rules[head] = And(last_tick, Var(source))
        else:
            rules[head] = Var(source)

    new_attention = program.attention
    if isinstance(program.attention, External):
        new_attention = External(Affine(depth + 1, 0, program.attention.rounds))
    base = program.replace(rules=rules, attention=new_attention)
    extra = _fragment(opener)
    return merge(base, extra, counter), depth + 1


def _fragment(opener: _Opener):
    from .program import Fragment

    return Fragment(tuple(opener.variables), opener.terminal, opener.rules)


__all__ = ["is_fully_open", "to_fully_open"]
