"""Seeded random formulas and programs for property suites and the verify command."""

from __future__ import annotations

import random
from collections.abc import Sequence

from .formula import And, Bot, Formula, Not, Or, Top, Var
from .program import BnlProgram, External, Predicates, measure
from .rounds import Arithmetic, Explicit
from .sc import ScProgram


def random_formula(rng: random.Random, names: Sequence[str], depth: int, constants: float = 0.05) -> Formula:
    """A random formula over ``names`` with nesting at most ``depth`` connectives."""
    if depth <= 0 or rng.random() < 0.25:
        if not names or rng.random() < constants:
            return rng.choice([Top, Bot])
        return Var(rng.choice(names))
    kind = rng.random()
    if kind < 0.25:
        return Not(random_formula(rng, names, depth - 1, constants))
    left = random_formula(rng, names, depth - 1, constants)
    right = random_formula(rng, names, depth - 1, constants)
    return And(left, right) if kind < 0.65 else Or(left, right)


def _pick_attention(rng: random.Random, variables: Sequence[str], external: float):
    if rng.random() < external:
        if rng.random() < 0.5:
            return External(Arithmetic(rng.randint(0, 2), rng.randint(1, 3)))
        return External(Explicit(tuple(sorted(rng.sample(range(12), 4)))))
    return Predicates(tuple(rng.sample(list(variables), rng.randint(1, min(2, len(variables))))))


def random_program(
    rng: random.Random,
    variables: int = 6,
    inputs: int = 2,
    depth: int = 3,
    max_size: int | None = None,
    external: float = 0.2,
) -> BnlProgram:
    """Random BNL program; retries until the size limit (if any) is met."""
    inputs = min(inputs, variables)
    while True:
        names = [f"X{i}" for i in range(variables)]
        input_names = set(rng.sample(names, inputs))
        terminal = {n: rng.random() < 0.5 for n in names if n not in input_names}
        rules = {n: random_formula(rng, names, rng.randint(0, depth)) for n in names}
        printed = tuple(rng.sample(names, rng.randint(1, min(3, variables))))
        program = BnlProgram(tuple(names), terminal, rules, printed, _pick_attention(rng, names, external))
        if max_size is None or measure(program)[0] <= max_size:
            return program


def random_sc_program(
    rng: random.Random, variables: int = 5, propositions: int = 3, depth: int = 3, external: float = 0.2
) -> ScProgram:
    names = [f"X{i}" for i in range(variables)]
    props = [f"p{i}" for i in range(propositions)]
    terminal = {n: random_formula(rng, props, rng.randint(0, 2)) for n in names}
    rules = {n: random_formula(rng, names + props, rng.randint(0, depth)) for n in names}
    printed = tuple(rng.sample(names, rng.randint(1, min(3, variables))))
    return ScProgram(tuple(names), terminal, rules, printed, _pick_attention(rng, names, external))


__all__ = ["random_formula", "random_program", "random_sc_program"]
