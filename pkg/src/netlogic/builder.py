"""Staged construction of halting BNL programs.

Input predicates keep their value (``X :- X``). Every other predicate gets
terminal ⊥ and a body over earlier predicates; its *level* is one more than
the deepest level it reads. Because the inputs never change, a predicate of
level ℓ holds its final value from round ℓ on, so a program whose deepest
level is L sits at a fixed point from round L. A saturating timer chain of
length L raises the attention predicate exactly then.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .formula import Formula, Top, Var, is_false, is_true, variables_of
from .program import BnlProgram, Predicates


@dataclass
class Compiled:
    """A compiled program plus named registers for inspecting intermediate values."""

    program: BnlProgram
    output_round: int
    registers: dict[str, object] = field(default_factory=dict)


class Builder:
    def __init__(self):
        self.variables: list[str] = []
        self.terminal: dict[str, bool] = {}
        self.rules: dict[str, Formula] = {}
        self.level: dict[str, int] = {}
        self.registers: dict[str, object] = {}
        self._stems: dict[str, int] = {}

    def fresh(self, stem: str) -> str:
        if stem not in self.rules and stem not in self._stems:
            self._stems[stem] = 0
            return stem
        n = self._stems.get(stem, 0)
        while True:
            n += 1
            name = f"{stem}_{n}"
            if name not in self.rules:
                self._stems[stem] = n
                return name

    def input(self, name: str) -> Var:
        if name in self.rules:
            raise ValueError(f"duplicate predicate {name!r}")
        self.variables.append(name)
        self.rules[name] = Var(name)
        self.level[name] = 0
        return Var(name)

    def level_of(self, f: Formula) -> int:
        return max((self.level[v] for v in variables_of(f)), default=0)

    def define(self, stem: str, f: Formula, force: bool = False) -> Formula:
        """Materialise ``f`` as a predicate; constants and bare variables are returned as is."""
        if not force and (is_true(f) or is_false(f) or isinstance(f, Var)):
            return f
        name = self.fresh(stem)
        self.variables.append(name)
        self.terminal[name] = False
        self.rules[name] = f
        self.level[name] = 1 + self.level_of(f)
        return Var(name)

    @property
    def depth(self) -> int:
        return max(self.level.values(), default=0)

    def finish(self, printed: list[str], stem: str = "tick") -> tuple[BnlProgram, int]:
        """Add the timer chain and return the program with its output round."""
        rounds = max(self.depth, 1)
        previous: Formula = Top
        for i in range(1, rounds + 1):
            name = self.fresh(f"{stem}{i}")
            self.variables.append(name)
            self.terminal[name] = False
            self.rules[name] = previous
            self.level[name] = i
            previous = Var(name)
        program = BnlProgram(
            tuple(self.variables), self.terminal, self.rules, tuple(printed), Predicates((previous.name,))
        )
        return program, rounds
