"""Bit-parallel simulation of BNL programs.

A program is compiled once into a Python step function whose state is one
integer per variable; bit ``b`` of every integer belongs to input case ``b``.
Running a batch of inputs therefore costs about as much as running one.
"""

from __future__ import annotations

import sys
from collections.abc import Sequence
from typing import TYPE_CHECKING

from .formula import And, Not, Var, _TopType, as_or

if TYPE_CHECKING:
    from .program import BnlProgram

_MAX_NEST = 40


def _use_counts(bodies) -> dict[int, int]:
    counts: dict[int, int] = {}
    stack = list(bodies)
    while stack:
        node = stack.pop()
        if isinstance(node, (Var, _TopType)):
            continue
        key = id(node)
        seen = counts.get(key, 0)
        counts[key] = seen + 1
        if seen:
            continue
        if isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, And):
            stack.append(node.left)
            stack.append(node.right)
    return counts


def compile_step(variables: Sequence[str], bodies: Sequence) -> callable:
    """Generate ``step(state, M) -> state`` for the given rule bodies."""
    index = {name: i for i, name in enumerate(variables)}
    counts = _use_counts(bodies)
    lines: list[str] = []
    hoisted: dict[int, str] = {}

    def emit(node) -> tuple[str, int]:
        if isinstance(node, Var):
            return f"v{index[node.name]}", 0
        if isinstance(node, _TopType):
            return "M", 0
        key = id(node)
        if key in hoisted:
            return hoisted[key], 0
        pair = as_or(node)
        if pair is not None:
            (a, na), (b, nb) = emit(pair[0]), emit(pair[1])
            expr, nest = f"({a} | {b})", max(na, nb) + 1
        elif isinstance(node, Not):
            if isinstance(node.child, _TopType):
                return "0", 0
            a, na = emit(node.child)
            expr, nest = f"(M ^ {a})", na + 1
        elif isinstance(node.right, Not):
            (a, na), (b, nb) = emit(node.left), emit(node.right.child)
            expr, nest = f"({a} & ~{b})", max(na, nb) + 1
        else:
            (a, na), (b, nb) = emit(node.left), emit(node.right)
            expr, nest = f"({a} & {b})", max(na, nb) + 1
        if counts.get(key, 0) > 1 or nest > _MAX_NEST:
            name = f"t{len(hoisted)}"
            lines.append(f"    {name} = {expr}")
            hoisted[key] = name
            return name, 0
        return expr, nest

    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 200000))
    try:
        results = [emit(body)[0] for body in bodies]
    finally:
        sys.setrecursionlimit(limit)
    names = ", ".join(f"v{i}" for i in range(len(variables)))
    source = ["def step(state, M):"]
    if variables:
        source.append(f"    {names}, = state")
    source.extend(lines)
    source.append(f"    return [{', '.join(results)}]")
    namespace: dict = {}
    exec(compile("\n".join(source), "<bnl-step>", "exec"), namespace)
    return namespace["step"]


class Simulator:
    """Batch simulator for one program; build via :func:`simulator_for`."""

    def __init__(self, program: BnlProgram):
        self.program = program
        self.index = {name: i for i, name in enumerate(program.variables)}
        self.inputs = program.inputs
        self._step = compile_step(program.variables, [program.rules[v] for v in program.variables])

    def initial_state(self, inputs: Sequence[Sequence[int]]) -> list[int]:
        width = len(inputs)
        mask = (1 << width) - 1
        position = {name: j for j, name in enumerate(self.inputs)}
        state = []
        for name in self.program.variables:
            if name in self.program.terminal:
                state.append(mask if self.program.terminal[name] else 0)
            else:
                j = position[name]
                word = 0
                for b, bits in enumerate(inputs):
                    if bits[j]:
                        word |= 1 << b
                state.append(word)
        return state

    def step(self, state: list[int], mask: int) -> list[int]:
        return self._step(state, mask)

    def trajectory(self, inputs: Sequence[Sequence[int]], horizon: int) -> list[list[int]]:
        mask = (1 << len(inputs)) - 1
        state = self.initial_state(inputs)
        states = [state]
        for _ in range(horizon):
            state = self._step(state, mask)
            states.append(state)
        return states

    def attention_word(self, state: list[int]) -> int:
        word = 0
        for name in self.program.attention.names:
            word |= state[self.index[name]]
        return word


def column(state: Sequence[int], b: int) -> tuple[int, ...]:
    """Configuration of input case ``b`` extracted from a batch state."""
    return tuple((word >> b) & 1 for word in state)


def simulator_for(program: BnlProgram) -> Simulator:
    sim = program.__dict__.get("_simulator")
    if sim is None:
        sim = Simulator(program)
        object.__setattr__(program, "_simulator", sim)
    return sim
