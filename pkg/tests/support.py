"""Shared helpers: batch runs of halting programs and small fixtures."""

from __future__ import annotations

from dataclasses import dataclass

from netlogic.engine import simulator_for
from netlogic.program import BnlProgram, fixed_point_mask


@dataclass
class HaltingRun:
    outputs: list[str]
    first_output_round: list[int | None]
    fixed_at_output: list[bool]
    moving_before_output: list[bool]


def run_halting(program: BnlProgram, rows: list[str], output_round: int) -> HaltingRun:
    """Run every row to ``output_round`` and record where attention first fires and whether the state is fixed."""
    sim = simulator_for(program)
    bits = [[int(c) for c in row] for row in rows]
    mask = (1 << len(rows)) - 1
    state = sim.initial_state(bits)
    first: list[int | None] = [None] * len(rows)
    previous = None
    for n in range(output_round + 1):
        if n:
            previous, state = state, sim.step(state, mask)
        word = sim.attention_word(state)
        for b in range(len(rows)):
            if first[b] is None and (word >> b) & 1:
                first[b] = n
    fixed = fixed_point_mask(program, state, mask)
    moved = 0
    if previous is not None:
        for a, c in zip(previous, state):
            moved |= a ^ c
    printed = [sim.index[name] for name in program.printed]
    outputs = ["".join(str((state[i] >> b) & 1) for i in printed) for b in range(len(rows))]
    return HaltingRun(
        outputs,
        first,
        [bool((fixed >> b) & 1) for b in range(len(rows))],
        [bool((moved >> b) & 1) for b in range(len(rows))],
    )


def assert_halts_at(run: HaltingRun, output_round: int) -> None:
    """The halting contract: the fixed point is reached exactly at the first output round."""
    assert all(r == output_round for r in run.first_output_round), set(run.first_output_round)
    assert all(run.fixed_at_output)
    assert output_round == 0 or all(run.moving_before_output)
