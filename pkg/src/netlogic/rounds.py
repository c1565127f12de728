"""Round maps: the finite descriptions of externally supplied output rounds."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union


@dataclass(frozen=True)
class Explicit:
    rounds: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "rounds", tuple(sorted(set(int(r) for r in self.rounds))))
        if any(r < 0 for r in self.rounds):
            raise ValueError("rounds must be non-negative")

    def contains(self, n: int, key: str = "") -> bool:
        return n in self.rounds

    def upto(self, horizon: int, key: str = "") -> list[int]:
        return [r for r in self.rounds if r <= horizon]


@dataclass(frozen=True)
class Arithmetic:
    start: int
    step: int

    def __post_init__(self):
        if self.step < 1 or self.start < 0:
            raise ValueError("arithmetic round map needs start >= 0 and step >= 1")

    def contains(self, n: int, key: str = "") -> bool:
        return n >= self.start and (n - self.start) % self.step == 0

    def upto(self, horizon: int, key: str = "") -> list[int]:
        return list(range(self.start, horizon + 1, self.step))


@dataclass(frozen=True)
class Affine:
    """Rounds ``scale * r + offset`` for every round ``r`` of ``inner``."""

    scale: int
    offset: int
    inner: RoundMap

    def __post_init__(self):
        if self.scale < 1 or self.offset < 0:
            raise ValueError("affine round map needs scale >= 1 and offset >= 0")

    def contains(self, n: int, key: str = "") -> bool:
        shifted = n - self.offset
        if shifted < 0 or shifted % self.scale:
            return False
        return self.inner.contains(shifted // self.scale, key)

    def upto(self, horizon: int, key: str = "") -> list[int]:
        if horizon < self.offset:
            return []
        inner = self.inner.upto((horizon - self.offset) // self.scale, key)
        return [self.scale * r + self.offset for r in inner]


@dataclass(frozen=True)
class PerInput:
    """Explicit table from input bit-strings to round maps, for small exhaustive cases."""

    table: tuple[tuple[str, RoundMap], ...]

    def _lookup(self, key: str) -> RoundMap:
        for bits, rounds in self.table:
            if bits == key:
                return rounds
        raise KeyError(f"no round map for input {key!r}")

    def contains(self, n: int, key: str = "") -> bool:
        return self._lookup(key).contains(n, key)

    def upto(self, horizon: int, key: str = "") -> list[int]:
        return self._lookup(key).upto(horizon, key)


RoundMap = Union[Explicit, Arithmetic, Affine, PerInput]


def format_round_map(rounds: RoundMap) -> str:
    if isinstance(rounds, Explicit):
        return "explicit:" + ",".join(str(r) for r in rounds.rounds)
    if isinstance(rounds, Arithmetic):
        return f"arith:{rounds.start},{rounds.step}"
    if isinstance(rounds, Affine):
        return f"affine:{rounds.scale},{rounds.offset}({format_round_map(rounds.inner)})"
    raise ValueError("per-input round tables have no text form")


def parse_round_map(text: str) -> RoundMap:
    text = text.strip()
    kind, _, rest = text.partition(":")
    kind = kind.strip()
    if kind == "explicit":
        rest = rest.strip()
        return Explicit(tuple(int(x) for x in rest.split(",") if x.strip()) if rest else ())
    if kind == "arith":
        start, step = (int(x) for x in rest.split(","))
        return Arithmetic(start, step)
    if kind == "affine":
        head, paren, tail = rest.partition("(")
        if not paren or not tail.rstrip().endswith(")"):
            raise ValueError(f"malformed affine round map: {text!r}")
        scale, offset = (int(x) for x in head.split(","))
        return Affine(scale, offset, parse_round_map(tail.rstrip()[:-1]))
    raise ValueError(f"unknown round map kind: {kind!r}")
