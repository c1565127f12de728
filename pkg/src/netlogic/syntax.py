"""Text formats: ``.bnl`` programs, ``.sc`` programs and formula expressions.

Clause syntax::

    % comment
    #print a,b
    #attention a         (or: #rounds arith:0,2)
    X(0) :- T.
    X :- !X & (Y | F).

Operators by binding strength: ``!``, ``&``, ``|``, ``->``, ``<->``.
"""

from __future__ import annotations

import re
import sys
from dataclasses import dataclass

from .formula import And, Formula, Iff, Implies, Not, Or, Top, Var, _TopType, as_or
from .program import BnlProgram, External, Predicates, ProgramError
from .rounds import format_round_map, parse_round_map

NAME = r"[A-Za-z_][A-Za-z0-9_']*"
_TOKEN = re.compile(rf"\s*(?:(<->|->|:-|[!&|().]|\d+)|({NAME})|(\S))")
_PROP = re.compile(r"p\d+$")


class ParseError(ProgramError):
    pass


def _tokenize(text: str) -> list[str]:
    tokens = []
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            break
        if m.group(3):
            raise ParseError(f"unexpected character {m.group(3)!r}")
        tokens.append(m.group(1) or m.group(2))
        pos = m.end()
    return tokens


class _FormulaParser:
    def __init__(self, tokens: list[str]):
        self.tokens = tokens
        self.pos = 0

    def peek(self) -> str | None:
        return self.tokens[self.pos] if self.pos < len(self.tokens) else None

    def take(self, expected: str | None = None) -> str:
        tok = self.peek()
        if tok is None or (expected is not None and tok != expected):
            raise ParseError(f"expected {expected or 'token'}, found {tok!r}")
        self.pos += 1
        return tok

    def parse(self) -> Formula:
        result = self.iff()
        if self.peek() is not None:
            raise ParseError(f"unexpected token {self.peek()!r}")
        return result

    def iff(self) -> Formula:
        left = self.implies()
        while self.peek() == "<->":
            self.take()
            left = Iff(left, self.implies())
        return left

    def implies(self) -> Formula:
        left = self.disjunction()
        if self.peek() == "->":
            self.take()
            return Implies(left, self.implies())
        return left

    def disjunction(self) -> Formula:
        left = self.conjunction()
        while self.peek() == "|":
            self.take()
            left = Or(left, self.conjunction())
        return left

    def conjunction(self) -> Formula:
        left = self.unary()
        while self.peek() == "&":
            self.take()
            left = And(left, self.unary())
        return left

    def unary(self) -> Formula:
        tok = self.peek()
        if tok == "!":
            self.take()
            return Not(self.unary())
        if tok == "(":
            self.take()
            inner = self.iff()
            self.take(")")
            return inner
        if tok == "T":
            self.take()
            return Top
        if tok == "F":
            self.take()
            return Not(Top)
        if tok is None or not re.fullmatch(NAME, tok):
            raise ParseError(f"expected a formula, found {tok!r}")
        self.take()
        return Var(tok)


def parse_formula(text: str) -> Formula:
    return _FormulaParser(_tokenize(text)).parse()


def format_formula(f: Formula) -> str:
    limit = sys.getrecursionlimit()
    sys.setrecursionlimit(max(limit, 200000))
    try:
        return _fmt(f, "top")
    finally:
        sys.setrecursionlimit(limit)


_OR_PARENS = {"or_right", "and_left", "and_right", "not"}
_AND_PARENS = {"and_right", "not"}


def _fmt(f: Formula, context: str) -> str:
    if isinstance(f, _TopType):
        return "T"
    if isinstance(f, Var):
        return f.name
    if isinstance(f, Not) and isinstance(f.child, _TopType):
        return "F"
    pair = as_or(f)
    if pair is not None:
        text = f"{_fmt(pair[0], 'or_left')} | {_fmt(pair[1], 'or_right')}"
        return f"({text})" if context in _OR_PARENS else text
    if isinstance(f, Not):
        return "!" + _fmt(f.child, "not")
    text = f"{_fmt(f.left, 'and_left')} & {_fmt(f.right, 'and_right')}"
    return f"({text})" if context in _AND_PARENS else text


@dataclass
class _Source:
    heads: list[str]
    terminal: dict[str, Formula]
    rules: dict[str, Formula]
    printed: list[str] | None
    attention_names: list[str] | None
    rounds: str | None


def _split_source(text: str) -> _Source:
    body_lines = []
    printed = attention = rounds = None
    for raw in text.splitlines():
        line = raw.split("%", 1)[0].strip()
        if not line:
            continue
        if line.startswith("#"):
            word, _, rest = line[1:].partition(" ")
            names = [n.strip() for n in rest.split(",") if n.strip()]
            if word == "print":
                printed = names
            elif word == "attention":
                attention = names
            elif word == "rounds":
                rounds = rest.strip()
            else:
                raise ParseError(f"unknown directive #{word}")
            continue
        body_lines.append(line)
    heads: list[str] = []
    terminal: dict[str, Formula] = {}
    rules: dict[str, Formula] = {}
    tokens = _tokenize(" ".join(body_lines))
    clause: list[str] = []
    for tok in tokens:
        if tok != ".":
            clause.append(tok)
            continue
        if not clause:
            raise ParseError("empty clause")
        _add_clause(clause, heads, terminal, rules)
        clause = []
    if clause:
        raise ParseError("clause not terminated by '.'")
    if not heads:
        raise ParseError("no clauses")
    return _Source(heads, terminal, rules, printed, attention, rounds)


def _add_clause(clause, heads, terminal, rules) -> None:
    name = clause[0]
    if not re.fullmatch(NAME, name) or name in ("T", "F"):
        raise ParseError(f"bad head predicate {name!r}")
    if clause[1:5] == ["(", "0", ")", ":-"] or clause[1:4] == ["(", "0", ")"]:
        if clause[1:5] != ["(", "0", ")", ":-"]:
            raise ParseError(f"terminal clause for {name!r} lacks ':-'")
        if name in terminal:
            raise ParseError(f"duplicate terminal clause for {name!r}")
        body = _FormulaParser(clause[5:]).parse()
        terminal[name] = body
    elif len(clause) > 1 and clause[1] == ":-":
        if name in rules:
            raise ParseError(f"duplicate rule for {name!r}")
        rules[name] = _FormulaParser(clause[2:]).parse()
    else:
        raise ParseError(f"malformed clause starting at {name!r}")
    if name not in heads:
        heads.append(name)


def _attention(src: _Source, declared: set[str]):
    if src.rounds is not None and src.attention_names is not None:
        raise ParseError("both #attention and #rounds given")
    if src.rounds is not None:
        try:
            return External(parse_round_map(src.rounds))
        except ValueError as exc:
            raise ParseError(str(exc)) from exc
    names = src.attention_names or []
    for n in names:
        if n not in declared:
            raise ParseError(f"#attention names unknown variable {n!r}")
    return Predicates(tuple(names))


def _check_print(src: _Source, declared: set[str]) -> tuple[str, ...]:
    names = src.printed or []
    for n in names:
        if n not in declared:
            raise ParseError(f"#print names unknown variable {n!r}")
    return tuple(names)


def parse_program(text: str) -> BnlProgram:
    src = _split_source(text)
    declared = set(src.heads)
    for name in src.heads:
        if name not in src.rules:
            raise ParseError(f"no iteration clause for {name!r}")
    terminal = {}
    for name, body in src.terminal.items():
        if isinstance(body, _TopType):
            terminal[name] = True
        elif isinstance(body, Not) and isinstance(body.child, _TopType):
            terminal[name] = False
        else:
            raise ParseError(f"terminal clause for {name!r} must be T or F")
    program = BnlProgram(
        variables=tuple(src.heads),
        terminal=terminal,
        rules=src.rules,
        printed=_check_print(src, declared),
        attention=_attention(src, declared),
    )
    try:
        program.check_references()
    except ProgramError as exc:
        raise ParseError(str(exc)) from exc
    return program


def _directives(printed, attention) -> list[str]:
    lines = ["#print " + ",".join(printed)]
    if isinstance(attention, External):
        lines.append("#rounds " + format_round_map(attention.rounds))
    else:
        lines.append("#attention " + ",".join(attention.names))
    return lines


def format_program(program: BnlProgram, header: str = "") -> str:
    lines = [f"% {line}" for line in header.splitlines()]
    lines += _directives(program.printed, program.attention)
    for name in program.variables:
        if name in program.terminal:
            lines.append(f"{name}(0) :- {'T' if program.terminal[name] else 'F'}.")
        lines.append(f"{name} :- {format_formula(program.rules[name])}.")
    return "\n".join(lines) + "\n"


pretty = format_program


# -- SC programs --------------------------------------------------------------


def is_proposition(name: str) -> bool:
    return bool(_PROP.fullmatch(name))


def parse_sc_source(text: str):
    """Parse ``.sc`` text into the pieces of an SC program (see :mod:`netlogic.sc`)."""
    src = _split_source(text)
    for name in src.heads:
        if is_proposition(name):
            raise ParseError(f"proposition {name!r} used as a head predicate")
        if name not in src.rules:
            raise ParseError(f"no iteration clause for {name!r}")
        if name not in src.terminal:
            raise ParseError(f"no terminal clause for {name!r}")
    declared = set(src.heads)
    from .formula import variables_of

    for name, body in src.terminal.items():
        for v in variables_of(body):
            if not is_proposition(v):
                raise ParseError(f"terminal clause for {name!r} mentions non-proposition {v!r}")
    for name, body in src.rules.items():
        for v in variables_of(body):
            if v not in declared and not is_proposition(v):
                raise ParseError(f"rule for {name!r} references undeclared {v!r}")
    return (
        tuple(src.heads),
        dict(src.terminal),
        dict(src.rules),
        _check_print(src, declared),
        _attention(src, declared),
    )


def format_sc_source(variables, terminal, rules, printed, attention, header: str = "") -> str:
    lines = [f"% {line}" for line in header.splitlines()]
    lines += _directives(printed, attention)
    for name in variables:
        lines.append(f"{name}(0) :- {format_formula(terminal[name])}.")
        lines.append(f"{name} :- {format_formula(rules[name])}.")
    return "\n".join(lines) + "\n"
