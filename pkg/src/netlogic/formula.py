"""Boolean formulas over schema variables: ⊤, variables, negation and conjunction.

Everything else (⊥, ∨, →, ↔) is sugar built from these four node kinds, so
size and depth are always measured on the desugared tree.
"""

from __future__ import annotations

from collections.abc import Callable, Iterable, Iterator, Mapping


class Formula:
    __slots__ = ("_hash",)

    def __and__(self, other: Formula) -> Formula:
        return And(self, other)

    def __or__(self, other: Formula) -> Formula:
        return Or(self, other)

    def __invert__(self) -> Formula:
        return Not(self)

    def __repr__(self) -> str:
        from .syntax import format_formula

        return f"<{format_formula(self)}>"


class _TopType(Formula):
    __slots__ = ()

    def __eq__(self, other):
        return isinstance(other, _TopType)

    def __hash__(self):
        return 0x7F


Top = _TopType()


class Var(Formula):
    __slots__ = ("name",)

    def __init__(self, name: str):
        self.name = name
        self._hash = hash(("v", name))

    def __eq__(self, other):
        return isinstance(other, Var) and other.name == self.name

    def __hash__(self):
        return self._hash


class Not(Formula):
    __slots__ = ("child",)

    def __init__(self, child: Formula):
        self.child = child
        self._hash = hash(("n", hash(child)))

    def __eq__(self, other):
        if self is other:
            return True
        return isinstance(other, Not) and other._hash == self._hash and other.child == self.child

    def __hash__(self):
        return self._hash


class And(Formula):
    __slots__ = ("left", "right")

    def __init__(self, left: Formula, right: Formula):
        self.left = left
        self.right = right
        self._hash = hash(("a", hash(left), hash(right)))

    def __eq__(self, other):
        if self is other:
            return True
        return (
            isinstance(other, And)
            and other._hash == self._hash
            and other.left == self.left
            and other.right == self.right
        )

    def __hash__(self):
        return self._hash


Bot: Formula = Not(Top)


def Or(left: Formula, right: Formula) -> Formula:
    return Not(And(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    return Not(And(left, Not(right)))


def Iff(left: Formula, right: Formula) -> Formula:
    return And(Implies(left, right), Implies(right, left))


def as_or(f: Formula) -> tuple[Formula, Formula] | None:
    """Return the disjuncts if ``f`` has the shape ¬(¬a ∧ ¬b)."""
    if isinstance(f, Not) and isinstance(f.child, And):
        a, b = f.child.left, f.child.right
        if isinstance(a, Not) and isinstance(b, Not):
            return a.child, b.child
    return None


# -- constant-folding constructors used by the compilers -------------------


def is_true(f: Formula) -> bool:
    return f is Top or isinstance(f, _TopType)


def is_false(f: Formula) -> bool:
    return isinstance(f, Not) and isinstance(f.child, _TopType)


def const(value: bool) -> Formula:
    return Top if value else Bot


def neg(f: Formula) -> Formula:
    if isinstance(f, Not):
        return f.child
    return Not(f)


def _balanced(items: list[Formula], join: Callable[[Formula, Formula], Formula]) -> Formula:
    while len(items) > 1:
        paired = [join(items[i], items[i + 1]) for i in range(0, len(items) - 1, 2)]
        if len(items) % 2:
            paired.append(items[-1])
        items = paired
    return items[0]


def conj(*parts: Formula | Iterable[Formula]) -> Formula:
    """Balanced conjunction with ⊤/⊥ folding; the empty conjunction is ⊤."""
    items: list[Formula] = []
    for part in _flatten(parts):
        if is_false(part):
            return Bot
        if not is_true(part):
            items.append(part)
    if not items:
        return Top
    return _balanced(items, And)


def disj(*parts: Formula | Iterable[Formula]) -> Formula:
    """Balanced disjunction with ⊤/⊥ folding; the empty disjunction is ⊥."""
    items: list[Formula] = []
    for part in _flatten(parts):
        if is_true(part):
            return Top
        if not is_false(part):
            items.append(part)
    if not items:
        return Bot
    return _balanced(items, lambda a, b: Not(And(neg(a), neg(b))))


def ite(cond: Formula, then: Formula, other: Formula) -> Formula:
    """(cond ∧ then) ∨ (¬cond ∧ other), folded when cond is constant."""
    if is_true(cond):
        return then
    if is_false(cond):
        return other
    if then == other:
        return then
    return disj(conj(cond, then), conj(neg(cond), other))


def xor(a: Formula, b: Formula) -> Formula:
    return disj(conj(a, neg(b)), conj(neg(a), b))


def _flatten(parts) -> Iterator[Formula]:
    for part in parts:
        if isinstance(part, Formula):
            yield part
        else:
            yield from part


# -- measurement and evaluation ---------------------------------------------


def formula_size(f: Formula) -> int:
    """Occurrences of ⊤, variables, ¬ and ∧ in the tree (shared nodes count per use)."""
    memo: dict[int, int] = {}
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        key = id(node)
        if key in memo:
            continue
        if isinstance(node, Not):
            if expanded:
                memo[key] = 1 + memo[id(node.child)]
            else:
                stack.append((node, True))
                stack.append((node.child, False))
        elif isinstance(node, And):
            if expanded:
                memo[key] = 1 + memo[id(node.left)] + memo[id(node.right)]
            else:
                stack.append((node, True))
                stack.append((node.left, False))
                stack.append((node.right, False))
        else:
            memo[key] = 1
    return memo[id(f)]


def formula_depth(f: Formula) -> int:
    memo: dict[int, int] = {}
    stack: list[tuple[Formula, bool]] = [(f, False)]
    while stack:
        node, expanded = stack.pop()
        key = id(node)
        if key in memo:
            continue
        if isinstance(node, Not):
            if expanded:
                memo[key] = 1 + memo[id(node.child)]
            else:
                stack.append((node, True))
                stack.append((node.child, False))
        elif isinstance(node, And):
            if expanded:
                memo[key] = 1 + max(memo[id(node.left)], memo[id(node.right)])
            else:
                stack.append((node, True))
                stack.append((node.left, False))
                stack.append((node.right, False))
        else:
            memo[key] = 0
    return memo[id(f)]


def variables_of(f: Formula) -> list[str]:
    """Variable names in first-occurrence order (left to right)."""
    seen: dict[str, None] = {}
    visited: set[int] = set()
    stack = [f]
    while stack:
        node = stack.pop()
        if id(node) in visited:
            continue
        visited.add(id(node))
        if isinstance(node, Var):
            seen.setdefault(node.name, None)
        elif isinstance(node, Not):
            stack.append(node.child)
        elif isinstance(node, And):
            stack.append(node.right)
            stack.append(node.left)
    return list(seen)


def evaluate(f: Formula, env: Mapping[str, bool]) -> bool:
    if isinstance(f, Var):
        return bool(env[f.name])
    if isinstance(f, Not):
        return not evaluate(f.child, env)
    if isinstance(f, And):
        return evaluate(f.left, env) and evaluate(f.right, env)
    return True


def substitute(f: Formula, mapping: Mapping[str, Formula]) -> Formula:
    """Replace variables by formulas; unmapped variables stay."""
    memo: dict[int, Formula] = {}

    def visit(node: Formula) -> Formula:
        key = id(node)
        if key in memo:
            return memo[key]
        if isinstance(node, Var):
            result = mapping.get(node.name, node)
        elif isinstance(node, Not):
            child = visit(node.child)
            result = node if child is node.child else Not(child)
        elif isinstance(node, And):
            left, right = visit(node.left), visit(node.right)
            result = node if (left is node.left and right is node.right) else And(left, right)
        else:
            result = node
        memo[key] = result
        return result

    return visit(f)
