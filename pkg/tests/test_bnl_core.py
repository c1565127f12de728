import itertools
import random

import pytest
from hypothesis import given
from hypothesis import strategies as st

from netlogic.formula import (
    And,
    Not,
    Or,
    Top,
    Var,
    conj,
    disj,
    evaluate,
    formula_depth,
    formula_size,
    neg,
    xor,
)
from netlogic.fully_open import is_fully_open, to_fully_open
from netlogic.generators import random_formula, random_program
from netlogic.program import (
    BnlProgram,
    External,
    Predicates,
    ProgramError,
    analyze_dynamics,
    apply_flag,
    batch_outputs,
    make_counter,
    measure,
    run,
    run_batch,
    step,
)
from netlogic.rounds import (
    Affine,
    Arithmetic,
    Explicit,
    PerInput,
    format_round_map,
    parse_round_map,
)
from netlogic.syntax import (
    ParseError,
    format_formula,
    format_program,
    parse_formula,
    parse_program,
)

EXAMPLE = "X(0):-T. Y:-Y&X. X:-!X."


def example():
    return parse_program(EXAMPLE + "\n#print X,Y\n#attention X")


def test_parse_example():
    p = parse_program(EXAMPLE)
    assert p.variables == ("X", "Y")
    assert p.inputs == ("Y",)
    assert p.terminal == {"X": True}
    assert p.rules["Y"] == And(Var("Y"), Var("X"))


@pytest.mark.parametrize(
    "text, message",
    [
        ("", "no clauses"),
        ("X:-X. X:-Y.", "duplicate rule"),
        ("X(0):-Y&T. X:-X.", "must be T or F"),
        ("X:-Z.", "undeclared"),
        ("X:-X.\n#print Q", "unknown variable"),
        ("X:-X.\n#attention Q", "unknown variable"),
        ("X(0):-T. X(0):-F. X:-X.", "duplicate terminal"),
    ],
)
def test_parse_errors(text, message):
    with pytest.raises(ParseError, match=message):
        parse_program(text)


def test_step_examples():
    p = example()
    assert step(p, (1, 1)) == (0, 1)
    assert step(p, (0, 1)) == (1, 0)
    ident = parse_program("A:-A. B:-B. C(0):-F. C:-C.")
    for config in itertools.product((0, 1), repeat=3):
        assert step(ident, config) == config


def test_run_example():
    configs, outputs = run(example(), "1", 3)
    assert configs == [(1, 1), (0, 1), (1, 0), (0, 0)]
    assert outputs == [(0, "11"), (2, "10")]


def test_round_zero_forced_output():
    p = parse_program("A(0):-T. A:-!A. B:-B.\n#print A,B\n#rounds explicit:0")
    assert run(p, "0", 5)[1] == [(0, "10")]


def test_measure_examples():
    assert measure(parse_program(EXAMPLE)) == (7, 1)
    assert measure(parse_program("X:-X."))[1] == 0
    assert measure(parse_program("X:-!(Y&Z). Y:-Y. Z:-Z."))[1] == 2


def test_sugar_measured_after_desugaring():
    assert formula_size(parse_formula("a | b")) == formula_size(Not(And(Not(Var("a")), Not(Var("b")))))
    assert formula_size(parse_formula("F")) == 2


def test_dynamics_examples():
    assert analyze_dynamics(parse_program("X:-X."), "1").kind == "fixed point"
    report = analyze_dynamics(parse_program("X(0):-F. X:-!X."), "")
    assert (report.transient, report.cycle_length, report.kind) == (0, 2, "cycle")


def test_counter_cycles():
    frag = make_counter(2)
    prog = BnlProgram(frag.variables, frag.terminal, frag.rules, frag.variables)
    configs, _ = run(prog, "", 4)
    assert [c.index(1) for c in configs] == [0, 1, 2, 0, 1]
    assert all(sum(c) == 1 for c in configs)


def test_apply_flag_semantics():
    f = apply_flag(Var("b"), Var("f"), Var("c"))
    for fv, bv, cv in itertools.product((0, 1), repeat=3):
        assert evaluate(f, {"f": fv, "b": bv, "c": cv}) == (bv if fv else cv)


def test_fully_open_example_shape():
    p = parse_program("B(0):-F. C(0):-T. A(0):-F. A:-!B&C. B:-B. C:-C.\n#print A\n#attention A")
    q, delay = to_fully_open(p)
    assert delay == 3
    assert is_fully_open(q)
    assert not is_fully_open(p)
    want = run(p, "", 6)[1]
    got = run(q, "", 18)[1]
    assert got == [(3 * n, out) for n, out in want]


def test_fully_open_trivial():
    p = parse_program("A(0):-T. B(0):-F. A:-B. B:-A.\n#print A\n#attention A")
    q, delay = to_fully_open(p)
    assert delay == 1
    assert is_fully_open(q)
    assert run(q, "", 6)[1] == run(p, "", 6)[1]


def test_external_attention_scaled_by_opening():
    p = parse_program("X(0):-T. Y:-Y&X. X:-!X.\n#print X,Y\n#rounds arith:0,1")
    q, delay = to_fully_open(p)
    assert isinstance(q.attention, External)
    for bits in "01":
        assert run(q, bits, 4 * delay)[1] == [(delay * n, out) for n, out in run(p, bits, 4)[1]]


def test_round_maps():
    assert Explicit((3, 0, 7)).upto(5) == [0, 3]
    assert Arithmetic(2, 3).upto(10) == [2, 5, 8]
    scaled = Affine(4, 1, Arithmetic(0, 2))
    assert [n for n in range(20) if scaled.contains(n)] == [1, 9, 17]
    per = PerInput((("01", Explicit((1,))), ("11", Explicit((2,)))))
    assert per.contains(1, "01") and per.contains(2, "11") and not per.contains(1, "11")
    with pytest.raises(KeyError):
        per.contains(0, "00")
    for m in (Explicit((0, 3)), Arithmetic(1, 2), Affine(3, 0, Explicit((1,)))):
        assert parse_round_map(format_round_map(m)) == m


def test_formula_folding():
    x, y = Var("x"), Var("y")
    assert conj() == Top and disj() == neg(Top)
    assert conj(x, Top) == x
    assert neg(neg(x)) == x
    for a, b in itertools.product((0, 1), repeat=2):
        assert evaluate(xor(x, y), {"x": a, "y": b}) == bool(a ^ b)
        assert evaluate(Or(x, y), {"x": a, "y": b}) == bool(a or b)


def test_batch_agrees_with_single_runs():
    rng = random.Random(3)
    for _ in range(30):
        p = random_program(rng, variables=5, inputs=3)
        rows = ["".join(b) for b in itertools.product("01", repeat=3)]
        singles = [run(p, row, 12) for row in rows]
        assert run_batch(p, rows, 12) == singles
        assert batch_outputs(p, rows, 12) == [s[1] for s in singles]


def test_print_parse_roundtrip_1000_programs():
    rng = random.Random(11)
    for _ in range(1000):
        p = random_program(rng, variables=rng.randint(1, 7), inputs=rng.randint(0, 4))
        assert parse_program(format_program(p)) == p


@given(st.integers(0, 2**32), st.integers(0, 4))
def test_formula_text_roundtrip(seed, depth):
    f = random_formula(random.Random(seed), ["a", "b", "c"], depth)
    g = parse_formula(format_formula(f))
    assert formula_size(g) == formula_size(f)
    assert formula_depth(g) == formula_depth(f)
    for bits in itertools.product((0, 1), repeat=3):
        env = dict(zip("abc", bits))
        assert evaluate(g, env) == evaluate(f, env)


@given(st.integers(0, 2**32))
def test_opening_preserves_outputs(seed):
    rng = random.Random(seed)
    p = random_program(rng, variables=rng.randint(1, 6), inputs=rng.randint(0, 3), depth=rng.randint(0, 4))
    q, delay = to_fully_open(p)
    assert is_fully_open(q)
    rows = ["".join(b) for b in itertools.product("01", repeat=len(p.inputs))]
    for w, g in zip(batch_outputs(p, rows, 10), batch_outputs(q, rows, 10 * delay + delay - 1)):
        assert g == [(delay * n, out) for n, out in w]


def test_program_validation():
    with pytest.raises(ProgramError):
        BnlProgram(("A",), {}, {}, ())
    with pytest.raises(ProgramError):
        BnlProgram(("A",), {}, {"A": Var("A")}, ("B",))
    with pytest.raises(ProgramError):
        BnlProgram(("A",), {}, {"A": Var("A")}, (), Predicates(("B",)))
