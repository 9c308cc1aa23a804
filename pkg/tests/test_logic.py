import random

import pytest
from hypothesis import given, strategies as st

from irk import library as lib
from irk.evaluator import normalize
from irk.kernel import NAT, TRUE, App, Arrow, Num, Var, skolem
from irk.logic import (
    BOTTOM, And, Atomic, Exists, Forall, Implies, Minus, Or, SkolemRegistry,
    UnregisteredIndex, NotArithmetical, code_of, code_term, decode_tuple,
    em_axiom, encode_tuple, inv_negate, is_arithmetical, neg, sk_axiom,
)
from irk.syntax import parse_formula, print_formula
from gen import random_formula
from oracle import cantor

x, y = Var("x"), Var("y")
P = Atomic(lib.eq(x, x))


def test_is_arithmetical():
    assert is_arithmetical(Forall("x", NAT, P))
    assert not is_arithmetical(Forall("f", Arrow(NAT, NAT), Atomic(TRUE)))
    assert not is_arithmetical(Atomic(lib.eq(App(skolem(0), Num(0)), Num(0))))


def test_inv_negate_table():
    A, B = Atomic(lib.lt(x, y)), Atomic(lib.eq(x, y))
    assert inv_negate(Implies(A, B)) == Minus(A, B)
    assert inv_negate(Minus(A, B)) == Implies(A, B)
    assert inv_negate(And(A, B)) == Or(inv_negate(A), inv_negate(B))
    assert inv_negate(Or(A, B)) == And(inv_negate(A), inv_negate(B))
    assert inv_negate(Forall("x", NAT, A)) == Exists("x", NAT, inv_negate(A))
    assert inv_negate(Exists("x", NAT, A)) == Forall("x", NAT, inv_negate(A))
    assert inv_negate(A) == Atomic(lib.not_(lib.lt(x, y)))
    assert inv_negate(inv_negate(A)) == A


def test_double_negation_is_stripped():
    p = lib.lt(x, y)
    assert Atomic(lib.not_(lib.not_(p))) == Atomic(p)
    assert inv_negate(Atomic(lib.not_(lib.not_(p)))) == Atomic(lib.not_(p))


def test_tuple_coding_examples():
    assert encode_tuple([5]) == 5
    assert encode_tuple([1, 2]) == 8 == cantor(1, 2)
    assert encode_tuple([1, 2, 3]) == cantor(1, cantor(2, 3))
    assert decode_tuple(8, 2) == (1, 2)


@given(st.lists(st.integers(0, 40), min_size=1, max_size=4))
def test_coding_bijection(ns):
    code = encode_tuple(ns)
    assert decode_tuple(code, len(ns)) == tuple(ns)
    assert normalize(code_of([Num(n) for n in ns])) == Num(code)


def test_code_term_matches_encode():
    rng = random.Random(5)
    for k in (1, 2, 3):
        for _ in range(20):
            ns = [rng.randrange(12) for _ in range(k)]
            t = code_term(k)
            for n in ns:
                t = App(t, Num(n))
            assert normalize(t) == Num(encode_tuple(ns))


def test_coding_is_injective_on_a_grid():
    seen = {}
    for a in range(20):
        for b in range(20):
            code = encode_tuple([a, b])
            assert seen.setdefault(code, (a, b)) == (a, b)


def test_axioms():
    reg = SkolemRegistry()
    A = Atomic(lib.eq(y, x))
    i = reg.register(A, ["x"], "y")
    oracle = App(skolem(i), x)
    assert sk_axiom(i, reg) == Forall("x", NAT, Implies(
        Exists("y", NAT, A), Atomic(lib.eq(oracle, x))))
    assert em_axiom(Atomic(TRUE)) == Or(Atomic(TRUE), neg(Atomic(TRUE)))
    assert neg(Atomic(TRUE)) == Implies(Atomic(TRUE), BOTTOM)
    with pytest.raises(UnregisteredIndex):
        sk_axiom(99, reg)
    with pytest.raises(NotArithmetical):
        em_axiom(Atomic(lib.eq(App(skolem(0), x), x)))


def test_registry():
    reg = SkolemRegistry()
    A = Atomic(lib.eq(lib.mul(Num(2), y), x))
    i = reg.register(A, ["x"], "y")
    assert reg.register(A, ["x"], "y") == i
    # alpha-renamed copy is the same entry
    B = Atomic(lib.eq(lib.mul(Num(2), Var("w")), Var("v")))
    assert reg.register(B, ["v"], "w") == i
    # the negation was registered alongside
    j = reg.index_of(inv_negate(A), ["x"], "y")
    assert j is not None and j != i
    assert reg.entry(i).formula == A and reg.entry(i).arity == 1
    with pytest.raises(NotArithmetical):
        reg.register(Atomic(lib.eq(App(skolem(0), y), x)), ["x"], "y")
    with pytest.raises(ValueError):
        reg.register(A, [], "y")
    rows = reg.to_json(print_formula)
    back = SkolemRegistry.from_json(rows, parse_formula)
    assert [e.formula for e in back] == [e.formula for e in reg]
    assert back.index_of(A, ["x"], "y") == i


@given(st.randoms(use_true_random=False))
def test_involution_and_arithmeticity(r):
    f = random_formula(random.Random(r.random()), 5)
    assert inv_negate(inv_negate(f)) == f
    assert is_arithmetical(inv_negate(f)) == is_arithmetical(f)
