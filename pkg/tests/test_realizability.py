import random

import pytest
from hypothesis import given, strategies as st

from irk import library as lib
from irk.evaluator import approximate, eval_at
from irk.kernel import (
    BOOL, FALSE, NAT, TRUE, UPDATE, App, Arrow, Num, Pair, Prod, Var, lam, mk_app,
    skolem, typecheck, upconst,
)
from irk.logic import (
    And, Atomic, BOTTOM, Exists, Forall, Implies, Minus, Or, SkolemRegistry, sk_axiom,
    subst_formula,
)
from irk.realizability import (
    CandidatePool, Fails, Inconclusive, MatrixNotDecidable, Realizes, TypeMismatch,
    bounded_search, check_at, check_mrsf, em1_realizer, em1_target, em_exists_realizer,
    realizer_type, sk_realizer, sk_target,
)
from irk.evaluator import normalize
from irk.state import DEFAULT, State
from irk.truth import approximate_formula
from irk.updates import EMPTY, Update
from gen import TermGen, positive_formula, random_state, registry_with

x, y = Var("x"), Var("y")
NONE = upconst(EMPTY)


def test_realizer_types():
    P, Q = Atomic(lib.lt(x, y)), Atomic(lib.eq(x, y))
    assert realizer_type(P) == UPDATE
    assert realizer_type(Exists("x", NAT, And(P, Q))) == Prod(NAT, Prod(UPDATE, UPDATE))
    A = Exists("x", NAT, P)
    assert realizer_type(Implies(A, P)) == Arrow(realizer_type(A), UPDATE)
    assert realizer_type(Or(P, A)) == Prod(BOOL, Prod(UPDATE, realizer_type(A)))
    assert realizer_type(Minus(P, A)) == Prod(UPDATE, Arrow(NAT, UPDATE))
    assert realizer_type(Forall("x", NAT, P)) == Arrow(NAT, UPDATE)


def test_check_at_examples():
    reg = SkolemRegistry()
    assert check_at(NONE, Atomic(lib.eq(Num(0), Num(0))), DEFAULT, reg) == Realizes()
    v = check_at(NONE, Atomic(lib.eq(Num(0), Num(1))), DEFAULT, reg)
    assert isinstance(v, Fails) and v.path == ("atomic",)
    F = Exists("y", NAT, Atomic(lib.eq(lib.mul(Num(2), y), Num(6))))
    assert check_at(Pair(Num(3), NONE), F, DEFAULT, reg) == Realizes()
    v = check_at(Pair(Num(2), NONE), F, DEFAULT, reg)
    assert v == Fails(("exists[y=2]", "atomic"), "empty update but the atom is false")

    i = reg.register(Atomic(lib.eq(y, Num(7))), [], "y")
    learner = upconst(Update([(i, 0, 7)]))
    assert check_at(learner, BOTTOM, DEFAULT, reg) == Realizes()
    # once the state knows the witness the same update no longer corrects it
    assert isinstance(check_at(learner, BOTTOM, State({(i, 0): 7}), reg), Fails)
    # a wrong value is not a correction
    assert isinstance(check_at(upconst(Update([(i, 0, 6)])), BOTTOM, DEFAULT, reg), Fails)
    # indices outside Gamma may not be corrected
    assert isinstance(check_at(learner, BOTTOM, DEFAULT, reg, gamma=frozenset()), Fails)


def test_verdict_json():
    assert Realizes().to_json() == {"verdict": "realizes", "clause_path": [], "details": ""}
    assert Fails(("and.left", "atomic"), "r").to_json()["clause_path"] == ["and.left", "atomic"]
    assert Inconclusive("sampled-universal").to_json()["details"] == "sampled-universal"


def test_type_mismatch():
    reg = SkolemRegistry()
    with pytest.raises(TypeMismatch):
        check_at(Num(0), Atomic(lib.eq(Num(0), Num(0))), DEFAULT, reg)
    with pytest.raises(TypeMismatch):
        check_mrsf(Pair(Num(0), NONE), Atomic(lib.eq(Num(0), Num(0))), DEFAULT, reg)


def test_mrsf_rejects_skolems():
    reg = SkolemRegistry()
    t = Pair(App(skolem(0), Num(0)), NONE)
    with pytest.raises(TypeMismatch):
        check_mrsf(t, Exists("y", NAT, Atomic(lib.eq(y, y))), DEFAULT, reg)
    assert check_mrsf(NONE, Atomic(lib.eq(Num(0), Num(0))), DEFAULT, reg) == Realizes()


def test_universal_and_implication_are_sampled():
    reg = SkolemRegistry()
    leq = Forall("x", NAT, Atomic(lib.leq(Num(0), x)))
    assert check_at(lam("x", NAT, NONE), leq, DEFAULT, reg) == Inconclusive("sampled-universal")
    small = Forall("x", NAT, Atomic(lib.lt(x, Num(5))))
    v = check_at(lam("x", NAT, NONE), small, DEFAULT, reg)
    assert v == Fails(("forall[x=5]", "atomic"), "empty update but the atom is false")
    imp = Implies(Atomic(lib.eq(Num(1), Num(1))), Atomic(lib.eq(Num(1), Num(2))))
    v = check_at(lam("u", UPDATE, NONE), imp, DEFAULT, reg)
    assert isinstance(v, Fails) and v.path[0] == "implies"
    vacuous = Implies(Atomic(lib.eq(Num(1), Num(2))), Atomic(lib.eq(Num(1), Num(2))))
    assert check_at(lam("u", UPDATE, NONE), vacuous, DEFAULT, reg) == \
        Inconclusive("sampled-implication")


def test_sk_realizer_example():
    reg = SkolemRegistry()
    i = reg.register(Atomic(lib.eq(y, x)), ["x"], "y")
    t = sk_realizer(i, reg)
    p = Pair(Num(5), NONE)
    assert eval_at(mk_app(t, Num(5), p), State({(i, 5): 5}))[0] == NONE
    assert eval_at(mk_app(t, Num(5), p), DEFAULT)[0] == upconst(Update([(i, 5, 5)]))
    # the update carried by p passes through the union
    p2 = Pair(Num(5), upconst(Update([(i, 2, 2)])))
    assert eval_at(mk_app(t, Num(5), p2), DEFAULT)[0] == upconst(Update([(i, 2, 2), (i, 5, 5)]))
    assert realizer_type(sk_target(i, reg)) == Arrow(NAT, Arrow(Prod(NAT, UPDATE), UPDATE))
    assert realizer_type(sk_axiom(i, reg)) == realizer_type(sk_target(i, reg))


def test_em1_realizer_example():
    reg = SkolemRegistry()
    i = reg.register(Atomic(lib.eq(lib.mul(Num(2), y), x)), ["x"], "y")
    e = App(em1_realizer(i, reg), Num(6))
    nf, _ = eval_at(e, State({(i, 6): 3}))
    assert nf.left == TRUE
    assert nf.right.left == Pair(Num(3), NONE)
    nf, _ = eval_at(e, DEFAULT)
    assert nf.left == FALSE
    refute = nf.right.right
    assert eval_at(App(refute, Num(3)), DEFAULT)[0] == upconst(Update([(i, 6, 3)]))
    assert eval_at(App(refute, Num(2)), DEFAULT)[0] == NONE
    # unsatisfiable at x = 7: every y gets the empty update
    nf, _ = eval_at(App(em1_realizer(i, reg), Num(7)), DEFAULT)
    for n in range(20):
        assert eval_at(App(nf.right.right, Num(n)), DEFAULT)[0] == NONE
    assert typecheck(em1_realizer(i, reg)) == realizer_type(em1_target(i, reg))


def test_quantified_matrix_rejected():
    reg = SkolemRegistry()
    i = reg.register(Exists("z", NAT, Atomic(lib.eq(Var("z"), y))), [], "y")
    with pytest.raises(MatrixNotDecidable):
        sk_realizer(i, reg)
    with pytest.raises(MatrixNotDecidable):
        em1_realizer(i, reg)


def test_bounded_search():
    q = lib.eq(lib.mul(y, y), Num(49))
    assert normalize(bounded_search(q, "y", 20)) == Num(7)
    assert normalize(bounded_search(lib.eq(y, Num(99)), "y", 20)) == Num(20)


def test_em_exists_realizer():
    reg = SkolemRegistry()
    i = reg.register(Atomic(lib.eq(lib.mul(Num(2), y), Num(6))), [], "y")
    t = em_exists_realizer(i, reg, bounded_search(reg.entry(i).formula.term, "y", 32))
    F = Exists("y", NAT, reg.entry(i).formula)
    assert eval_at(t, DEFAULT)[0] == Pair(Num(0), upconst(Update([(i, 0, 3)])))
    assert eval_at(t, State({(i, 0): 3}))[0] == Pair(Num(3), NONE)
    # candidate 0 is wrong, but the update is a legitimate correction
    assert check_at(t, F, DEFAULT, reg) == Realizes()
    assert check_at(t, F, State({(i, 0): 3}), reg) == Realizes()
    bogus = Pair(Num(0), upconst(Update([(i, 0, 4)])))
    assert isinstance(check_at(bogus, F, DEFAULT, reg), Fails)


@given(st.randoms(use_true_random=False))
def test_canonical_realizers_never_fail(r):
    rr = random.Random(r.random())
    reg = registry_with(rr, 2)
    pool = CandidatePool(nats=tuple(range(6)), limit=6)
    for i in reg.indices():
        s = random_state(rr, [i], codes=6, values=6)
        for t, F in ((sk_realizer(i, reg), sk_target(i, reg)),
                     (em1_realizer(i, reg), em1_target(i, reg))):
            v = check_at(t, F, s, reg, pool)
            assert not isinstance(v, Fails), (i, v)


@given(st.randoms(use_true_random=False))
def test_characterization(r):
    rr = random.Random(r.random())
    reg = registry_with(rr, 2)
    skolems = list(reg.indices())
    F = positive_formula(rr, 3, skolems=skolems)
    t = TermGen(rr, skolems=skolems, max_depth=3).term(realizer_type(F))
    s = random_state(rr, skolems, codes=4, values=6)
    expected = check_at(t, F, s, reg)
    assert check_mrsf(approximate(t, s), approximate_formula(F, s), s, reg) == expected


@given(st.randoms(use_true_random=False))
def test_saturation_of_equal_approximations(r):
    # Replacing a subterm by one with the same value at s leaves verdicts alone.
    rr = random.Random(r.random())
    reg = registry_with(rr, 1)
    s = random_state(rr, reg.indices(), codes=4, values=6)
    u1 = App(skolem(0), Num(rr.randrange(4)))
    u2 = Num(eval_at(u1, s)[0].value)
    F = positive_formula(rr, 2, scope=["w"])
    t = TermGen(rr, skolems=[0], max_depth=3).term(realizer_type(F))
    v1 = check_at(t, subst_formula(F, {"w": u1}), s, reg)
    v2 = check_at(t, subst_formula(F, {"w": u2}), s, reg)
    assert v1 == v2
