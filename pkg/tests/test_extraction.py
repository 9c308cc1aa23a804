import json
import random

import pytest
from hypothesis import given, strategies as st

from irk import library as lib
from irk.domains import MaxItersExceeded, check_geq
from irk.extraction import LoopConfig, extract_witness, refute_bottom
from irk.kernel import CUP, MKUPD, NAT, UPDATE, App, Num, Pair, Var, if_, mk_app, skolem, upconst
from irk.logic import BOTTOM, Atomic, Exists, SkolemRegistry
from irk.realizability import Fails, bounded_search, check_at, em_exists_realizer
from irk.state import DEFAULT, State, apply_update
from irk.truth import BoundExhausted
from irk.updates import EMPTY, Update
from oracle import least_witness, py_value

y = Var("y")
NONE = upconst(EMPTY)


def sigma(term):
    return Exists("y", NAT, Atomic(term))


def em_setup(term, limit=32):
    reg = SkolemRegistry()
    F = sigma(term)
    i = reg.register(F.body, [], "y")
    return reg, i, F, em_exists_realizer(i, reg, bounded_search(term, "y", limit))


def test_trivial_realizer():
    F = sigma(lib.eq(lib.mul(Num(2), y), Num(6)))
    n, s, trace = extract_witness(Pair(Num(3), NONE), F, DEFAULT, SkolemRegistry())
    assert (n, s) == (3, DEFAULT)
    assert trace.result == {"result": "witness", "witness": 3, "iterations": 1}


def test_learning_run():
    reg, i, F, t = em_setup(lib.eq(lib.mul(Num(2), y), Num(6)))
    n, s, trace = extract_witness(t, F, DEFAULT, reg)
    assert n == 3 and s(i, 0) == 3
    first, second = trace.records
    assert first["candidate"] == 0 and first["verdict"] == "learned"
    assert first["update"] == [[i, 0, 3]] and first["state_diff"] == [[i, 0, 3]]
    assert second["candidate"] == 3 and second["verdict"] == "witness"
    assert trace.result["iterations"] == 2


def test_stabilization_step():
    # The realizer trusts the oracle blindly and never emits updates.
    reg = SkolemRegistry()
    F = sigma(lib.eq(y, Num(5)))
    i = reg.register(F.body, [], "y")
    t = Pair(App(skolem(i), Num(0)), NONE)
    n, s, trace = extract_witness(t, F, DEFAULT, reg)
    assert n == 5
    assert [r["verdict"] for r in trace.records] == ["stabilized", "witness"]


def test_unsatisfiable_matrix_never_returns():
    reg, _, F, t = em_setup(lib.eq(lib.mul(Num(2), y), Num(7)), limit=10)
    with pytest.raises((MaxItersExceeded, BoundExhausted)) as err:
        extract_witness(t, F, DEFAULT, reg, LoopConfig(max_iters=20))
    if isinstance(err.value, MaxItersExceeded):
        assert err.value.trace.records


def test_max_iters_carries_trace():
    reg = SkolemRegistry()
    F = sigma(lib.eq(y, Num(5)))
    # Each round learns one more point but the candidate is always wrong.
    t = Pair(Num(0), mk_app(MKUPD, Num(9), App(skolem(9), Num(0)), Num(1)))
    with pytest.raises(MaxItersExceeded) as err:
        extract_witness(t, F, DEFAULT, reg, LoopConfig(max_iters=3))
    assert err.value.trace.result["result"] in ("max-iters", "stalled")


def test_config_validation():
    with pytest.raises(ValueError):
        LoopConfig(max_iters=0)
    with pytest.raises(ValueError):
        LoopConfig(bound=0)


def test_trace_format_and_determinism(tmp_path):
    reg, _, F, t = em_setup(lib.eq(lib.mul(y, y), Num(49)))
    _, _, tr1 = extract_witness(t, F, DEFAULT, reg)
    _, _, tr2 = extract_witness(t, F, DEFAULT, reg)
    assert tr1.to_jsonl() == tr2.to_jsonl()
    lines = [json.loads(line) for line in tr1.to_jsonl().splitlines()]
    for rec in lines[:-1]:
        assert set(rec) == {"iter", "candidate", "update", "state_diff", "verdict"}
    assert lines[-1] == {"result": "witness", "witness": 7, "iterations": 2}
    assert "wall_ms" in json.loads(tr1.to_jsonl(timing=True).splitlines()[-1])
    path = tmp_path / "t.jsonl"
    tr1.dump(path)
    assert path.read_text() == tr1.to_jsonl()


def test_refute_empty_update():
    s, trace = refute_bottom(NONE, DEFAULT, SkolemRegistry())
    assert s == DEFAULT
    assert [r["verdict"] for r in trace.records] == ["refuted"]


def test_refute_learning_update():
    reg = SkolemRegistry()
    i = reg.register(Atomic(lib.eq(y, Num(7))), [], "y")
    t = upconst(Update([(i, 0, 7)]))
    assert not isinstance(check_at(t, BOTTOM, DEFAULT, reg), Fails)
    s, trace = refute_bottom(t, DEFAULT, reg)
    assert s(i, 0) == 7
    assert isinstance(check_at(t, BOTTOM, s, reg), Fails)
    assert check_geq(s, DEFAULT, reg) is True
    assert [r["verdict"] for r in trace.records] == ["case-witness", "refuted"]


def test_refute_composite():
    reg = SkolemRegistry()
    i = reg.register(Atomic(lib.eq(lib.mul(Num(2), y), Var("x"))), ["x"], "y")
    # learn a witness for x = 2 * phi(4), i.e. a chain through the oracle
    inner = App(skolem(i), Num(4))
    t = mk_app(CUP, mk_app(MKUPD, Num(i), lib.mul(Num(2), inner), inner),
               mk_app(if_(UPDATE), lib.eq(inner, Num(2)), NONE,
                      mk_app(MKUPD, Num(i), Num(4), Num(2))))
    s0 = State({(i, 4): 5})
    s, _ = refute_bottom(t, s0, reg)
    assert isinstance(check_at(t, BOTTOM, s, reg), Fails)
    assert check_geq(s, s0, reg) is True


@given(st.randoms(use_true_random=False))
def test_extracted_witnesses_are_genuine(r):
    rr = random.Random(r.random())
    a, w = rr.randint(1, 3), rr.randrange(12)
    b = rr.randrange(5)
    term = lib.eq(lib.add(lib.mul(Num(a), y), Num(b)), Num(a * w + b))
    if rr.random() < 0.5:
        term = lib.and_(term, lib.leq(Num(rr.randrange(w + 1)), y))
    reg, i, F, t = em_setup(term)
    s0 = State({(i, 0): rr.randrange(20)})
    n, s, trace = extract_witness(t, F, s0, reg)
    assert py_value(term, {"y": n}) is True
    assert least_witness(lambda v: py_value(term, {"y": v}), 32) is not None
    # state diffs compose to the overall change
    replay = s0
    for rec in trace.records:
        replay = apply_update(replay, Update(rec["state_diff"]))
    assert replay == s
