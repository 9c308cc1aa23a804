"""Normalization of terms, and evaluation at a state with oracle logging.

``normalize`` and ``eval_at`` share one lazy, environment-based evaluator:
terms are evaluated to semantic values (Python ints, bools and updates at the
atomic types, closures, pairs and neutral terms otherwise) and read back to
normal forms.  Arguments are passed as memoized thunks, so only the oracle
points a computation really needs are consulted.

``step`` is an independent small-step normal-order reducer working by literal
substitution; it is the reference semantics the evaluator is tested against.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass
from itertools import count
from typing import Optional

from . import library as lib
from . import updates as upd
from .kernel import (
    FALSE, SUCC, TRUE, App, BVar, Const, Def, Lam, Num, Pair, Proj, Term, Var,
    abstract, boolean, contains_skolem, free_vars, instantiate, mk_app,
    replace_skolems, spine, typecheck, upconst, TypeCheckError,
)
from .state import State, synthesize_term
from .updates import Update

DEFAULT_MAX_STEPS = 10**6

_RECURSION_FLOOR = 20000


class BudgetExceeded(RuntimeError):
    pass


class IllTyped(ValueError):
    pass


@dataclass(frozen=True)
class EvalBudget:
    max_steps: int = DEFAULT_MAX_STEPS

    def __post_init__(self):
        if self.max_steps <= 0:
            raise ValueError("max_steps must be positive")


@dataclass(frozen=True)
class OracleQuery:
    index: int
    arg: int
    answer: int

    def as_list(self):
        return [self.index, self.arg, self.answer]


# ----------------------------------------------------------------------------
# Semantic values

class Thunk:
    __slots__ = ("term", "env", "fn", "value", "done")

    def __init__(self, term=None, env=None, fn=None):
        self.term, self.env, self.fn = term, env, fn
        self.value = None
        self.done = False


def ready(value) -> Thunk:
    th = Thunk()
    th.value, th.done = value, True
    return th


class Closure:
    __slots__ = ("env", "body", "ty", "hint")

    def __init__(self, env, body, ty, hint):
        self.env, self.body, self.ty, self.hint = env, body, ty, hint


class PairV:
    __slots__ = ("left", "right")

    def __init__(self, left, right):
        self.left, self.right = left, right


class ConstV:
    """A constant applied to fewer arguments than its arity."""
    __slots__ = ("const", "args")

    def __init__(self, const, args):
        self.const, self.args = const, args


class DefV:
    __slots__ = ("name", "args")

    def __init__(self, name, args):
        self.name, self.args = name, args


class OracleV:
    __slots__ = ("index",)

    def __init__(self, index):
        self.index = index


class Neutral:
    __slots__ = ()


class NVar(Neutral):
    __slots__ = ("level",)

    def __init__(self, level):
        self.level = level


class NFree(Neutral):
    __slots__ = ("name",)

    def __init__(self, name):
        self.name = name


class NApp(Neutral):
    __slots__ = ("head", "arg")

    def __init__(self, head, arg):
        self.head, self.arg = head, arg


class NProj(Neutral):
    __slots__ = ("side", "head")

    def __init__(self, side, head):
        self.side, self.head = side, head


class NStuck(Neutral):
    """A saturated constant application blocked on a non-literal argument."""
    __slots__ = ("const", "args")

    def __init__(self, const, args):
        self.const, self.args = const, args


CONST_ARITY = {"S": 1, "if": 3, "rec": 3, "min": 1, "get": 4, "mkupd": 3, "cup": 2}


def _is_nat(v):
    return isinstance(v, int) and not isinstance(v, bool)


class Machine:
    """One evaluation run: a state (or none, for pure terms), a budget and a log."""

    def __init__(self, state: Optional[State] = None, budget: Optional[EvalBudget] = None,
                 free=None):
        self.state = state
        self.free = free or {}
        self.max_steps = (budget or EvalBudget()).max_steps
        self.steps = 0
        self.log: dict[tuple[int, int], int] = {}
        self._synth = None
        self._bodies: dict[str, object] = {}
        if sys.getrecursionlimit() < _RECURSION_FLOOR:
            sys.setrecursionlimit(_RECURSION_FLOOR)

    def tick(self):
        self.steps += 1
        if self.steps > self.max_steps:
            raise BudgetExceeded(f"evaluation exceeded {self.max_steps} steps")

    # -- evaluation --------------------------------------------------------

    def force(self, th: Thunk):
        if not th.done:
            if th.fn is not None:
                th.value = th.fn()
            else:
                th.value = self.eval(th.term, th.env)
            th.done = True
            th.term = th.env = th.fn = None
        return th.value

    def eval(self, t: Term, env):
        if isinstance(t, App):
            return self.apply(self.eval(t.fun, env), Thunk(t.arg, env))
        if isinstance(t, BVar):
            node = env
            for _ in range(t.index):
                node = node[1]
            return self.force(node[0])
        if isinstance(t, Num):
            return t.value
        if isinstance(t, Lam):
            return Closure(env, t.body, t.ty, t.hint)
        if isinstance(t, Const):
            tag = t.tag
            if tag == "true":
                return True
            if tag == "false":
                return False
            if tag == "upd":
                return t.arg
            if tag == "phi":
                if self.state is None:
                    raise IllTyped("Skolem constants cannot be normalized without a state")
                return OracleV(t.arg)
            return ConstV(t, ())
        if isinstance(t, Def):
            return DefV(t.name, ())
        if isinstance(t, Pair):
            return PairV(Thunk(t.left, env), Thunk(t.right, env))
        if isinstance(t, Proj):
            return self.project(self.eval(t.arg, env), t.side)
        if isinstance(t, Var):
            if t.name in self.free:
                return self.free[t.name]
            return NFree(t.name)
        raise IllTyped(f"cannot evaluate {t!r}")

    def project(self, v, side):
        if isinstance(v, PairV):
            self.tick()
            return self.force(v.left if side == 0 else v.right)
        if isinstance(v, Neutral):
            return NProj(side, v)
        raise IllTyped("projection of a non-pair")

    def apply(self, f, th: Thunk):
        if isinstance(f, Closure):
            self.tick()
            return self.eval(f.body, (th, f.env))
        if isinstance(f, ConstV):
            args = f.args + (th,)
            if len(args) == CONST_ARITY[f.const.tag]:
                return self.reduce_const(f.const, args)
            return ConstV(f.const, args)
        if isinstance(f, DefV):
            args = f.args + (th,)
            if len(args) == lib.ARITY[f.name]:
                return self.reduce_def(f.name, args)
            return DefV(f.name, args)
        if isinstance(f, OracleV):
            n = self.force(th)
            if _is_nat(n):
                self.tick()
                answer = self.state(f.index, n)
                self.log.setdefault((f.index, n), answer)
                return answer
            return self.apply(self.oracle_fallback(f.index), th)
        if isinstance(f, Neutral):
            return NApp(f, th)
        raise IllTyped("application of a non-function")

    def oracle_fallback(self, index):
        # Phi_i applied to a non-numeral behaves like the synthesized s_i.
        if self._synth is None:
            self._synth = self.eval(synthesize_term(self.state), None)
        return self.apply(self._synth, ready(index))

    def body_value(self, name):
        if name not in self._bodies:
            self._bodies[name] = self.eval(lib.BODIES[name], None)
        return self._bodies[name]

    def unfold_def(self, name, args):
        v = self.body_value(name)
        for th in args:
            v = self.apply(v, th)
        return v

    def reduce_def(self, name, args):
        self.tick()
        result = lib.NATIVES[name]([lambda th=th: self.force(th) for th in args])
        if result is NotImplemented:
            return self.unfold_def(name, args)
        if isinstance(result, lib.Residual):
            return result.value
        return result

    def reduce_const(self, c: Const, args):
        tag = c.tag
        if tag == "S":
            n = self.force(args[0])
            if _is_nat(n):
                return n + 1
            return NStuck(c, args)
        if tag == "if":
            b = self.force(args[0])
            if isinstance(b, bool):
                self.tick()
                return self.force(args[1] if b else args[2])
            return NStuck(c, args)
        if tag == "rec":
            return self.reduce_rec(c, args)
        forced = [self.force(a) for a in args]
        if tag == "min":
            if isinstance(forced[0], Update):
                self.tick()
                return upd.min_index(forced[0])
        elif tag == "get":
            if isinstance(forced[0], Update) and all(_is_nat(v) for v in forced[1:]):
                self.tick()
                return upd.lookup(*forced)
        elif tag == "mkupd":
            if all(_is_nat(v) for v in forced):
                self.tick()
                return upd.singleton(*forced)
        elif tag == "cup":
            if all(isinstance(v, Update) for v in forced):
                self.tick()
                return upd.consistent_union(*forced)
        return NStuck(c, args)

    def reduce_rec(self, c, args):
        u, v, n_th = args
        n = self.force(n_th)
        if _is_nat(n):
            self.tick()
            if n == 0:
                return self.force(u)
            pred = ready(n - 1)
        elif isinstance(n, NStuck) and n.const.tag == "S":
            self.tick()
            pred = n.args[0]
        else:
            return NStuck(c, args)
        below = Thunk(fn=lambda: self.reduce_rec(c, (u, v, pred)))
        return self.apply(self.apply(self.force(v), pred), below)

    # -- readback ----------------------------------------------------------

    def readback(self, v, depth=0) -> Term:
        if isinstance(v, bool):
            return boolean(v)
        if isinstance(v, int):
            return Num(v)
        if isinstance(v, Update):
            return upconst(v)
        if isinstance(v, Closure):
            body = self.apply(v, ready(NVar(depth)))
            return Lam(v.ty, self.readback(body, depth + 1), v.hint)
        if isinstance(v, PairV):
            return Pair(self.readback(self.force(v.left), depth),
                        self.readback(self.force(v.right), depth))
        if isinstance(v, ConstV):
            return mk_app(v.const, *(self.readback(self.force(a), depth) for a in v.args))
        if isinstance(v, DefV):
            return self.readback(self.unfold_def(v.name, v.args), depth)
        if isinstance(v, OracleV):
            return self.readback(self.oracle_fallback(v.index), depth)
        if isinstance(v, NVar):
            return BVar(depth - v.level - 1)
        if isinstance(v, NFree):
            return Var(v.name)
        if isinstance(v, NApp):
            return App(self.readback(v.head, depth), self.readback(self.force(v.arg), depth))
        if isinstance(v, NProj):
            return Proj(v.side, self.readback(v.head, depth))
        if isinstance(v, NStuck):
            return mk_app(v.const, *(self.readback(self.force(a), depth) for a in v.args))
        raise IllTyped(f"cannot read back {v!r}")

    def oracle_log(self) -> list[OracleQuery]:
        return [OracleQuery(i, n, m) for (i, n), m in self.log.items()]


def _check_typed(t: Term, ctx):
    if ctx is None and free_vars(t):
        return
    try:
        typecheck(t, ctx)
    except TypeCheckError as err:
        raise IllTyped(str(err)) from None


def normalize(t: Term, budget: Optional[EvalBudget] = None, ctx=None) -> Term:
    """The normal form of a pure term (no Skolem constants)."""
    if contains_skolem(t):
        raise IllTyped("normalize expects a term without Skolem constants")
    _check_typed(t, ctx)
    m = Machine(None, budget)
    return m.readback(m.eval(t, None))


def eval_at(t: Term, s: State, budget: Optional[EvalBudget] = None, ctx=None):
    """Normal form of ``t`` with each ``phi{i}`` read as ``s_i``, plus the oracle log."""
    _check_typed(t, ctx)
    m = Machine(s, budget)
    nf = m.readback(m.eval(t, None))
    return nf, m.oracle_log()


def approximate(t: Term, s: State) -> Term:
    """``t`` with every Skolem constant ``phi{i}`` replaced by ``s_i`` as a T term."""
    synth = synthesize_term(s)
    return replace_skolems(t, lambda i: App(synth, Num(i)))


# ----------------------------------------------------------------------------
# Reference small-step reducer

_fresh = count()


def _const_redex(c: Const, args):
    tag = c.tag
    if tag == "S" and args and isinstance(args[0], Num):
        return Num(args[0].value + 1), args[1:]
    if tag == "if" and len(args) >= 3 and args[0] in (TRUE, FALSE):
        return (args[1] if args[0] == TRUE else args[2]), args[3:]
    if tag == "rec" and len(args) >= 3:
        u, v, n = args[:3]
        if isinstance(n, Num):
            if n.value == 0:
                return u, args[3:]
            pred = Num(n.value - 1)
            return mk_app(v, pred, mk_app(c, u, v, pred)), args[3:]
        if isinstance(n, App) and n.fun == SUCC:
            return mk_app(v, n.arg, mk_app(c, u, v, n.arg)), args[3:]
    if tag == "min" and args and _is_update(args[0]):
        return Num(upd.min_index(args[0].arg)), args[1:]
    if tag == "get" and len(args) >= 4 and _is_update(args[0]) and all(
            isinstance(a, Num) for a in args[1:4]):
        a, n, l = (x.value for x in args[1:4])
        return Num(upd.lookup(args[0].arg, a, n, l)), args[4:]
    if tag == "mkupd" and len(args) >= 3 and all(isinstance(a, Num) for a in args[:3]):
        return upconst(upd.singleton(*(x.value for x in args[:3]))), args[3:]
    if tag == "cup" and len(args) >= 2 and _is_update(args[0]) and _is_update(args[1]):
        return upconst(upd.consistent_union(args[0].arg, args[1].arg)), args[2:]
    return None


def _is_update(t):
    return isinstance(t, Const) and t.tag == "upd"


def step(t: Term) -> Optional[Term]:
    """One leftmost-outermost reduction step, or None if ``t`` is normal.

    Works on locally closed terms; lambda bodies are opened with a fresh free
    name before reducing under the binder.
    """
    head, args = spine(t)
    if isinstance(head, Lam) and args:
        return mk_app(instantiate(head.body, args[0]), *args[1:])
    if isinstance(head, Def):
        return mk_app(lib.BODIES[head.name], *args)
    if isinstance(head, Proj) and isinstance(head.arg, Pair):
        picked = head.arg.left if head.side == 0 else head.arg.right
        return mk_app(picked, *args)
    if isinstance(head, Const):
        redex = _const_redex(head, args)
        if redex is not None:
            result, rest = redex
            return mk_app(result, *rest)
    # No redex at the root: reduce inside the head, then the arguments.
    new_head = None
    if isinstance(head, Lam):
        name = f"%{next(_fresh)}"
        inner = step(instantiate(head.body, Var(name)))
        if inner is not None:
            new_head = Lam(head.ty, abstract(name, inner), head.hint)
    elif isinstance(head, Pair):
        left = step(head.left)
        if left is not None:
            new_head = Pair(left, head.right)
        else:
            right = step(head.right)
            if right is not None:
                new_head = Pair(head.left, right)
    elif isinstance(head, Proj):
        inner = step(head.arg)
        if inner is not None:
            new_head = Proj(head.side, inner)
    if new_head is not None:
        return mk_app(new_head, *args)
    for k, arg in enumerate(args):
        reduced = step(arg)
        if reduced is not None:
            return mk_app(head, *args[:k], reduced, *args[k + 1:])
    return None


def normalize_by_steps(t: Term, max_steps: int = DEFAULT_MAX_STEPS, on_step=None) -> Term:
    """Iterate ``step`` to the normal form; ``on_step`` sees every intermediate term."""
    for _ in range(max_steps):
        nxt = step(t)
        if nxt is None:
            return t
        t = nxt
        if on_step is not None:
            on_step(t)
    raise BudgetExceeded(f"no normal form within {max_steps} steps")


def is_canonical(t: Term) -> bool:
    """Numeral, boolean, update constant, or a pair/lambda (higher types)."""
    return isinstance(t, (Num, Pair, Lam)) or t in (TRUE, FALSE) or _is_update(t)
