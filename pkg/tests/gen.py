"""Seeded random generators for terms, formulas, states and updates.

They use ``random.Random`` so bulk acceptance runs are cheap and exactly
reproducible from a seed; the hypothesis tests wrap them with ``st.randoms``.
"""

import random

from irk import library as lib
from irk.kernel import (
    BOOL, CUP, FALSE, GET, MIN, MKUPD, NAT, SUCC, TRUE, UPDATE, App, Arrow, Num,
    Pair, Prod, Proj, Var, if_, lam, mk_app, rec, skolem, upconst,
)
from irk.logic import And, Atomic, Exists, Forall, Implies, Minus, Or
from irk.state import State
from irk.updates import Update

SMALL_TYPES = [NAT, BOOL, UPDATE, Arrow(NAT, NAT), Prod(NAT, BOOL)]


def random_update(rng, size=4, index_range=4, arg_range=4, value_range=6):
    pts = {}
    for _ in range(rng.randint(0, size)):
        pts[(rng.randrange(index_range), rng.randrange(arg_range))] = rng.randrange(value_range)
    return Update((a, n, m) for (a, n), m in pts.items())


class TermGen:
    """Well-typed terms of a requested type.

    Numbers stay small and recursion counts are literals, so terms normalize
    quickly even with the small-step reducer.
    """

    def __init__(self, rng: random.Random, skolems=(), max_depth=4):
        self.rng = rng
        self.skolems = list(skolems)
        self.max_depth = max_depth
        self.fresh = 0

    def name(self):
        self.fresh += 1
        return f"v{self.fresh}"

    def term(self, ty, ctx=(), depth=None):
        depth = self.max_depth if depth is None else depth
        ctx = list(ctx)
        if isinstance(ty, Arrow):
            v = self.name()
            return lam(v, ty.dom, self.term(ty.cod, ctx + [(v, ty.dom)], depth - 1))
        if isinstance(ty, Prod):
            return Pair(self.term(ty.left, ctx, depth - 1), self.term(ty.right, ctx, depth - 1))
        rng = self.rng
        if depth <= 0 or rng.random() < 0.25:
            return self.leaf(ty, ctx)
        kind = rng.choice(["op", "op", "if", "redex", "proj", "var"])
        d = depth - 1
        if kind == "if":
            return mk_app(if_(ty), self.term(BOOL, ctx, d), self.term(ty, ctx, d), self.term(ty, ctx, d))
        if kind == "redex":
            sigma = rng.choice(SMALL_TYPES)
            v = self.name()
            body = self.term(ty, ctx + [(v, sigma)], d)
            return App(lam(v, sigma, body), self.term(sigma, ctx, d))
        if kind == "proj":
            other = rng.choice([NAT, BOOL])
            if rng.random() < 0.5:
                return Proj(0, Pair(self.term(ty, ctx, d), self.term(other, ctx, d)))
            return Proj(1, Pair(self.term(other, ctx, d), self.term(ty, ctx, d)))
        if kind == "var":
            t = self.use_var(ty, ctx, d)
            if t is not None:
                return t
        return self.op(ty, ctx, d)

    def use_var(self, ty, ctx, depth):
        options = []
        for name, vty in ctx:
            args, cur = [], vty
            while isinstance(cur, Arrow):
                args.append(cur.dom)
                cur = cur.cod
            if cur == ty:
                options.append((name, args))
        if not options:
            return None
        name, args = self.rng.choice(options)
        return mk_app(Var(name), *(self.term(a, ctx, depth) for a in args))

    def leaf(self, ty, ctx):
        rng = self.rng
        if rng.random() < 0.4:
            t = self.use_var(ty, ctx, 0)
            if t is not None:
                return t
        if ty == NAT:
            if self.skolems and rng.random() < 0.2:
                return App(skolem(rng.choice(self.skolems)), Num(rng.randrange(4)))
            return Num(rng.randrange(6))
        if ty == BOOL:
            return rng.choice([TRUE, FALSE])
        return upconst(random_update(rng, 2))

    def op(self, ty, ctx, d):
        rng = self.rng
        n = lambda: self.term(NAT, ctx, d)  # noqa: E731
        if ty == NAT:
            k = rng.randrange(7)
            if k == 0:
                return App(SUCC, n())
            if k == 1:
                return lib.add(n(), n())
            if k == 2:
                return lib.sub(n(), n())
            if k == 3:
                return lib.mul(Num(rng.randrange(4)), n())
            if k == 4:
                v, r = self.name(), self.name()
                step = lam(v, NAT, lam(r, NAT, self.term(NAT, ctx + [(v, NAT), (r, NAT)], d - 1)))
                return mk_app(rec(NAT), n(), step, Num(rng.randrange(4)))
            if k == 5:
                return App(MIN, self.term(UPDATE, ctx, d))
            return mk_app(GET, self.term(UPDATE, ctx, d), n(), n(), n())
        if ty == BOOL:
            k = rng.randrange(6)
            if k == 0:
                return lib.eq(n(), n())
            if k == 1:
                return lib.lt(n(), n())
            if k == 2:
                return lib.leq(n(), n())
            if k == 3:
                return lib.not_(self.term(BOOL, ctx, d))
            if k == 4:
                return rng.choice([lib.and_, lib.or_, lib.imp])(
                    self.term(BOOL, ctx, d), self.term(BOOL, ctx, d))
            v, r = self.name(), self.name()
            step = lam(v, NAT, lam(r, BOOL, self.term(BOOL, ctx + [(v, NAT), (r, BOOL)], d - 1)))
            return mk_app(rec(BOOL), self.term(BOOL, ctx, d), step, Num(rng.randrange(3)))
        if rng.random() < 0.5:
            return mk_app(MKUPD, Num(rng.randrange(4)), Num(rng.randrange(4)), n())
        return mk_app(CUP, self.term(UPDATE, ctx, d), self.term(UPDATE, ctx, d))


# ----------------------------------------------------------------------------
# Formulas

VAR_NAMES = ["x", "y", "z", "u", "w"]


def linear(rng, scope):
    """A small polynomial term over the variables in scope."""
    t = Num(rng.randrange(4))
    for _ in range(rng.randint(1, 2)):
        if scope and rng.random() < 0.8:
            v = Var(rng.choice(scope))
            if rng.random() < 0.2:
                v = lib.mul(v, v)
            elif rng.random() < 0.4:
                v = lib.mul(Num(rng.randint(2, 3)), v)
            t = lib.add(t, v) if rng.random() < 0.7 else lib.add(v, t)
        else:
            t = lib.add(t, Num(rng.randrange(5)))
    return t


def random_atom(rng, scope, skolems=()):
    rel = rng.choice([lib.eq, lib.lt, lib.leq, lib.eq])
    left, right = linear(rng, scope), linear(rng, scope)
    if skolems and rng.random() < 0.3:
        left = lib.add(left, App(skolem(rng.choice(skolems)), Num(rng.randrange(3))))
    t = rel(left, right)
    if rng.random() < 0.2:
        t = lib.not_(t)
    if rng.random() < 0.1:
        t = rng.choice([TRUE, FALSE])
    return Atomic(t)


def random_formula(rng, depth, scope=(), quantifiers=True, connectives="&|>\\",
                   skolems=(), bounded=False):
    """A formula of the given maximal depth whose free variables lie in ``scope``.

    With ``bounded`` every quantifier is guarded, ``ex y. y <= c & A`` or
    ``all y. y <= c -> A``, so its truth only depends on small values.
    """
    scope = list(scope)
    if depth <= 0 or rng.random() < 0.2:
        return random_atom(rng, scope, skolems)
    kinds = list(connectives)
    if quantifiers:
        kinds += ["A", "E", "E"]
    k = rng.choice(kinds)
    d = depth - 1
    if k in "AE":
        var = next((v for v in VAR_NAMES if v not in scope), None) or f"q{len(scope)}"
        body = random_formula(rng, d - (1 if bounded else 0), scope + [var], quantifiers,
                              connectives, skolems, bounded)
        if bounded:
            guard = Atomic(lib.leq(Var(var), Num(rng.randint(2, 12))))
            body = And(guard, body) if k == "E" else Implies(guard, body)
        return (Exists if k == "E" else Forall)(var, NAT, body)
    cls = {"&": And, "|": Or, ">": Implies, "\\": Minus}[k]
    return cls(random_formula(rng, d, scope, quantifiers, connectives, skolems, bounded),
               random_formula(rng, d, scope, quantifiers, connectives, skolems, bounded))


def random_state(rng, indices, codes=8, values=10, density=0.5):
    pts = {}
    for i in indices:
        for n in range(codes):
            if rng.random() < density:
                pts[(i, n)] = rng.randrange(values)
    return State(pts)


def positive_formula(rng, depth, scope=(), skolems=()):
    """A formula built from atoms with and, or, minus and exists only.

    The right side of a minus is kept free of minus and quantifiers, so its
    negation introduces neither an implication nor a universal.
    """
    scope = list(scope)
    if depth <= 0 or rng.random() < 0.25:
        return random_atom(rng, scope, skolems)
    k = rng.choice("&|\\EE")
    d = depth - 1
    if k == "E":
        var = next((v for v in VAR_NAMES if v not in scope), None) or f"q{len(scope)}"
        return Exists(var, NAT, positive_formula(rng, d, scope + [var], skolems))
    if k == "\\":
        right = random_formula(rng, min(d, 2), scope, quantifiers=False, connectives="&|",
                               skolems=skolems)
        return Minus(positive_formula(rng, d, scope, skolems), right)
    cls = And if k == "&" else Or
    return cls(positive_formula(rng, d, scope, skolems), positive_formula(rng, d, scope, skolems))


def registry_with(rng, count=3):
    """A registry holding ``count`` random quantifier-free formulas A(x, y)."""
    from irk.logic import SkolemRegistry
    reg = SkolemRegistry()
    while len(reg) < 2 * count:
        f = random_formula(rng, 2, scope=["x", "y"], quantifiers=False, connectives="&|")
        try:
            reg.register(f, ["x"], "y")
        except ValueError:
            pass
    return reg
