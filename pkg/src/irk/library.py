"""Boolean connectives and arithmetic as closed terms of System T.

Each definition has a body built only from the core constants, and a native
Python shortcut used by the evaluator when its arguments are literals.  The
natives force arguments in the same order and with the same laziness as the
bodies (``and false b`` never looks at ``b``), so oracle logs do not depend on
which route computed a value.
"""

from __future__ import annotations

from .kernel import (
    BOOL, FALSE, NAT, SUCC, TRUE, ZERO, Def, Var, if_, lams, mk_app, rec,
)

_x, _y, _k, _r, _n, _a, _b = (Var(v) for v in "xykrnab")


def _bodies():
    nn = [("x", NAT), ("y", NAT)]
    bb = [("a", BOOL), ("b", BOOL)]
    step = lambda body: lams([("k", NAT), ("r", NAT)], body)  # noqa: E731
    return {
        "not": lams([("b", BOOL)], mk_app(if_(BOOL), _b, FALSE, TRUE)),
        "and": lams(bb, mk_app(if_(BOOL), _a, _b, FALSE)),
        "or": lams(bb, mk_app(if_(BOOL), _a, TRUE, _b)),
        "imp": lams(bb, mk_app(if_(BOOL), _a, _b, TRUE)),
        "iszero": lams([("n", NAT)], mk_app(
            rec(BOOL), TRUE, lams([("k", NAT), ("r", BOOL)], FALSE), _n)),
        "pred": lams([("n", NAT)], mk_app(rec(NAT), ZERO, step(_k), _n)),
        "add": lams(nn, mk_app(rec(NAT), _x, step(mk_app(SUCC, _r)), _y)),
        "sub": lams(nn, mk_app(rec(NAT), _x, step(mk_app(Def("pred"), _r)), _y)),
        "mul": lams(nn, mk_app(rec(NAT), ZERO, step(mk_app(Def("add"), _r, _x)), _y)),
        "leq": lams(nn, mk_app(Def("iszero"), mk_app(Def("sub"), _x, _y))),
        "lt": lams(nn, mk_app(Def("leq"), mk_app(SUCC, _x), _y)),
        "eq": lams(nn, mk_app(Def("and"), mk_app(Def("leq"), _x, _y),
                              mk_app(Def("leq"), _y, _x))),
        "tri": lams([("n", NAT)], mk_app(
            rec(NAT), ZERO, step(mk_app(Def("add"), _r, mk_app(SUCC, _k))), _n)),
        "cpair": lams([("a", NAT), ("b", NAT)], mk_app(
            Def("add"), mk_app(Def("tri"), mk_app(Def("add"), _a, _b)), _b)),
    }


BODIES = _bodies()

ARITY = {"not": 1, "iszero": 1, "pred": 1, "tri": 1}
ARITY.update({name: 2 for name in BODIES if name not in ARITY})


def cantor_pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


# A native takes a list of zero-argument "force" callables, one per argument,
# and returns either a Python value or NotImplemented when a forced argument
# is not a literal (the evaluator then unfolds the body instead).

def _lit(v, kind):
    return isinstance(v, kind) and (kind is not int or not isinstance(v, bool))


def _native_not(force):
    b = force[0]()
    return (not b) if _lit(b, bool) else NotImplemented


def _bool_connective(short_value, short_result, otherwise):
    # Mirrors `if a <short_result or b> ...` style bodies: force a, and only
    # force b when a does not decide the result.
    def native(force):
        a = force[0]()
        if not _lit(a, bool):
            return NotImplemented
        if a == short_value:
            return short_result
        return otherwise(force[1])
    return native


def _second(force_b):
    b = force_b()
    return b if _lit(b, bool) else _Residual(b)


class _Residual:
    """A non-literal result the native may return as-is (``and true b`` is ``b``)."""
    __slots__ = ("value",)

    def __init__(self, value):
        self.value = value


def _strict_nat(fn, order=(1, 0)):
    def native(force):
        vals = [None, None]
        for i in order:
            vals[i] = force[i]()
            if not _lit(vals[i], int):
                return NotImplemented
        return fn(vals[0], vals[1])
    return native


def _native_mul(force):
    y = force[1]()
    if not _lit(y, int):
        return NotImplemented
    if y == 0:
        return 0
    x = force[0]()
    if not _lit(x, int):
        return NotImplemented
    return x * y


def _unary_nat(fn):
    def native(force):
        n = force[0]()
        return fn(n) if _lit(n, int) else NotImplemented
    return native


NATIVES = {
    "not": _native_not,
    "and": _bool_connective(False, False, _second),
    "or": _bool_connective(True, True, _second),
    "imp": _bool_connective(False, True, _second),
    "iszero": _unary_nat(lambda n: n == 0),
    "pred": _unary_nat(lambda n: max(n - 1, 0)),
    "tri": _unary_nat(lambda n: n * (n + 1) // 2),
    "add": _strict_nat(lambda x, y: x + y),
    "sub": _strict_nat(lambda x, y: max(x - y, 0)),
    "mul": _native_mul,
    "leq": _strict_nat(lambda x, y: x <= y),
    "lt": _strict_nat(lambda x, y: x < y),
    "eq": _strict_nat(lambda x, y: x == y),
    "cpair": _strict_nat(cantor_pair),
}

Residual = _Residual

# Convenience builders for terms over the library.


def app_def(name, *args):
    return mk_app(Def(name), *args)


def eq(a, b):
    return app_def("eq", a, b)


def lt(a, b):
    return app_def("lt", a, b)


def leq(a, b):
    return app_def("leq", a, b)


def add(a, b):
    return app_def("add", a, b)


def mul(a, b):
    return app_def("mul", a, b)


def sub(a, b):
    return app_def("sub", a, b)


def and_(a, b):
    return app_def("and", a, b)


def or_(a, b):
    return app_def("or", a, b)


def imp(a, b):
    return app_def("imp", a, b)


def not_(a):
    return app_def("not", a)
