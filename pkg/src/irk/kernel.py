"""Types and terms of System T extended with updates and Skolem oracles.

Bound variables are de Bruijn indices (``BVar``), free variables are names
(``Var``).  Binder names survive only as printing hints and do not take part
in equality, so alpha-equivalent terms are equal Python values.

Numerals are stored compactly: ``Num(3)`` is the numeral ``S(S(S(0)))``.
``mk_app`` folds ``S`` applied to a numeral into the next numeral.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping, Optional, Union

from .updates import Update

# ----------------------------------------------------------------------------
# Types


@dataclass(frozen=True)
class Base:
    name: str

    def __str__(self):
        return self.name


@dataclass(frozen=True)
class Arrow:
    dom: "SimpleType"
    cod: "SimpleType"

    def __str__(self):
        return type_to_text(self)


@dataclass(frozen=True)
class Prod:
    left: "SimpleType"
    right: "SimpleType"

    def __str__(self):
        return type_to_text(self)


SimpleType = Union[Base, Arrow, Prod]

NAT = Base("Nat")
BOOL = Base("Bool")
UPDATE = Base("Update")
ATOMIC_TYPES = (NAT, BOOL, UPDATE)


def arrow(*types: SimpleType) -> SimpleType:
    """Right-nested function type: ``arrow(a, b, c)`` is ``a -> (b -> c)``."""
    result = types[-1]
    for ty in reversed(types[:-1]):
        result = Arrow(ty, result)
    return result


def type_to_text(ty: SimpleType) -> str:
    if isinstance(ty, Base):
        return ty.name
    if isinstance(ty, Prod):
        left = type_to_text(ty.left)
        right = type_to_text(ty.right)
        if isinstance(ty.left, (Arrow, Prod)):
            left = f"({left})"
        if isinstance(ty.right, Arrow):
            right = f"({right})"
        return f"{left} * {right}"
    dom = type_to_text(ty.dom)
    if isinstance(ty.dom, Arrow):
        dom = f"({dom})"
    return f"{dom} -> {type_to_text(ty.cod)}"


# ----------------------------------------------------------------------------
# Terms


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class BVar:
    index: int


@dataclass(frozen=True)
class Num:
    value: int

    def __post_init__(self):
        if self.value < 0:
            raise ValueError("numerals are natural numbers")


@dataclass(frozen=True)
class Const:
    """A constant of the calculus.

    ``arg`` carries the type annotation of ``if``/``rec``, the payload of an
    update constant ``upd`` and the index of a Skolem constant ``phi``.
    """
    tag: str
    arg: object = None


@dataclass(frozen=True)
class Def:
    """A named closed term of the boolean/arithmetic library."""
    name: str


@dataclass(frozen=True)
class App:
    fun: "Term"
    arg: "Term"


@dataclass(frozen=True)
class Lam:
    ty: SimpleType
    body: "Term"
    hint: str = field(default="x", compare=False)


@dataclass(frozen=True)
class Pair:
    left: "Term"
    right: "Term"


@dataclass(frozen=True)
class Proj:
    side: int
    arg: "Term"


Term = Union[Var, BVar, Num, Const, Def, App, Lam, Pair, Proj]

CONST_TAGS = ("S", "true", "false", "if", "rec", "min", "get", "mkupd", "cup", "upd", "phi")

ZERO = Num(0)
SUCC = Const("S")
TRUE = Const("true")
FALSE = Const("false")
MIN = Const("min")
GET = Const("get")
MKUPD = Const("mkupd")
CUP = Const("cup")


def if_(ty: SimpleType) -> Const:
    return Const("if", ty)


def rec(ty: SimpleType) -> Const:
    return Const("rec", ty)


def upconst(u: Update) -> Const:
    return Const("upd", u)


def skolem(i: int) -> Const:
    return Const("phi", i)


def boolean(b: bool) -> Const:
    return TRUE if b else FALSE


def mk_app(fun: Term, *args: Term) -> Term:
    for arg in args:
        if fun == SUCC and isinstance(arg, Num):
            fun = Num(arg.value + 1)
        else:
            fun = App(fun, arg)
    return fun


def numeral(n: int) -> Num:
    return Num(n)


class NotANumeral(ValueError):
    pass


def read_numeral(t: Term) -> int:
    """Value of a numeral, accepting both ``Num`` and explicit ``S`` chains."""
    k = 0
    while isinstance(t, App) and t.fun == SUCC:
        k += 1
        t = t.arg
    if isinstance(t, Num):
        return k + t.value
    raise NotANumeral(f"not a numeral: {t!r}")


def spine(t: Term) -> tuple[Term, list[Term]]:
    """Split ``f a1 ... an`` into ``(f, [a1, ..., an])``."""
    args = []
    while isinstance(t, App):
        args.append(t.arg)
        t = t.fun
    args.reverse()
    return t, args


# ----------------------------------------------------------------------------
# Binding


def _shift_free(t: Term, depth: int, fn) -> Term:
    # Rebuild t, calling fn(name_or_index_node, depth) at variable leaves.
    if isinstance(t, (Var, BVar)):
        return fn(t, depth)
    if isinstance(t, App):
        return App(_shift_free(t.fun, depth, fn), _shift_free(t.arg, depth, fn))
    if isinstance(t, Lam):
        return Lam(t.ty, _shift_free(t.body, depth + 1, fn), t.hint)
    if isinstance(t, Pair):
        return Pair(_shift_free(t.left, depth, fn), _shift_free(t.right, depth, fn))
    if isinstance(t, Proj):
        return Proj(t.side, _shift_free(t.arg, depth, fn))
    return t


def abstract(name: str, body: Term) -> Term:
    """Turn free occurrences of ``name`` into the de Bruijn index of a new binder."""
    def leaf(v, depth):
        if isinstance(v, Var) and v.name == name:
            return BVar(depth)
        return v
    return _shift_free(body, 0, leaf)


def lam(name: str, ty: SimpleType, body: Term) -> Lam:
    return Lam(ty, abstract(name, body), name)


def lams(params, body: Term) -> Term:
    """``lams([("x", NAT), ("y", NAT)], b)`` is ``\\x:Nat. \\y:Nat. b``."""
    for name, ty in reversed(list(params)):
        body = lam(name, ty, body)
    return body


def instantiate(body: Term, value: Term) -> Term:
    """Replace the outermost dangling index 0 of ``body`` by a locally closed ``value``."""
    def leaf(v, depth):
        if isinstance(v, BVar) and v.index == depth:
            return value
        if isinstance(v, BVar) and v.index > depth:
            return BVar(v.index - 1)
        return v
    return _shift_free(body, 0, leaf)


def free_vars(t: Term) -> list[str]:
    """Free variable names in order of first occurrence."""
    seen: dict[str, None] = {}

    def walk(u):
        if isinstance(u, Var):
            seen.setdefault(u.name)
        elif isinstance(u, App):
            walk(u.fun)
            walk(u.arg)
        elif isinstance(u, Lam):
            walk(u.body)
        elif isinstance(u, Pair):
            walk(u.left)
            walk(u.right)
        elif isinstance(u, Proj):
            walk(u.arg)
    walk(t)
    return list(seen)


def substitute(t: Term, bindings: Mapping[str, Term]) -> Term:
    """Simultaneous substitution for free variables.

    Binding images must be locally closed (no dangling indices), which every
    term built through the public constructors is.  Because bound variables
    are indices, no renaming is ever needed.
    """
    if not bindings:
        return t

    def leaf(v, depth):
        if isinstance(v, Var) and v.name in bindings:
            return bindings[v.name]
        return v
    return _shift_free(t, 0, leaf)


def contains_skolem(t: Term) -> bool:
    if isinstance(t, Const):
        return t.tag == "phi"
    if isinstance(t, App):
        return contains_skolem(t.fun) or contains_skolem(t.arg)
    if isinstance(t, Lam):
        return contains_skolem(t.body)
    if isinstance(t, Pair):
        return contains_skolem(t.left) or contains_skolem(t.right)
    if isinstance(t, Proj):
        return contains_skolem(t.arg)
    return False


def skolem_indices(t: Term) -> set[int]:
    found: set[int] = set()

    def walk(u):
        if isinstance(u, Const) and u.tag == "phi":
            found.add(u.arg)
        elif isinstance(u, App):
            walk(u.fun)
            walk(u.arg)
        elif isinstance(u, Lam):
            walk(u.body)
        elif isinstance(u, Pair):
            walk(u.left)
            walk(u.right)
        elif isinstance(u, Proj):
            walk(u.arg)
    walk(t)
    return found


def replace_skolems(t: Term, fn) -> Term:
    """Replace every ``phi{i}`` by ``fn(i)`` (a closed term)."""
    if isinstance(t, Const) and t.tag == "phi":
        return fn(t.arg)
    if isinstance(t, App):
        return App(replace_skolems(t.fun, fn), replace_skolems(t.arg, fn))
    if isinstance(t, Lam):
        return Lam(t.ty, replace_skolems(t.body, fn), t.hint)
    if isinstance(t, Pair):
        return Pair(replace_skolems(t.left, fn), replace_skolems(t.right, fn))
    if isinstance(t, Proj):
        return Proj(t.side, replace_skolems(t.arg, fn))
    return t


def term_size(t: Term) -> int:
    if isinstance(t, App):
        return 1 + term_size(t.fun) + term_size(t.arg)
    if isinstance(t, Lam):
        return 1 + term_size(t.body)
    if isinstance(t, Pair):
        return 1 + term_size(t.left) + term_size(t.right)
    if isinstance(t, Proj):
        return 1 + term_size(t.arg)
    return 1


# ----------------------------------------------------------------------------
# Typing

# Types of the library definitions; bodies live in irk.library.
DEF_TYPES: dict[str, SimpleType] = {
    "not": arrow(BOOL, BOOL),
    "and": arrow(BOOL, BOOL, BOOL),
    "or": arrow(BOOL, BOOL, BOOL),
    "imp": arrow(BOOL, BOOL, BOOL),
    "iszero": arrow(NAT, BOOL),
    "pred": arrow(NAT, NAT),
    "add": arrow(NAT, NAT, NAT),
    "sub": arrow(NAT, NAT, NAT),
    "mul": arrow(NAT, NAT, NAT),
    "leq": arrow(NAT, NAT, BOOL),
    "lt": arrow(NAT, NAT, BOOL),
    "eq": arrow(NAT, NAT, BOOL),
    "tri": arrow(NAT, NAT),
    "cpair": arrow(NAT, NAT, NAT),
}


class TypeCheckError(Exception):
    """No typing rule applies.

    ``path`` lists the steps from the root to the offending subterm
    (``fun``, ``arg``, ``body``, ``left``, ``right``, ``proj``).
    """

    def __init__(self, path, expected, found, message=""):
        self.path = tuple(path)
        self.expected = expected
        self.found = found
        where = "/".join(self.path) or "<root>"
        super().__init__(message or f"at {where}: expected {expected}, found {found}")


def const_type(c: Const) -> SimpleType:
    tag = c.tag
    if tag == "S":
        return arrow(NAT, NAT)
    if tag in ("true", "false"):
        return BOOL
    if tag == "if":
        return arrow(BOOL, c.arg, c.arg, c.arg)
    if tag == "rec":
        ty = c.arg
        return arrow(ty, arrow(NAT, ty, ty), NAT, ty)
    if tag == "min":
        return arrow(UPDATE, NAT)
    if tag == "get":
        return arrow(UPDATE, NAT, NAT, NAT, NAT)
    if tag == "mkupd":
        return arrow(NAT, NAT, NAT, UPDATE)
    if tag == "cup":
        return arrow(UPDATE, UPDATE, UPDATE)
    if tag == "upd":
        if not isinstance(c.arg, Update):
            raise TypeCheckError((), "an update payload", c.arg)
        return UPDATE
    if tag == "phi":
        return arrow(NAT, NAT)
    raise TypeCheckError((), "a known constant", tag)


def typecheck(t: Term, ctx: Optional[Mapping[str, SimpleType]] = None) -> SimpleType:
    """The unique type of ``t`` under ``ctx`` (a mapping from free names to types)."""
    return _infer(t, dict(ctx or {}), [], [])


def _infer(t, ctx, bound, path) -> SimpleType:
    if isinstance(t, Var):
        if t.name not in ctx:
            raise TypeCheckError(path, "a bound or declared variable", t.name,
                                 f"at {'/'.join(path) or '<root>'}: unbound variable {t.name}")
        return ctx[t.name]
    if isinstance(t, BVar):
        if t.index >= len(bound):
            raise TypeCheckError(path, "an index below the binder depth", t.index)
        return bound[-1 - t.index]
    if isinstance(t, Num):
        return NAT
    if isinstance(t, Const):
        try:
            return const_type(t)
        except TypeCheckError as err:
            raise TypeCheckError(path, err.expected, err.found) from None
    if isinstance(t, Def):
        if t.name not in DEF_TYPES:
            raise TypeCheckError(path, "a library definition", t.name)
        return DEF_TYPES[t.name]
    if isinstance(t, App):
        fty = _infer(t.fun, ctx, bound, path + ["fun"])
        if not isinstance(fty, Arrow):
            raise TypeCheckError(path + ["fun"], "a function type", fty)
        aty = _infer(t.arg, ctx, bound, path + ["arg"])
        if aty != fty.dom:
            raise TypeCheckError(path + ["arg"], fty.dom, aty)
        return fty.cod
    if isinstance(t, Lam):
        body = _infer(t.body, ctx, bound + [t.ty], path + ["body"])
        return Arrow(t.ty, body)
    if isinstance(t, Pair):
        return Prod(_infer(t.left, ctx, bound, path + ["left"]),
                    _infer(t.right, ctx, bound, path + ["right"]))
    if isinstance(t, Proj):
        pty = _infer(t.arg, ctx, bound, path + ["proj"])
        if not isinstance(pty, Prod):
            raise TypeCheckError(path + ["proj"], "a product type", pty)
        return pty.left if t.side == 0 else pty.right
    raise TypeCheckError(path, "a term", t)
