"""Formulas of classical arithmetic with Skolem functions.

Formulas bind variables by name; atoms are Bool-typed terms whose free
variables refer to those names.  The module also holds the tuple coding used
for Skolem arguments and the registry associating each Skolem constant
``phi{i}`` with its formula ``A(x1..xk, y)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import isqrt
from typing import Optional, Sequence, Union

from . import library as lib
from .kernel import (
    BOOL, FALSE, NAT, App, Def, Num, SimpleType, Term, Var, contains_skolem,
    TypeCheckError, free_vars, lams, skolem, substitute, typecheck,
)


def _strip_double_negations(t: Term) -> Term:
    while (isinstance(t, App) and t.fun == Def("not")
           and isinstance(t.arg, App) and t.arg.fun == Def("not")):
        t = t.arg.arg
    return t


@dataclass(frozen=True)
class Atomic:
    """An atomic formula.  Leading pairs of boolean negations are removed, so
    every atom is stored as its positive core or a single negation of it."""
    term: Term

    def __post_init__(self):
        object.__setattr__(self, "term", _strip_double_negations(self.term))


@dataclass(frozen=True)
class And:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Or:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Implies:
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Minus:
    """``A \\ B``: A and the opposite of B (dual of implication)."""
    left: "Formula"
    right: "Formula"


@dataclass(frozen=True)
class Forall:
    var: str
    ty: SimpleType
    body: "Formula"


@dataclass(frozen=True)
class Exists:
    var: str
    ty: SimpleType
    body: "Formula"


Formula = Union[Atomic, And, Or, Implies, Minus, Forall, Exists]
BINARY = (And, Or, Implies, Minus)
QUANTIFIERS = (Forall, Exists)

BOTTOM = Atomic(FALSE)


def neg(f: Formula) -> Formula:
    """``not A`` as ``A -> bottom``."""
    return Implies(f, BOTTOM)


def forall_many(names: Sequence[str], body: Formula, ty=NAT) -> Formula:
    for name in reversed(list(names)):
        body = Forall(name, ty, body)
    return body


# ----------------------------------------------------------------------------
# Structural helpers


def free_vars_formula(f: Formula) -> list[str]:
    """Free variables in order of first occurrence."""
    out: dict[str, None] = {}

    def walk(g, bound):
        if isinstance(g, Atomic):
            for v in free_vars(g.term):
                if v not in bound:
                    out.setdefault(v)
        elif isinstance(g, BINARY):
            walk(g.left, bound)
            walk(g.right, bound)
        else:
            walk(g.body, bound | {g.var})
    walk(f, frozenset())
    return list(out)


def _fresh_name(base: str, avoid: set[str]) -> str:
    name = base
    while name in avoid:
        name += "'"
    return name


def subst_formula(f: Formula, bindings: dict[str, Term]) -> Formula:
    """Capture-avoiding substitution of terms for free variables."""
    if not bindings:
        return f
    if isinstance(f, Atomic):
        return Atomic(substitute(f.term, bindings))
    if isinstance(f, BINARY):
        return type(f)(subst_formula(f.left, bindings), subst_formula(f.right, bindings))
    inner = {k: v for k, v in bindings.items() if k != f.var}
    if not inner:
        return f
    image_vars = {v for t in inner.values() for v in free_vars(t)}
    var, body = f.var, f.body
    if var in image_vars:
        avoid = image_vars | set(free_vars_formula(body)) | set(inner)
        new = _fresh_name(var, avoid)
        body = subst_formula(body, {var: Var(new)})
        var = new
    return type(f)(var, f.ty, subst_formula(body, inner))


def instantiate_formula(f: Formula, values: dict[str, int]) -> Formula:
    return subst_formula(f, {k: Num(v) for k, v in values.items()})


def map_atoms(f: Formula, fn) -> Formula:
    if isinstance(f, Atomic):
        return Atomic(fn(f.term))
    if isinstance(f, BINARY):
        return type(f)(map_atoms(f.left, fn), map_atoms(f.right, fn))
    return type(f)(f.var, f.ty, map_atoms(f.body, fn))


def formula_depth(f: Formula) -> int:
    if isinstance(f, Atomic):
        return 0
    if isinstance(f, BINARY):
        return 1 + max(formula_depth(f.left), formula_depth(f.right))
    return 1 + formula_depth(f.body)


def is_arithmetical(f: Formula) -> bool:
    if isinstance(f, Atomic):
        return not contains_skolem(f.term)
    if isinstance(f, BINARY):
        return is_arithmetical(f.left) and is_arithmetical(f.right)
    return f.ty == NAT and is_arithmetical(f.body)


def is_quantifier_free(f: Formula) -> bool:
    if isinstance(f, Atomic):
        return True
    if isinstance(f, BINARY):
        return is_quantifier_free(f.left) and is_quantifier_free(f.right)
    return False


def check_formula(f: Formula, ctx: Optional[dict] = None):
    """Raise ``TypeCheckError`` unless every atom is Bool-typed in scope."""
    ctx = dict(ctx or {})
    if isinstance(f, Atomic):
        ty = typecheck(f.term, ctx)
        if ty != BOOL:
            raise TypeCheckError(("atom",), BOOL, ty)
    elif isinstance(f, BINARY):
        check_formula(f.left, ctx)
        check_formula(f.right, ctx)
    else:
        check_formula(f.body, {**ctx, f.var: f.ty})


# ----------------------------------------------------------------------------
# Involutive negation


def _negate_atom(t: Term) -> Term:
    if isinstance(t, App) and t.fun == Def("not"):
        return t.arg
    return lib.not_(t)


def inv_negate(f: Formula) -> Formula:
    if isinstance(f, Atomic):
        return Atomic(_negate_atom(f.term))
    if isinstance(f, And):
        return Or(inv_negate(f.left), inv_negate(f.right))
    if isinstance(f, Or):
        return And(inv_negate(f.left), inv_negate(f.right))
    if isinstance(f, Implies):
        return Minus(f.left, f.right)
    if isinstance(f, Minus):
        return Implies(f.left, f.right)
    if isinstance(f, Forall):
        return Exists(f.var, f.ty, inv_negate(f.body))
    return Forall(f.var, f.ty, inv_negate(f.body))


# ----------------------------------------------------------------------------
# Tuple coding


def cantor_unpair(z: int) -> tuple[int, int]:
    w = (isqrt(8 * z + 1) - 1) // 2
    b = z - w * (w + 1) // 2
    return w - b, b


def encode_tuple(ns: Sequence[int]) -> int:
    """Right-nested Cantor coding; arity 1 is the identity and the empty tuple is 0."""
    ns = list(ns)
    if not ns:
        return 0
    code = ns[-1]
    for a in reversed(ns[:-1]):
        code = lib.cantor_pair(a, code)
    return code


def decode_tuple(code: int, arity: int) -> Optional[tuple[int, ...]]:
    """Inverse of ``encode_tuple`` at a fixed arity (None if ``code`` is not a code)."""
    if arity == 0:
        return () if code == 0 else None
    out = []
    for _ in range(arity - 1):
        a, code = cantor_unpair(code)
        out.append(a)
    out.append(code)
    return tuple(out)


def code_of(args: Sequence[Term]) -> Term:
    """The T term computing the code of the tuple of ``args``."""
    args = list(args)
    if not args:
        return Num(0)
    code = args[-1]
    for a in reversed(args[:-1]):
        code = lib.app_def("cpair", a, code)
    return code


def code_term(k: int) -> Term:
    """Closed term of type Nat^k -> Nat coding k-tuples."""
    if k < 1:
        raise ValueError("code_term needs arity >= 1")
    names = [f"x{j}" for j in range(1, k + 1)]
    return lams([(n, NAT) for n in names], code_of([Var(n) for n in names]))


# ----------------------------------------------------------------------------
# Skolem registry


class UnregisteredIndex(KeyError):
    pass


class NotArithmetical(ValueError):
    pass


@dataclass(frozen=True)
class SkolemEntry:
    index: int
    formula: Formula          # A(params, witness)
    params: tuple[str, ...]   # x1..xk, coded in this order
    witness: str              # y

    @property
    def arity(self) -> int:
        return len(self.params)


def _canonical(f: Formula, params: Sequence[str], witness: str) -> Formula:
    names = {p: f"_x{j}" for j, p in enumerate(params)}
    names[witness] = "_y"

    def walk(g, env, depth):
        if isinstance(g, Atomic):
            return Atomic(substitute(g.term, {k: Var(v) for k, v in env.items()}))
        if isinstance(g, BINARY):
            return type(g)(walk(g.left, env, depth), walk(g.right, env, depth))
        new = f"_b{depth}"
        return type(g)(new, g.ty, walk(g.body, {**env, g.var: new}, depth + 1))
    return walk(f, names, 0)


class SkolemRegistry:
    """Bijective table between indices and formulas ``A(x1..xk, y)``.

    Registering ``A`` also registers its involutive negation with the same
    variables, because truth of universal formulas uses ``phi`` of the
    negated body.
    """

    def __init__(self):
        self._entries: list[SkolemEntry] = []
        self._by_key: dict[tuple, int] = {}
        # Compiled truth terms keyed by (formula, params); filled by the truth engine.
        self.compiled: dict[tuple, object] = {}

    def __len__(self):
        return len(self._entries)

    def __iter__(self):
        return iter(self._entries)

    def __contains__(self, i) -> bool:
        return isinstance(i, int) and 0 <= i < len(self._entries)

    def indices(self) -> range:
        return range(len(self._entries))

    def _key(self, f, params, witness):
        return (_canonical(f, params, witness), len(params))

    def index_of(self, f: Formula, params: Sequence[str], witness: str) -> Optional[int]:
        return self._by_key.get(self._key(f, params, witness))

    def register(self, f: Formula, params: Sequence[str], witness: str) -> int:
        params = tuple(params)
        if not is_arithmetical(f):
            raise NotArithmetical("Skolem formulas must be arithmetical")
        extra = set(free_vars_formula(f)) - set(params) - {witness}
        if extra or witness in params or len(set(params)) != len(params):
            raise ValueError(f"formula must be closed except for {params} and {witness}")
        index = self._add(f, params, witness)
        self._add(inv_negate(f), params, witness)
        return index

    def _add(self, f, params, witness):
        key = self._key(f, params, witness)
        if key in self._by_key:
            return self._by_key[key]
        index = len(self._entries)
        self._entries.append(SkolemEntry(index, f, params, witness))
        self._by_key[key] = index
        return index

    def entry(self, i: int) -> SkolemEntry:
        if i not in self:
            raise UnregisteredIndex(i)
        return self._entries[i]

    def to_json(self, print_formula) -> list[dict]:
        return [{"index": e.index, "formula": print_formula(e.formula), "arity": e.arity,
                 "params": list(e.params), "witness": e.witness} for e in self._entries]

    @classmethod
    def from_json(cls, data, parse_formula) -> "SkolemRegistry":
        reg = cls()
        for row in sorted(data, key=lambda r: r["index"]):
            f = parse_formula(row["formula"])
            if len(row.get("params", [])) != row["arity"]:
                raise ValueError(f"registry row {row['index']}: arity mismatch")
            reg._entries.append(SkolemEntry(row["index"], f, tuple(row["params"]), row["witness"]))
            reg._by_key.setdefault(reg._key(f, row["params"], row["witness"]), row["index"])
            if reg._entries[-1].index != len(reg._entries) - 1:
                raise ValueError("registry indices must be 0..n-1")
        return reg


Gamma = Optional[frozenset]


def in_gamma(i: int, gamma: Gamma, registry: SkolemRegistry) -> bool:
    """Membership in Gamma; ``None`` stands for every registered index."""
    if i not in registry:
        return False
    return gamma is None or i in gamma


def sk_axiom(i: int, registry: SkolemRegistry) -> Formula:
    """``forall xs. (exists y. A(xs, y)) -> A(xs, phi_i <xs>)``."""
    e = registry.entry(i)
    oracle = App(skolem(i), code_of([Var(p) for p in e.params]))
    body = Implies(Exists(e.witness, NAT, e.formula),
                   subst_formula(e.formula, {e.witness: oracle}))
    return forall_many(e.params, body)


def em_axiom(f: Formula) -> Formula:
    """``forall xs. A(xs) or not A(xs)`` over the free variables of ``A``."""
    if not is_arithmetical(f):
        raise NotArithmetical("excluded middle is stated for arithmetical formulas")
    return forall_many(free_vars_formula(f), Or(f, neg(f)))


def atom_of(f: Formula) -> Formula:
    """A quantifier-free formula as one atom over the boolean connectives."""
    if isinstance(f, Atomic):
        return f
    return Atomic(qf_term(f))


def qf_term(f: Formula) -> Term:
    if isinstance(f, Atomic):
        return f.term
    if isinstance(f, And):
        return lib.and_(qf_term(f.left), qf_term(f.right))
    if isinstance(f, Or):
        return lib.or_(qf_term(f.left), qf_term(f.right))
    if isinstance(f, Implies):
        return lib.imp(qf_term(f.left), qf_term(f.right))
    if isinstance(f, Minus):
        return lib.and_(qf_term(f.left), qf_term(inv_negate(f.right)))
    raise ValueError("formula has quantifiers")
