"""Realizer types, checking ``t realizes F at s``, and canonical EM/SK realizers.

``check_at`` evaluates the candidate once at the state and walks the formula
alongside the resulting value.  Clauses for atoms, conjunction, disjunction,
subtraction and existentials are decided exactly.  Universal and implication
clauses quantify over infinitely many terms, so they are tested on a finite
``CandidatePool``: a counterexample gives ``Fails``, and surviving every
candidate gives ``Inconclusive`` rather than ``Realizes``.

``check_mrsf`` is the state-free variant for pure terms.  It works on terms by
normalization and substitution, independently of the value-based walk, and is
used to cross-check ``check_at`` on approximated inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import product
from typing import Optional, Sequence, Union

from . import library as lib
from .evaluator import EvalBudget, IllTyped, Machine, Neutral, normalize, ready
from .kernel import (
    BOOL, CUP, FALSE, MKUPD, NAT, SUCC, TRUE, UPDATE, App, Arrow, Const, Lam,
    NotANumeral, Num, Pair, Prod, Proj, SimpleType, Term, TypeCheckError, Var,
    contains_skolem, if_, lam, lams, mk_app, read_numeral, rec, skolem,
    substitute, type_to_text, typecheck, upconst,
)
from .logic import (
    And, Atomic, Exists, Forall, Formula, Gamma, Implies, Minus, Or,
    SkolemRegistry, atom_of, code_of, decode_tuple, forall_many, in_gamma,
    inv_negate, is_quantifier_free, subst_formula,
)
from .state import State
from .truth import truth_at
from .updates import EMPTY as EMPTY_UPDATE
from .updates import Update


class TypeMismatch(TypeError):
    pass


class MatrixNotDecidable(ValueError):
    pass


# ----------------------------------------------------------------------------
# Verdicts


@dataclass(frozen=True)
class Realizes:
    def to_json(self):
        return {"verdict": "realizes", "clause_path": [], "details": ""}


@dataclass(frozen=True)
class Fails:
    path: tuple[str, ...]
    reason: str

    def to_json(self):
        return {"verdict": "fails", "clause_path": list(self.path), "details": self.reason}


@dataclass(frozen=True)
class Inconclusive:
    which: str   # "sampled-universal" or "sampled-implication"

    def to_json(self):
        return {"verdict": "inconclusive", "clause_path": [], "details": self.which}


RealizerVerdict = Union[Realizes, Fails, Inconclusive]
REALIZES = Realizes()


def _prefix(label: str, v: RealizerVerdict) -> RealizerVerdict:
    if isinstance(v, Fails):
        return Fails((label,) + v.path, v.reason)
    return v


def _both(first: RealizerVerdict, second) -> RealizerVerdict:
    if isinstance(first, Fails):
        return first
    v2 = second()
    if isinstance(v2, Fails):
        return v2
    if isinstance(first, Inconclusive):
        return first
    return v2


# ----------------------------------------------------------------------------
# Realizer types


def realizer_type(f: Formula) -> SimpleType:
    if isinstance(f, Atomic):
        return UPDATE
    if isinstance(f, And):
        return Prod(realizer_type(f.left), realizer_type(f.right))
    if isinstance(f, Or):
        return Prod(BOOL, Prod(realizer_type(f.left), realizer_type(f.right)))
    if isinstance(f, Implies):
        return Arrow(realizer_type(f.left), realizer_type(f.right))
    if isinstance(f, Minus):
        return Prod(realizer_type(f.left), realizer_type(inv_negate(f.right)))
    if isinstance(f, Forall):
        return Arrow(f.ty, realizer_type(f.body))
    return Prod(f.ty, realizer_type(f.body))


def _check_type(t: Term, f: Formula):
    want = realizer_type(f)
    try:
        got = typecheck(t)
    except TypeCheckError as err:
        raise TypeMismatch(f"candidate is ill-typed: {err}") from None
    if got != want:
        raise TypeMismatch(
            f"candidate has type {type_to_text(got)}, expected {type_to_text(want)}")


# ----------------------------------------------------------------------------
# Candidate pools


def _formula_constants(f: Formula) -> set[int]:
    out: set[int] = set()

    def term(t):
        if isinstance(t, Num):
            out.add(t.value)
        elif isinstance(t, App):
            term(t.fun)
            term(t.arg)
        elif isinstance(t, Lam):
            term(t.body)
        elif isinstance(t, Pair):
            term(t.left)
            term(t.right)
        elif isinstance(t, Proj):
            term(t.arg)

    def walk(g):
        if isinstance(g, Atomic):
            term(g.term)
        elif isinstance(g, (And, Or, Implies, Minus)):
            walk(g.left)
            walk(g.right)
        else:
            walk(g.body)
    walk(f)
    return out


def default_nats(f: Optional[Formula] = None, size: int = 16) -> tuple[int, ...]:
    nats = set(range(size))
    if f is not None:
        for c in _formula_constants(f):
            nats.update(v for v in (c - 1, c, c + 1) if v >= 0)
    return tuple(sorted(nats))


def inhabitants(ty: SimpleType, nats: Sequence[int], limit: int = 8) -> list[Term]:
    """A few closed pure terms of type ``ty`` (constant functions for arrows)."""
    if ty == NAT:
        return [Num(n) for n in nats][:limit]
    if ty == BOOL:
        return [TRUE, FALSE]
    if ty == UPDATE:
        return [upconst(EMPTY_UPDATE)]
    if isinstance(ty, Prod):
        pairs = product(inhabitants(ty.left, nats, limit), inhabitants(ty.right, nats, limit))
        return [Pair(a, b) for a, b in pairs][:limit]
    if isinstance(ty, Arrow):
        return [lam("_", ty.dom, body) for body in inhabitants(ty.cod, nats, limit)]
    raise TypeError(f"unknown type {ty!r}")


@dataclass
class CandidatePool:
    """Closed terms used for universal instances and implication antecedents.

    ``nats`` instantiate universals over Nat; ``terms`` maps other types to
    their instances; ``antecedents`` maps formulas to extra candidate
    realizers tried for implications (on top of the generated ones).
    """
    nats: tuple[int, ...] = tuple(range(16))
    terms: dict = field(default_factory=dict)
    antecedents: dict = field(default_factory=dict)
    limit: int = 16

    @classmethod
    def for_formula(cls, f: Formula, **kw) -> "CandidatePool":
        return cls(nats=default_nats(f), **kw)

    def instances(self, ty: SimpleType) -> list[Term]:
        if ty == NAT:
            return [Num(n) for n in self.nats]
        if ty in self.terms:
            return list(self.terms[ty])
        return inhabitants(ty, self.nats, self.limit)

    def antecedent_candidates(self, f: Formula) -> list[Term]:
        """Canonical shapes for ``f`` plus any user-supplied realizers."""
        return list(self.antecedents.get(f, ())) + _shaped(f, self)


def _shaped(f: Formula, pool: CandidatePool) -> list[Term]:
    # Realizers built from the formula's shape: witnesses from the pool paired
    # with empty updates, both disjunction sides, constant functions.
    if isinstance(f, Atomic):
        return [upconst(EMPTY_UPDATE)]
    if isinstance(f, Exists):
        return [Pair(u, b) for u in pool.instances(f.ty)[:pool.limit]
                for b in _shaped(f.body, pool)[:2]]
    if isinstance(f, (And, Minus)):
        right = f.right if isinstance(f, And) else inv_negate(f.right)
        return [Pair(a, b) for a, b in product(_shaped(f.left, pool)[:4], _shaped(right, pool)[:4])]
    if isinstance(f, Or):
        a = _shaped(f.left, pool)[:4]
        b = _shaped(f.right, pool)[:4]
        da, db = inhabitants(realizer_type(f.left), pool.nats, 1), inhabitants(realizer_type(f.right), pool.nats, 1)
        return ([Pair(TRUE, Pair(x, db[0])) for x in a]
                + [Pair(FALSE, Pair(da[0], y)) for y in b])
    if isinstance(f, Forall):
        return [lam("_", f.ty, b) for b in _shaped(f.body, pool)[:4]]
    return inhabitants(realizer_type(f), pool.nats, 4)


# ----------------------------------------------------------------------------
# Clause 1: updates must correct the state


def clause_one(u: Update, s: State, registry: SkolemRegistry, gamma: Gamma,
               budget: Optional[EvalBudget] = None) -> Optional[str]:
    """Reason why the nonempty update ``u`` is not a legitimate correction of ``s``."""
    for i, code, m in u:
        if not in_gamma(i, gamma, registry):
            return f"triple ({i},{code},{m}): index {i} is not in Gamma"
        entry = registry.entry(i)
        ns = decode_tuple(code, entry.arity)
        if ns is None:
            return f"triple ({i},{code},{m}): {code} codes no {entry.arity}-tuple"
        params = entry.params + (entry.witness,)
        if truth_at(entry.formula, list(ns) + [s(i, code)], s, registry, params, budget):
            return f"triple ({i},{code},{m}): current value {s(i, code)} is already a witness"
        if not truth_at(entry.formula, list(ns) + [m], s, registry, params, budget):
            return f"triple ({i},{code},{m}): {m} is not a witness"
    return None


# ----------------------------------------------------------------------------
# Value-based checker


class _Checker:
    def __init__(self, s, registry, gamma, pool, budget):
        self.s, self.registry, self.gamma, self.pool = s, registry, gamma, pool
        self.budget = budget
        self.m = Machine(s, budget)

    def atom(self, term: Term, env: dict) -> bool:
        m = Machine(self.s, self.budget, free=env)
        v = m.eval(term, None)
        if not isinstance(v, bool):
            raise IllTyped("atom did not evaluate to a boolean")
        return v

    def check(self, v, f: Formula, env: dict) -> RealizerVerdict:
        m = self.m
        if isinstance(f, Atomic):
            if not isinstance(v, Update):
                raise IllTyped("realizer of an atom is not an update literal")
            if v:
                reason = clause_one(v, self.s, self.registry, self.gamma, self.budget)
                return Fails(("atomic",), reason) if reason else REALIZES
            if not self.atom(f.term, env):
                return Fails(("atomic",), "empty update but the atom is false")
            return REALIZES
        if isinstance(f, And):
            return _both(_prefix("and.left", self.check(m.project(v, 0), f.left, env)),
                         lambda: _prefix("and.right", self.check(m.project(v, 1), f.right, env)))
        if isinstance(f, Minus):
            return _both(_prefix("minus.left", self.check(m.project(v, 0), f.left, env)),
                         lambda: _prefix("minus.right", self.check(
                             m.project(v, 1), inv_negate(f.right), env)))
        if isinstance(f, Or):
            tag = m.project(v, 0)
            rest = m.project(v, 1)
            if tag is True:
                return _prefix("or.left", self.check(m.project(rest, 0), f.left, env))
            if tag is False:
                return _prefix("or.right", self.check(m.project(rest, 1), f.right, env))
            raise IllTyped("disjunction tag is not a boolean")
        if isinstance(f, Exists):
            u = m.project(v, 0)
            label = f"exists[{f.var}={_show(u)}]"
            return _prefix(label, self.check(m.project(v, 1), f.body, {**env, f.var: u}))
        if isinstance(f, Forall):
            for inst in self.pool.instances(f.ty):
                u = self.m.eval(inst, None)
                verdict = self.check(m.apply(v, ready(u)), f.body, {**env, f.var: u})
                if isinstance(verdict, Fails):
                    return _prefix(f"forall[{f.var}={_show(u)}]", verdict)
            return Inconclusive("sampled-universal")
        # Implication: try antecedent realizers that pass at this state.
        antecedent = _close(f.left, env)
        for cand in self.pool.antecedent_candidates(antecedent):
            try:
                _check_type(cand, antecedent)
            except TypeMismatch:
                continue
            a = self.m.eval(cand, None)
            if not isinstance(self.check(a, f.left, env), Realizes):
                continue
            verdict = self.check(m.apply(v, ready(a)), f.right, env)
            if isinstance(verdict, Fails):
                return _prefix("implies", verdict)
        return Inconclusive("sampled-implication")


def _close(f: Formula, env: dict) -> Formula:
    nums = {k: Num(v) for k, v in env.items()
            if isinstance(v, int) and not isinstance(v, bool)}
    return subst_formula(f, nums)


def _show(v) -> str:
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, int):
        return str(v)
    return "?"


def check_at(t: Term, f: Formula, s: State, registry: SkolemRegistry,
             pool: Optional[CandidatePool] = None, gamma: Gamma = None,
             budget: Optional[EvalBudget] = None) -> RealizerVerdict:
    """Decide (or sample) whether ``t`` realizes the closed formula ``f`` at ``s``."""
    _check_type(t, f)
    pool = pool or CandidatePool.for_formula(f)
    checker = _Checker(s, registry, gamma, pool, budget)
    v = checker.m.eval(t, None)
    if isinstance(v, Neutral):
        raise IllTyped("realizer is not closed")
    return checker.check(v, f, {})


# ----------------------------------------------------------------------------
# Term-based checker for pure realizers


def _nf(t: Term, budget) -> Term:
    return normalize(t, budget)


def check_mrsf(t: Term, f: Formula, s: State, registry: SkolemRegistry,
               pool: Optional[CandidatePool] = None, gamma: Gamma = None,
               budget: Optional[EvalBudget] = None) -> RealizerVerdict:
    """State-free realizability of a pure term; truth conditions still use ``s``."""
    if contains_skolem(t):
        raise TypeMismatch("check_mrsf needs a pure term (no Skolem constants)")
    if _formula_has_skolem(f):
        raise TypeMismatch("check_mrsf needs a formula without Skolem constants")
    _check_type(t, f)
    pool = pool or CandidatePool.for_formula(f)
    return _mrsf(t, f, s, registry, pool, gamma, budget)


def _formula_has_skolem(f: Formula) -> bool:
    if isinstance(f, Atomic):
        return contains_skolem(f.term)
    if isinstance(f, (And, Or, Implies, Minus)):
        return _formula_has_skolem(f.left) or _formula_has_skolem(f.right)
    return _formula_has_skolem(f.body)


def _mrsf(t, f, s, registry, pool, gamma, budget) -> RealizerVerdict:
    rec = lambda t2, f2: _mrsf(t2, f2, s, registry, pool, gamma, budget)  # noqa: E731
    if isinstance(f, Atomic):
        nf = _nf(t, budget)
        if not (isinstance(nf, Const) and nf.tag == "upd"):
            raise IllTyped("realizer of an atom has no update normal form")
        if nf.arg:
            reason = clause_one(nf.arg, s, registry, gamma, budget)
            return Fails(("atomic",), reason) if reason else REALIZES
        if _nf(f.term, budget) != TRUE:
            return Fails(("atomic",), "empty update but the atom is false")
        return REALIZES
    if isinstance(f, And):
        return _both(_prefix("and.left", rec(Proj(0, t), f.left)),
                     lambda: _prefix("and.right", rec(Proj(1, t), f.right)))
    if isinstance(f, Minus):
        return _both(_prefix("minus.left", rec(Proj(0, t), f.left)),
                     lambda: _prefix("minus.right", rec(Proj(1, t), inv_negate(f.right))))
    if isinstance(f, Or):
        tag = _nf(Proj(0, t), budget)
        if tag == TRUE:
            return _prefix("or.left", rec(Proj(0, Proj(1, t)), f.left))
        if tag == FALSE:
            return _prefix("or.right", rec(Proj(1, Proj(1, t)), f.right))
        raise IllTyped("disjunction tag is not a boolean")
    if isinstance(f, Exists):
        u = _nf(Proj(0, t), budget)
        body = subst_formula(f.body, {f.var: u})
        return _prefix(f"exists[{f.var}={_show_term(u)}]", rec(Proj(1, t), body))
    if isinstance(f, Forall):
        for u in pool.instances(f.ty):
            verdict = rec(App(t, u), subst_formula(f.body, {f.var: u}))
            if isinstance(verdict, Fails):
                return _prefix(f"forall[{f.var}={_show_term(u)}]", verdict)
        return Inconclusive("sampled-universal")
    for cand in pool.antecedent_candidates(f.left):
        if contains_skolem(cand):
            continue
        try:
            _check_type(cand, f.left)
        except TypeMismatch:
            continue
        if not isinstance(rec(cand, f.left), Realizes):
            continue
        verdict = rec(App(t, cand), f.right)
        if isinstance(verdict, Fails):
            return _prefix("implies", verdict)
    return Inconclusive("sampled-implication")


def _show_term(u: Term) -> str:
    if u == TRUE:
        return "true"
    if u == FALSE:
        return "false"
    try:
        return str(read_numeral(u))
    except NotANumeral:
        return "?"


# ----------------------------------------------------------------------------
# Canonical realizers for EM and SK over quantifier-free matrices


def _matrix(i: int, registry: SkolemRegistry):
    entry = registry.entry(i)
    if not is_quantifier_free(entry.formula):
        raise MatrixNotDecidable(f"formula {i} has quantifiers in its matrix")
    return entry, atom_of(entry.formula).term


def _oracle(i: int, entry) -> Term:
    return App(skolem(i), code_of([Var(p) for p in entry.params]))


def _learn(i: int, entry, value: Term) -> Term:
    return mk_app(MKUPD, Num(i), code_of([Var(p) for p in entry.params]), value)


_NONE = upconst(EMPTY_UPDATE)


def sk_target(i: int, registry: SkolemRegistry) -> Formula:
    """``forall xs. (exists y. Q) -> Q[phi_i<xs>/y]`` with ``Q`` the matrix as one atom."""
    entry, q = _matrix(i, registry)
    Q = Atomic(q)
    body = Implies(Exists(entry.witness, NAT, Q),
                   Atomic(substitute(q, {entry.witness: _oracle(i, entry)})))
    return forall_many(entry.params, body)


def em1_target(i: int, registry: SkolemRegistry) -> Formula:
    """``forall xs. (exists y. Q) or (exists y. Q)^bot``."""
    entry, q = _matrix(i, registry)
    ex = Exists(entry.witness, NAT, Atomic(q))
    return forall_many(entry.params, Or(ex, inv_negate(ex)))


def sk_realizer(i: int, registry: SkolemRegistry) -> Term:
    entry, q = _matrix(i, registry)
    y = entry.witness
    p = Var("_p")
    here = substitute(q, {y: _oracle(i, entry)})
    proposed = Proj(0, p)
    learn = mk_app(if_(UPDATE), substitute(q, {y: proposed}),
                   _learn(i, entry, proposed), _NONE)
    body = mk_app(if_(UPDATE), here, _NONE, mk_app(CUP, Proj(1, p), learn))
    inner = lam("_p", Prod(NAT, UPDATE), body)
    return lams([(x, NAT) for x in entry.params], inner)


def em1_realizer(i: int, registry: SkolemRegistry) -> Term:
    entry, q = _matrix(i, registry)
    y = entry.witness
    oracle = _oracle(i, entry)
    here = substitute(q, {y: oracle})
    refute = lam(y, NAT, mk_app(if_(UPDATE), q, _learn(i, entry, Var(y)), _NONE))
    body = Pair(here, Pair(Pair(oracle, _NONE), refute))
    return lams([(x, NAT) for x in entry.params], body)


def bounded_search(q: Term, var: str, limit: int) -> Term:
    """Closed-over-``q`` T term: the least ``y <= limit`` with ``q[y]``, else ``limit``.

    Scans downward so the last hit seen is the least one.
    """
    k, r = "_k", "_r"
    cand = lib.sub(Num(limit), mk_app(SUCC, Var(k)))
    step = lams([(k, NAT), (r, NAT)],
                mk_app(if_(NAT), substitute(q, {var: cand}), cand, Var(r)))
    return mk_app(rec(NAT), Num(limit), step, Num(limit))


def em_exists_realizer(i: int, registry: SkolemRegistry, fallback: Term) -> Term:
    """Realizer of ``exists y. Q`` (no parameters) built from the EM realizer.

    If the oracle's current answer is a witness it is returned; otherwise the
    candidate is 0 and the refutation branch applied to ``fallback`` emits an
    update teaching the oracle the fallback witness.
    """
    entry, _ = _matrix(i, registry)
    if entry.params:
        raise ValueError("em_exists_realizer expects a formula without parameters")
    e = em1_realizer(i, registry)
    ty = Prod(NAT, UPDATE)
    return mk_app(if_(ty), Proj(0, e), Proj(0, Proj(1, e)),
                  Pair(Num(0), App(Proj(1, Proj(1, e)), fallback)))
