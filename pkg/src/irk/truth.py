"""Truth of arithmetical formulas at a state, and bounded ground truth.

``compile_truth`` turns a formula into a Bool term in which every quantifier
is replaced by a Skolem witness: ``exists y. A`` becomes ``A[phi_i <xs>/y]``
with ``i`` the index of ``A``, and ``forall y. A`` becomes
``A[phi_j <xs>/y]`` with ``j`` the index of the opposite of ``A`` (the
oracle proposes a counterexample).  Evaluating that term at a state gives the
truth of the formula at the state.

``ground_truth`` decides the same formula by bounded search over ``0..B``.
A search that finds nothing below ``B`` looks once more in ``B+1..2B``; if
something shows up there the verdict is ``Unknown(B)``, since a larger bound
would have changed the answer.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Mapping, Optional, Sequence, Union

from . import library as lib
from .evaluator import EvalBudget, IllTyped, Machine, OracleQuery
from .kernel import NAT, App, Term, Var, free_vars, skolem, substitute
from .logic import (
    And, Atomic, Exists, Forall, Formula, Implies, Minus, NotArithmetical, Or,
    SkolemRegistry, code_of, decode_tuple, encode_tuple, free_vars_formula,
    inv_negate, is_arithmetical,
)
from .state import State

DEFAULT_BOUND = 64


class BoundExhausted(RuntimeError):
    """Bounded search could not settle a question within the search bound."""


@dataclass(frozen=True)
class Unknown:
    bound: int

    def __str__(self):
        return f"unknown (bound {self.bound})"


GroundVerdict = Union[bool, Unknown]


def check_bound(bound: int) -> int:
    if not isinstance(bound, int) or isinstance(bound, bool) or bound < 1:
        raise ValueError("search bound must be a positive integer")
    return bound


# ----------------------------------------------------------------------------
# Arguments


def default_params(f: Formula) -> list[str]:
    return free_vars_formula(f)


def bind_args(f: Formula, args, params: Optional[Sequence[str]] = None) -> dict[str, int]:
    """Normalize ``args`` (a name->int mapping, or values aligned with ``params``)."""
    params = list(params) if params is not None else default_params(f)
    if args is None:
        args = {}
    if isinstance(args, Mapping):
        env = {str(k): int(v) for k, v in args.items()}
    else:
        args = list(args)
        if len(args) != len(params):
            raise ValueError(f"expected {len(params)} arguments for {params}, got {len(args)}")
        env = dict(zip(params, (int(a) for a in args)))
    missing = [v for v in free_vars_formula(f) if v not in env]
    if missing:
        raise ValueError(f"no value given for free variable(s) {missing}")
    if any(v < 0 for v in env.values()):
        raise ValueError("arguments must be natural numbers")
    return env


# ----------------------------------------------------------------------------
# Compilation to a Bool term


def _push(scope: tuple[str, ...], var: str) -> tuple[str, ...]:
    return tuple(v for v in scope if v != var) + (var,)


def quantifier_site(f: Union[Exists, Forall], scope: Sequence[str],
                    registry: SkolemRegistry) -> tuple[int, tuple[str, ...]]:
    """The Skolem index used for quantifier ``f`` and its argument variables.

    The arguments are the free variables of ``f`` listed in scope order.
    """
    fv = set(free_vars_formula(f))
    xs = tuple(v for v in scope if v in fv)
    if len(xs) != len(fv):
        raise ValueError(f"variables {sorted(fv - set(xs))} are not in scope")
    body = f.body if isinstance(f, Exists) else inv_negate(f.body)
    return registry.register(body, xs, f.var), xs


def compile_truth(f: Formula, registry: SkolemRegistry,
                  params: Optional[Sequence[str]] = None) -> Term:
    """Bool term over ``params`` whose value at a state is the truth of ``f``."""
    if not is_arithmetical(f):
        raise NotArithmetical("truth is defined for arithmetical formulas only")
    scope = tuple(params) if params is not None else tuple(default_params(f))
    key = (f, scope)
    term = registry.compiled.get(key)
    if term is None:
        term = registry.compiled[key] = _compile(f, registry, scope)
    return term


def _compile(f, registry, scope) -> Term:
    if isinstance(f, Atomic):
        return f.term
    if isinstance(f, And):
        return lib.and_(_compile(f.left, registry, scope), _compile(f.right, registry, scope))
    if isinstance(f, Or):
        return lib.or_(_compile(f.left, registry, scope), _compile(f.right, registry, scope))
    if isinstance(f, Implies):
        return lib.imp(_compile(f.left, registry, scope), _compile(f.right, registry, scope))
    if isinstance(f, Minus):
        return lib.and_(_compile(f.left, registry, scope),
                        _compile(inv_negate(f.right), registry, scope))
    i, xs = quantifier_site(f, scope, registry)
    body = _compile(f.body, registry, _push(scope, f.var))
    witness = App(skolem(i), code_of([Var(x) for x in xs]))
    return substitute(body, {f.var: witness})


def truth_with_log(f: Formula, args, s: State, registry: SkolemRegistry,
                   params: Optional[Sequence[str]] = None,
                   budget: Optional[EvalBudget] = None) -> tuple[bool, list[OracleQuery]]:
    term = compile_truth(f, registry, params)
    env = bind_args(f, args, params)
    m = Machine(s, budget, free={k: v for k, v in env.items() if k in free_vars(term)})
    value = m.eval(term, None)
    if not isinstance(value, bool):
        raise IllTyped("formula did not evaluate to a boolean")
    return value, m.oracle_log()


def truth_at(f: Formula, args, s: State, registry: SkolemRegistry,
             params: Optional[Sequence[str]] = None,
             budget: Optional[EvalBudget] = None) -> bool:
    return truth_with_log(f, args, s, registry, params, budget)[0]


def approximate_formula(f: Formula, s: State) -> Formula:
    """``f`` with Skolem constants in its atoms read through ``s``."""
    from .evaluator import approximate
    from .logic import map_atoms
    return map_atoms(f, lambda t: approximate(t, s))


# ----------------------------------------------------------------------------
# Bounded ground truth


def _and(a: GroundVerdict, b) -> GroundVerdict:
    # Strong Kleene conjunction; b is evaluated lazily.
    if a is False:
        return False
    vb = b()
    if vb is False:
        return False
    if a is True and vb is True:
        return True
    return a if isinstance(a, Unknown) else vb


def _not(a: GroundVerdict) -> GroundVerdict:
    return a if isinstance(a, Unknown) else not a


def _or(a: GroundVerdict, b) -> GroundVerdict:
    return _not(_and(_not(a), lambda: _not(b())))


@lru_cache(maxsize=1 << 16)
def _atom(term: Term, env: tuple) -> bool:
    m = Machine(None, None, free=dict(env))
    value = m.eval(term, None)
    if not isinstance(value, bool):
        raise IllTyped("atom did not evaluate to a boolean")
    return value


@lru_cache(maxsize=1 << 14)
def _fv(f: Formula) -> frozenset:
    return frozenset(free_vars_formula(f))


def _env_key(f: Formula, env: Mapping[str, int]) -> tuple:
    names = _fv(f)
    return tuple(sorted((k, v) for k, v in env.items() if k in names))


@lru_cache(maxsize=1 << 18)
def _ground(f: Formula, env: tuple, bound: int) -> GroundVerdict:
    if isinstance(f, Atomic):
        return _atom(f.term, env)
    envd = dict(env)

    def sub(g, extra=None):
        e = dict(envd)
        if extra:
            e.update(extra)
        return _ground(g, _env_key(g, e), bound)

    if isinstance(f, And):
        return _and(sub(f.left), lambda: sub(f.right))
    if isinstance(f, Or):
        return _or(sub(f.left), lambda: sub(f.right))
    if isinstance(f, Implies):
        return _or(_not(sub(f.left)), lambda: sub(f.right))
    if isinstance(f, Minus):
        return _and(sub(f.left), lambda: _not(sub(f.right)))
    # Quantifiers: search for a witness (exists) or counterexample (forall).
    target = True if isinstance(f, Exists) else False
    unknown = False
    for n in range(bound + 1):
        v = sub(f.body, {f.var: n})
        if v is target:
            return target
        if isinstance(v, Unknown):
            unknown = True
    if unknown:
        return Unknown(bound)
    for n in range(bound + 1, 2 * bound + 1):
        if sub(f.body, {f.var: n}) is not (not target):
            return Unknown(bound)
    return not target


def ground_truth(f: Formula, args=None, bound: int = DEFAULT_BOUND,
                 params: Optional[Sequence[str]] = None) -> GroundVerdict:
    """Truth of a closed instance of ``f`` by bounded search (see module doc)."""
    if not is_arithmetical(f):
        raise NotArithmetical("ground truth is defined for arithmetical formulas only")
    check_bound(bound)
    env = bind_args(f, args, params)
    return _ground(f, _env_key(f, env), bound)


def least_witness(f: Formula, var: str, env: Mapping[str, int],
                  bound: int) -> Optional[int]:
    """Least ``n <= bound`` with ``f[n/var]`` ground-true, if any."""
    for n in range(bound + 1):
        e = {**env, var: n}
        if _ground(f, _env_key(f, e), bound) is True:
            return n
    return None


# ----------------------------------------------------------------------------
# Points of a state: is the value at (i, code) acceptable?


@dataclass(frozen=True)
class InDomain:
    pass


@dataclass(frozen=True)
class OutOfDomain:
    """The value at the point is wrong; ``witness`` is the least correct one."""
    witness: int


@dataclass(frozen=True)
class UnknownMembership:
    bound: int


DomainWitness = Union[InDomain, OutOfDomain, UnknownMembership]

IN_DOMAIN = InDomain()


def point_verdict(registry: SkolemRegistry, i: int, code: int, value: int,
                  bound: int = DEFAULT_BOUND) -> DomainWitness:
    """Whether ``value`` is an acceptable answer of ``phi_i`` at ``code``.

    It is unless ``exists y. A(ns, y)`` holds while ``A(ns, value)`` fails;
    then the least witness is reported.
    """
    entry = registry.entry(i)
    ns = decode_tuple(code, entry.arity)
    if ns is None:
        return IN_DOMAIN
    env = dict(zip(entry.params, ns))
    A, y = entry.formula, entry.witness
    here = _ground(A, _env_key(A, {**env, y: value}), bound)
    if here is True:
        return IN_DOMAIN
    least = least_witness(A, y, env, bound)
    if least is not None:
        return OutOfDomain(least) if here is False else UnknownMembership(bound)
    ex = Exists(y, NAT, A)
    verdict = _ground(ex, _env_key(ex, env), bound)
    if verdict is False:
        return IN_DOMAIN
    return UnknownMembership(bound)


def saturate_truth_state(f: Formula, args, s: State, registry: SkolemRegistry,
                         bound: int = DEFAULT_BOUND,
                         params: Optional[Sequence[str]] = None,
                         gamma=None) -> State:
    """Extend ``s`` so that the oracle points truth of ``f`` consults are correct.

    Only points whose current value is wrong are changed, each to its least
    witness, so the result is an extension of ``s``.  After saturation
    ``truth_at`` agrees with ``ground_truth`` whenever the latter is decided.
    """
    if not is_arithmetical(f):
        raise NotArithmetical("truth is defined for arithmetical formulas only")
    check_bound(bound)
    scope = tuple(params) if params is not None else tuple(default_params(f))
    env = bind_args(f, args, scope)
    return _saturate(f, env, scope, s, registry, bound, gamma)


def _saturate(f, env, scope, s, registry, bound, gamma):
    if isinstance(f, Atomic):
        return s
    if isinstance(f, (And, Or, Implies)):
        s = _saturate(f.left, env, scope, s, registry, bound, gamma)
        return _saturate(f.right, env, scope, s, registry, bound, gamma)
    if isinstance(f, Minus):
        s = _saturate(f.left, env, scope, s, registry, bound, gamma)
        return _saturate(inv_negate(f.right), env, scope, s, registry, bound, gamma)
    i, xs = quantifier_site(f, scope, registry)
    code = encode_tuple([env[x] for x in xs])
    verdict = point_verdict(registry, i, code, s(i, code), bound)
    if isinstance(verdict, UnknownMembership):
        raise BoundExhausted(f"cannot decide point ({i}, {code}) within bound {bound}")
    if isinstance(verdict, OutOfDomain):
        if gamma is not None and i not in gamma:
            raise ValueError(f"point ({i}, {code}) needs a change outside Gamma")
        s = s.set(i, code, verdict.witness)
    inner_env = {**env, f.var: s(i, code)}
    return _saturate(f.body, inner_env, _push(scope, f.var), s, registry, bound, gamma)
