"""Operations on the space of states: domains, the extension order, stabilization.

A point ``(i, n)`` is in the domain of a state ``s`` when the value ``s_i(n)``
is an acceptable answer for the Skolem formula ``A_i`` at the arguments coded
by ``n``.  Points of indices outside ``Gamma`` are always in the domain.
``s1 >= s2`` means every point in the domain of ``s2`` keeps its value in
``s1``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from .evaluator import EvalBudget, eval_at
from .kernel import Term
from .logic import Gamma, SkolemRegistry, in_gamma
from .state import State
from .truth import (
    DEFAULT_BOUND, IN_DOMAIN, BoundExhausted, DomainWitness, InDomain,
    OutOfDomain, Unknown, UnknownMembership, check_bound, point_verdict,
)

__all__ = [
    "DomainWitness", "InDomain", "OutOfDomain", "UnknownMembership",
    "MaxItersExceeded", "StabilizeResult", "dm_member", "check_geq", "stabilize",
    "BoundExhausted",
]

DEFAULT_MAX_ITERS = 1000


class MaxItersExceeded(RuntimeError):
    def __init__(self, message, trace=None):
        super().__init__(message)
        self.trace = trace


def dm_member(s: State, i: int, n: int, registry: SkolemRegistry,
              gamma: Gamma = None, bound: int = DEFAULT_BOUND) -> DomainWitness:
    if not in_gamma(i, gamma, registry):
        return IN_DOMAIN
    return point_verdict(registry, i, n, s(i, n), check_bound(bound))


def check_geq(s1: State, s2: State, registry: SkolemRegistry, gamma: Gamma = None,
              bound: int = DEFAULT_BOUND) -> Union[bool, Unknown]:
    """Decide ``s1 >= s2``.

    Only points where the two states differ matter, and both overlays are
    finite, so the check is a finite scan.
    """
    unknown = False
    for i, n in sorted(set(s1.overlay) | set(s2.overlay)):
        if s1(i, n) == s2(i, n):
            continue
        w = dm_member(s2, i, n, registry, gamma, bound)
        if isinstance(w, InDomain):
            return False
        if isinstance(w, UnknownMembership):
            unknown = True
    return Unknown(bound) if unknown else True


@dataclass
class StabilizeResult:
    state: State
    value: Term
    iterations: int
    history: list = field(default_factory=list)


def stabilize(t: Term, s: State, registry: SkolemRegistry, gamma: Gamma = None,
              bound: int = DEFAULT_BOUND, max_iters: int = DEFAULT_MAX_ITERS,
              budget: Optional[EvalBudget] = None) -> StabilizeResult:
    """Extend ``s`` until every oracle point ``t`` consults is in the domain.

    Each round evaluates ``t``, and moves every consulted point outside the
    domain to its least witness.  ``history`` records the points changed per
    round as ``[i, n, m]`` triples.
    """
    check_bound(bound)
    history = []
    for it in range(max_iters):
        value, log = eval_at(t, s, budget)
        changes = []
        for q in log:
            w = dm_member(s, q.index, q.arg, registry, gamma, bound)
            if isinstance(w, UnknownMembership):
                raise BoundExhausted(
                    f"membership of point ({q.index}, {q.arg}) undecided at bound {bound}")
            if isinstance(w, OutOfDomain):
                changes.append((q.index, q.arg, w.witness))
        if not changes:
            return StabilizeResult(s, value, it, history)
        history.append([list(c) for c in changes])
        for i, n, m in changes:
            s = s.set(i, n, m)
    raise MaxItersExceeded(f"no stable state after {max_iters} rounds")
