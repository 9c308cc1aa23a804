"""The learning loop: run a realizer, harvest its updates, correct the state.

``extract_witness`` drives a realizer of ``exists y. P`` until the candidate it
proposes is a genuine witness.  ``refute_bottom`` takes a term claiming to
realize falsity and searches for an extension of the starting state at which
the claim breaks.

Both loops keep a trace of one record per iteration.  Traces are plain data
and serialize to JSON lines; timing is left out unless asked for, so two runs
with the same inputs write identical files.
"""

from __future__ import annotations

import json
import time
from dataclasses import dataclass, field
from typing import Optional

from .domains import MaxItersExceeded, stabilize
from .evaluator import EvalBudget, IllTyped, eval_at
from .kernel import NAT, UPDATE, Const, Pair, Term, read_numeral, typecheck
from .logic import (
    BOTTOM, Exists, Formula, Gamma, SkolemRegistry, decode_tuple,
    is_quantifier_free,
)
from .realizability import Fails, TypeMismatch, check_at, realizer_type
from .state import State, apply_update
from .truth import (
    DEFAULT_BOUND, BoundExhausted, Unknown, check_bound, ground_truth,
    saturate_truth_state,
)
from .updates import Update
from .updates import to_json as update_json


@dataclass(frozen=True)
class LoopConfig:
    max_iters: int = 1000
    bound: int = DEFAULT_BOUND
    gamma: Gamma = None
    budget: Optional[EvalBudget] = None

    def __post_init__(self):
        if self.max_iters < 1:
            raise ValueError("max_iters must be at least 1")
        check_bound(self.bound)


@dataclass
class ExtractionTrace:
    records: list = field(default_factory=list)
    result: dict = field(default_factory=dict)
    wall_ms: Optional[float] = None

    def add(self, it, candidate, update: Update, before: State, after: State, verdict):
        self.records.append({
            "iter": it,
            "candidate": candidate,
            "update": update_json(update),
            "state_diff": after.diff(before),
            "verdict": verdict,
        })

    def to_jsonl(self, timing: bool = False) -> str:
        final = dict(self.result)
        if timing and self.wall_ms is not None:
            final["wall_ms"] = round(self.wall_ms, 3)
        lines = [json.dumps(r, sort_keys=True) for r in self.records]
        lines.append(json.dumps(final, sort_keys=True))
        return "\n".join(lines) + "\n"

    def dump(self, path, timing: bool = False):
        with open(path, "w") as fh:
            fh.write(self.to_jsonl(timing))


def _split_pair(nf: Term) -> tuple[int, Update]:
    if not isinstance(nf, Pair):
        raise IllTyped("realizer of an existential did not evaluate to a pair")
    right = nf.right
    if not (isinstance(right, Const) and right.tag == "upd"):
        raise IllTyped("realizer's update component is not an update literal")
    return read_numeral(nf.left), right.arg


def extract_witness(t: Term, f: Formula, s0: State, registry: SkolemRegistry,
                    cfg: LoopConfig = LoopConfig()) -> tuple[int, State, ExtractionTrace]:
    """Run the realizer ``t`` of ``exists y. P`` until it proposes a witness.

    Returns the witness, the final state and the trace.  A witness is only
    returned once the realizer emits no update and ``P`` holds of it.
    """
    if not (isinstance(f, Exists) and f.ty == NAT and is_quantifier_free(f.body)):
        raise ValueError("extraction needs exists y:Nat. P with P quantifier-free")
    if typecheck(t) != realizer_type(f):
        raise TypeMismatch("realizer type does not match the formula")
    start = time.perf_counter()
    trace = ExtractionTrace()
    s = s0
    for it in range(cfg.max_iters):
        nf, log = eval_at(t, s, cfg.budget)
        n, u = _split_pair(nf)
        holds = ground_truth(f.body, {f.var: n}, cfg.bound)
        if isinstance(holds, Unknown):
            raise BoundExhausted(f"matrix undecided at candidate {n}")
        if not u and holds:
            trace.add(it, n, u, s, s, "witness")
            trace.result = {"result": "witness", "witness": n, "iterations": it + 1}
            trace.wall_ms = (time.perf_counter() - start) * 1000
            return n, s, trace
        if u:
            new, verdict = apply_update(s, u), "learned"
        else:
            new = stabilize(t, s, registry, cfg.gamma, cfg.bound, cfg.max_iters, cfg.budget).state
            verdict = "stabilized"
        if new == s:
            trace.add(it, n, u, s, s, "stalled")
            trace.result = {"result": "stalled", "iterations": it + 1}
            trace.wall_ms = (time.perf_counter() - start) * 1000
            raise MaxItersExceeded(f"no progress at iteration {it} (candidate {n})", trace)
        trace.add(it, n, u, s, new, verdict)
        s = new
    trace.result = {"result": "max-iters", "iterations": cfg.max_iters}
    trace.wall_ms = (time.perf_counter() - start) * 1000
    raise MaxItersExceeded(f"no witness after {cfg.max_iters} iterations", trace)


def refute_bottom(t: Term, s0: State, registry: SkolemRegistry,
                  cfg: LoopConfig = LoopConfig()) -> tuple[State, ExtractionTrace]:
    """Find ``s' >= s0`` at which the Update-typed ``t`` does not realize falsity.

    Each round stabilizes ``t``; if it still passes as a realizer, its first
    triple ``(i, <ns>, m)`` claims ``m`` is a witness for ``A_i(ns, -)`` while
    the current answer is not.  Truth of both instances is saturated, and
    then either ``m`` really is a witness (the point is set to ``m``), or it is
    not, and the saturated state already refutes the claim.
    """
    if typecheck(t) != UPDATE:
        raise TypeMismatch("refute_bottom needs a closed term of type Update")
    start = time.perf_counter()
    trace = ExtractionTrace()
    s = s0
    for it in range(cfg.max_iters):
        before = s
        s = stabilize(t, s, registry, cfg.gamma, cfg.bound, cfg.max_iters, cfg.budget).state
        nf, _ = eval_at(t, s, cfg.budget)
        u = nf.arg
        verdict = check_at(t, BOTTOM, s, registry, gamma=cfg.gamma, budget=cfg.budget)
        if isinstance(verdict, Fails):
            trace.add(it, None, u, before, s, "refuted")
            trace.result = {"result": "refuted", "iterations": it + 1}
            trace.wall_ms = (time.perf_counter() - start) * 1000
            return s, trace
        i, code, m = u.triples[0]
        entry = registry.entry(i)
        ns = list(decode_tuple(code, entry.arity))
        params = entry.params + (entry.witness,)
        current = s(i, code)
        s = saturate_truth_state(entry.formula, ns + [current], s, registry,
                                 cfg.bound, params, cfg.gamma)
        s = saturate_truth_state(entry.formula, ns + [m], s, registry,
                                 cfg.bound, params, cfg.gamma)
        g_now = ground_truth(entry.formula, ns + [current], cfg.bound, params)
        g_new = ground_truth(entry.formula, ns + [m], cfg.bound, params)
        if isinstance(g_now, Unknown) or isinstance(g_new, Unknown):
            raise BoundExhausted(f"cannot decide A_{i} near ({ns}, {m}) within bound {cfg.bound}")
        if g_new and not g_now:
            # Proof case 1: m is a witness the state lacked; adopt it.
            s = s.set(i, code, m)
            step = "case-witness"
        else:
            # Proof case 2: after saturation the truth values are exact, so
            # the triple no longer passes clause 1.
            step = "case-saturated"
        trace.add(it, None, u, before, s, step)
    trace.result = {"result": "max-iters", "iterations": cfg.max_iters}
    trace.wall_ms = (time.perf_counter() - start) * 1000
    raise MaxItersExceeded(f"no refuting state after {cfg.max_iters} rounds", trace)
