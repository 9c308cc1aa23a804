"""States: total approximations of all Skolem oracles at once.

A state maps every point ``(i, n)`` to a natural number.  It is a finite
overlay on top of the constant-0 function, so ``s(i, n)`` is the overlay value
when present and 0 otherwise.
"""

from __future__ import annotations

import json
from typing import Iterable, Mapping

from . import library as lib
from .kernel import NAT, Num, Term, Var, if_, lams, mk_app
from .updates import Update


class State:
    __slots__ = ("_overlay", "_key")

    def __init__(self, overlay: Mapping[tuple[int, int], int] | Iterable = ()):
        items = overlay.items() if isinstance(overlay, Mapping) else (
            ((i, n), m) for i, n, m in overlay)
        # Entries equal to the default carry no information; dropping them
        # makes equal functions equal values.
        clean = {(int(i), int(n)): int(m) for (i, n), m in items if int(m) != 0}
        self._overlay = clean
        self._key = tuple(sorted((i, n, m) for (i, n), m in clean.items()))

    def __call__(self, i: int, n: int) -> int:
        return self._overlay.get((i, n), 0)

    @property
    def overlay(self) -> dict[tuple[int, int], int]:
        return dict(self._overlay)

    def points(self) -> tuple[tuple[int, int, int], ...]:
        return self._key

    def __eq__(self, other) -> bool:
        return isinstance(other, State) and self._key == other._key

    def __hash__(self) -> int:
        return hash(("State", self._key))

    def __repr__(self) -> str:
        return f"State({list(self._key)!r})"

    def set(self, i: int, n: int, m: int) -> "State":
        overlay = dict(self._overlay)
        overlay[(i, n)] = m
        return State(overlay)

    def diff(self, older: "State") -> list[list[int]]:
        """Points whose value changed from ``older`` to ``self``, as ``[i, n, m]``."""
        keys = set(self._overlay) | set(older._overlay)
        return [[i, n, self(i, n)] for i, n in sorted(keys) if self(i, n) != older(i, n)]


DEFAULT = State()


def apply_update(s: State, u: Update) -> State:
    """Overwrite ``s`` pointwise with the triples of ``u``; later calls win."""
    if not u:
        return s
    overlay = s.overlay
    for a, n, m in u:
        overlay[(a, n)] = m
    return State(overlay)


def synthesize_term(s: State) -> Term:
    """A closed term of type Nat -> Nat -> Nat computing ``s``.

    ``\\x \\y. if x=i1 and y=n1 then m1 else if ... else 0``
    """
    x, y = Var("x"), Var("y")
    body: Term = Num(0)
    for i, n, m in reversed(s.points()):
        test = lib.and_(lib.eq(x, Num(i)), lib.eq(y, Num(n)))
        body = mk_app(if_(NAT), test, Num(m), body)
    return lams([("x", NAT), ("y", NAT)], body)


def to_json(s: State) -> dict:
    return {"overlay": [list(p) for p in s.points()], "default": 0}


def from_json(data) -> State:
    if isinstance(data, str):
        if data == "default":
            return DEFAULT
        data = json.loads(data)
    if data.get("default", 0) != 0:
        raise ValueError("only the constant-0 default state is supported")
    return State(tuple(p) for p in data.get("overlay", []))
