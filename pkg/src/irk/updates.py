"""Finite updates: consistent sets of (index, argument, value) triples.

An update is a finite partial function from pairs ``(a, n)`` to values ``m``.
Triples are kept sorted by ``(a, n)`` so that two updates denoting the same
partial function are equal, hash equal and print identically.
"""

from __future__ import annotations

from typing import Iterable, Iterator

Triple = tuple[int, int, int]


class InconsistentUpdate(ValueError):
    """Two triples of one update disagree on the value at the same point."""


class Update:
    __slots__ = ("_triples", "_index")

    def __init__(self, triples: Iterable[Iterable[int]] = ()):
        index: dict[tuple[int, int], int] = {}
        for triple in triples:
            a, n, m = (int(x) for x in triple)
            if a < 0 or n < 0 or m < 0:
                raise ValueError(f"update triples range over naturals, got {(a, n, m)}")
            if index.get((a, n), m) != m:
                raise InconsistentUpdate(
                    f"point {(a, n)} mapped to both {index[(a, n)]} and {m}")
            index[(a, n)] = m
        self._index = index
        self._triples = tuple(sorted((a, n, m) for (a, n), m in index.items()))

    @property
    def triples(self) -> tuple[Triple, ...]:
        return self._triples

    def __iter__(self) -> Iterator[Triple]:
        return iter(self._triples)

    def __len__(self) -> int:
        return len(self._triples)

    def __bool__(self) -> bool:
        return bool(self._triples)

    def __contains__(self, triple) -> bool:
        a, n, m = triple
        return self._index.get((a, n)) == m

    def __eq__(self, other) -> bool:
        return isinstance(other, Update) and self._triples == other._triples

    def __hash__(self) -> int:
        return hash(("Update", self._triples))

    def __repr__(self) -> str:
        return f"Update({list(self._triples)!r})"

    def __str__(self) -> str:
        return to_text(self)

    def domain(self) -> frozenset[tuple[int, int]]:
        return frozenset(self._index)

    def value_at(self, a: int, n: int):
        """The value stored at ``(a, n)``, or None when undefined."""
        return self._index.get((a, n))


EMPTY = Update()


def consistent(t1: Triple, t2: Triple) -> bool:
    return not (t1[0] == t2[0] and t1[1] == t2[1]) or t1[2] == t2[2]


def consistent_union(u1: Update, u2: Update) -> Update:
    """``u1`` plus every triple of ``u2`` that agrees with ``u1``.

    On a conflict the triple of ``u1`` is kept, so the operation is not
    commutative.
    """
    kept = [t for t in u2 if u1.value_at(t[0], t[1]) in (None, t[2])]
    return Update(list(u1) + kept)


def min_index(u: Update) -> int:
    """Least first component among the triples of ``u``; 0 for the empty update."""
    return u.triples[0][0] if u else 0


def lookup(u: Update, a: int, n: int, default: int) -> int:
    m = u.value_at(a, n)
    return default if m is None else m


def singleton(a: int, n: int, m: int) -> Update:
    return Update([(a, n, m)])


def to_text(u: Update) -> str:
    return "upd{" + ";".join(f"({a},{n},{m})" for a, n, m in u) + "}"


def to_json(u: Update) -> list[list[int]]:
    return [list(t) for t in u]


def from_json(data) -> Update:
    return Update(tuple(t) for t in data)
