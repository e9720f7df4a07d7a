"""Exact sparse linear algebra.

Vectors are ``dict`` maps from ordered keys to nonzero field elements.
Python ints are promoted to :class:`fractions.Fraction` so division stays
exact; any other field type (sympy ``QQ_I`` elements, for instance) is used
as-is provided it supports ``+ - * /`` and truthiness.

:class:`SpanBasis` keeps an echelon basis whose pivot is the *smallest* key
of each row.  Operators that are triangular with respect to the key order
(the Fock-space spans are, level by level) therefore insert without any
elimination work.
"""

from __future__ import annotations

from collections import defaultdict
from fractions import Fraction
from typing import Hashable, Iterable, Mapping

Vector = dict


def _lift(x):
    return Fraction(x) if isinstance(x, int) else x


def clean(vec: Mapping) -> Vector:
    """Copy of ``vec`` with zero entries dropped and ints made exact."""
    return {k: _lift(v) for k, v in vec.items() if v}


def axpy(y: Vector, a, x: Mapping) -> None:
    """In place ``y += a * x``, dropping entries that cancel."""
    for k, v in x.items():
        s = y.get(k)
        s = a * v if s is None else s + a * v
        if s:
            y[k] = s
        else:
            y.pop(k, None)


class SpanBasis:
    """Row-reduced exact basis of the span of a set of sparse vectors."""

    def __init__(self, vectors: Iterable[Mapping] = ()):
        self._rows: dict[Hashable, Vector] = {}
        for v in vectors:
            self.add(v)

    def __len__(self) -> int:
        return len(self._rows)

    @property
    def dim(self) -> int:
        return len(self._rows)

    @property
    def pivots(self):
        return sorted(self._rows)

    def rows(self) -> list[Vector]:
        return [dict(self._rows[k]) for k in sorted(self._rows)]

    def reduce(self, vec: Mapping) -> Vector:
        """Remainder of ``vec`` after leading-term elimination against the basis."""
        r = clean(vec)
        while r:
            k = min(r)
            row = self._rows.get(k)
            if row is None:
                break
            axpy(r, -r[k], row)
        return r

    def add(self, vec: Mapping) -> bool:
        """Insert ``vec``; return True iff it enlarged the span."""
        r = self.reduce(vec)
        if not r:
            return False
        k = min(r)
        lead = r[k]
        if lead != 1:
            inv = 1 / lead
            r = {key: val * inv for key, val in r.items()}
        self._rows[k] = r
        return True

    def __contains__(self, vec: Mapping) -> bool:
        return not self.reduce(vec)

    def copy(self) -> "SpanBasis":
        other = SpanBasis()
        other._rows = {k: dict(v) for k, v in self._rows.items()}
        return other


def rank(vectors: Iterable[Mapping]) -> int:
    return SpanBasis(vectors).dim


# sparse matrices: dict {(row, col): value}

def matmul(a: Mapping, b: Mapping) -> dict:
    by_row = defaultdict(list)
    for (r, c), v in b.items():
        by_row[r].append((c, v))
    out: dict = {}
    for (r, k), v in a.items():
        for c, w in by_row.get(k, ()):
            s = out.get((r, c), 0) + v * w
            if s:
                out[(r, c)] = s
            else:
                out.pop((r, c), None)
    return out


def transpose(a: Mapping) -> dict:
    return {(c, r): v for (r, c), v in a.items()}


def add(a: Mapping, b: Mapping, scale=1) -> dict:
    out = dict(a)
    for k, v in b.items():
        s = out.get(k, 0) + scale * v
        if s:
            out[k] = s
        else:
            out.pop(k, None)
    return out


def identity(n: int) -> dict:
    return {(i, i): 1 for i in range(n)}


def vectorize(a: Mapping, n: int) -> Vector:
    """Row-major vectorisation of an ``n x n`` sparse matrix."""
    return {r * n + c: v for (r, c), v in a.items() if v}
