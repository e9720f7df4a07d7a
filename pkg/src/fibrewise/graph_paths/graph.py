"""Directed graphs with optional countable bundles of parallel edges, and their paths.

Conventions: an edge ``e`` goes from ``s(e)`` to ``r(e)``; a path
``e1 e2 ... en`` is composable when ``s(e_i) = r(e_{i+1})``, so paths grow
on the *source* side and ``source(mu) = s(en)``, ``range(mu) = r(e1)``.
Edges are ordered by declaration (plain edges first, then bundles, bundle
members by index); paths of equal length are ordered lexicographically in
that order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from fibrewise.errors import InputError


class Edge(NamedTuple):
    id: str
    s: str
    r: str


class BundleEdge(NamedTuple):
    bundle: str
    index: int

    def __str__(self):
        return f"{self.bundle}[{self.index}]"


@dataclass(frozen=True)
class VertexClassification:
    fin: frozenset
    src: frozenset
    sing: frozenset
    reg: frozenset


@dataclass(frozen=True)
class Path:
    """Finite path; ``vertices[k]`` is the vertex after reading ``k`` edges from the range end."""

    edges: tuple
    vertices: tuple

    def __len__(self):
        return len(self.edges)

    @property
    def length(self) -> int:
        return len(self.edges)

    @property
    def source(self):
        return self.vertices[-1]

    @property
    def range(self):
        return self.vertices[0]

    @property
    def is_finite(self) -> bool:
        return True

    def truncate(self, k: int) -> "Path":
        k = max(0, min(k, len(self.edges)))
        return Path(self.edges[:k], self.vertices[: k + 1])

    def __str__(self):
        if not self.edges:
            return f"@{self.vertices[0]}"
        return ",".join(map(str, self.edges))


@dataclass(frozen=True)
class InfinitePath:
    """Eventually periodic infinite path ``prefix . period . period ...`` in normal form."""

    prefix: tuple
    period: tuple
    vertices: tuple  # for prefix + one period, so len = |prefix| + |period| + 1

    @property
    def is_finite(self) -> bool:
        return False

    @property
    def range(self):
        return self.vertices[0]

    def edge(self, i: int):
        p = len(self.prefix)
        if i < p:
            return self.prefix[i]
        return self.period[(i - p) % len(self.period)]

    def vertex(self, i: int):
        p = len(self.prefix)
        if i <= p:
            return self.vertices[i]
        return self.vertices[p + (i - p) % len(self.period)]

    def truncate(self, k: int) -> Path:
        return Path(tuple(self.edge(i) for i in range(k)), tuple(self.vertex(i) for i in range(k + 1)))

    def __str__(self):
        return f"inf:{','.join(map(str, self.prefix))}:({','.join(map(str, self.period))})"


def _normal_form(prefix: tuple, period: tuple):
    q = len(period)
    for d in range(1, q + 1):
        if q % d == 0 and period == period[:d] * (q // d):
            period = period[:d]
            break
    while prefix and prefix[-1] == period[-1]:
        prefix = prefix[:-1]
        period = (period[-1],) + period[:-1]
    return prefix, period


class Graph:
    """Finite vertex set, finitely many edges and finitely many bundles ``b[0], b[1], ...``."""

    def __init__(self, vertices: Iterable = (), edges: Iterable = (), bundles: Iterable = ()):
        self.vertices = tuple(vertices)
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError("duplicate vertex names")
        vs = set(self.vertices)
        self.edges = tuple(Edge(*e) for e in edges)
        self.bundles = tuple(Edge(*b) for b in bundles)
        seen = set()
        for e in self.edges + self.bundles:
            if e.id in seen:
                raise InputError(f"duplicate edge id {e.id!r}")
            seen.add(e.id)
            for end in (e.s, e.r):
                if end not in vs:
                    raise InputError(f"edge {e.id!r} uses undeclared vertex {end!r}")
        self._edge = {e.id: e for e in self.edges}
        self._bundle = {b.id: b for b in self.bundles}
        self._vpos = {v: i for i, v in enumerate(self.vertices)}
        self._epos = {e.id: i for i, e in enumerate(self.edges + self.bundles)}

    def __eq__(self, other):
        return (
            isinstance(other, Graph)
            and self.vertices == other.vertices
            and self.edges == other.edges
            and self.bundles == other.bundles
        )

    def __hash__(self):
        return hash((self.vertices, self.edges, self.bundles))

    def __repr__(self):
        return f"Graph(vertices={list(self.vertices)}, edges={list(self.edges)}, bundles={list(self.bundles)})"

    @property
    def is_finite(self) -> bool:
        return not self.bundles

    # edges

    def edge_ref(self, ref):
        """Normalise an edge reference: a plain id, or ``(bundle, index)``."""
        if isinstance(ref, str):
            if ref in self._edge:
                return ref
            raise InputError(f"unknown edge {ref!r}")
        if isinstance(ref, tuple) and len(ref) == 2 and ref[0] in self._bundle:
            idx = ref[1]
            if isinstance(idx, int) and idx >= 0:
                return BundleEdge(ref[0], idx)
        raise InputError(f"unknown edge reference {ref!r}")

    def s(self, ref):
        ref = self.edge_ref(ref)
        return self._bundle[ref.bundle].s if isinstance(ref, BundleEdge) else self._edge[ref].s

    def r(self, ref):
        ref = self.edge_ref(ref)
        return self._bundle[ref.bundle].r if isinstance(ref, BundleEdge) else self._edge[ref].r

    def edge_key(self, ref):
        ref = self.edge_ref(ref)
        if isinstance(ref, BundleEdge):
            return (self._epos[ref.bundle], ref.index)
        return (self._epos[ref], 0)

    def vertex_key(self, v):
        return self._vpos[v]

    def check_vertex(self, v):
        if v not in self._vpos:
            raise InputError(f"unknown vertex {v!r}")
        return v

    def edges_into(self, v) -> list:
        return [e for e in self.edges if e.r == v]

    def bundles_into(self, v) -> list:
        return [b for b in self.bundles if b.r == v]

    # paths

    def vertex_path(self, v) -> Path:
        return Path((), (self.check_vertex(v),))

    def path(self, edges: Sequence, vertex=None) -> Path:
        """Validated finite path; ``vertex`` is the base of an empty path, else a source check."""
        refs = tuple(self.edge_ref(e) for e in edges)
        if not refs:
            if vertex is None:
                raise InputError("the empty path needs a base vertex")
            return self.vertex_path(vertex)
        verts = [self.r(refs[0])]
        for i, e in enumerate(refs):
            if self.r(e) != verts[-1]:
                raise InputError(f"edges {refs[i - 1]} and {e} are not composable")
            verts.append(self.s(e))
        if vertex is not None and vertex != verts[-1]:
            raise InputError(f"path {','.join(map(str, refs))} does not have source {vertex!r}")
        return Path(refs, tuple(verts))

    def infinite_path(self, prefix: Sequence, period: Sequence) -> InfinitePath:
        pre = tuple(self.edge_ref(e) for e in prefix)
        per = tuple(self.edge_ref(e) for e in period)
        if not per:
            raise InputError("an infinite path needs a non-empty period")
        pre, per = _normal_form(pre, per)
        whole = self.path(pre + per + per)
        return InfinitePath(pre, per, whole.vertices[: len(pre) + len(per) + 1])

    def path_key(self, p: Path):
        return (len(p), tuple(self.edge_key(e) for e in p.edges), self.vertex_key(p.range))


def classify(g: Graph) -> VertexClassification:
    vs = frozenset(g.vertices)
    infinite = {b.r for b in g.bundles}
    received = {e.r for e in g.edges} | infinite
    fin = vs - infinite
    src = vs - received
    sing = src | (vs - fin)
    return VertexClassification(fin, frozenset(src), frozenset(sing), vs - sing)


def paths(g: Graph, n: int, bound: int | None = None) -> list[Path]:
    """All length-``n`` paths, bundle members restricted to indices below ``bound``."""
    if not isinstance(n, int) or n < 0:
        raise InputError(f"path length must be a natural number, got {n!r}")
    layer = [g.vertex_path(v) for v in g.vertices]
    for _ in range(n):
        nxt = []
        for mu in layer:
            v = mu.source
            for e in g.edges_into(v):
                nxt.append(Path(mu.edges + (e.id,), mu.vertices + (e.s,)))
            for b in g.bundles_into(v):
                if bound is None:
                    raise InputError(f"bundle {b.id!r} is reachable; a bundle index bound is required")
                for k in range(bound):
                    nxt.append(Path(mu.edges + (BundleEdge(b.id, k),), mu.vertices + (b.s,)))
        layer = nxt
    return sorted(layer, key=g.path_key)


def paths_upto(g: Graph, n: int, bound: int | None = None) -> list[Path]:
    out = []
    for k in range(n + 1):
        out.extend(paths(g, k, bound))
    return out
