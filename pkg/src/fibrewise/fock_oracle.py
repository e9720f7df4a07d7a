"""Brute-force check of stage dimensions on a truncated Fock space.

The Fock space of a finite graph has one basis vector per path, and the
creation operator of an edge prepends it: ``T_e |mu> = |e mu>`` when
``s(e) = r(mu)``.  Keeping paths of length at most ``N`` gives finite 0/1
matrices.  Spans of ``T_mu T_nu^*`` and ideals generated by the covariance
defects are then computed by exact elimination, independently of the block
combinatorics in :mod:`fibrewise.graph_correspondence`.

Gauge-invariant operators preserve path length, so cutting at level ``N``
compresses them homomorphically; spans are exact once ``N >= i``.  The
stability helpers recompute one level deeper to confirm that.
"""

from __future__ import annotations

from typing import Iterable

from fibrewise import linalg
from fibrewise.errors import InputError, PreconditionError, UnsupportedInputError, VerificationError
from fibrewise.graph_paths import Graph, Path, classify, paths
from fibrewise.linalg import SpanBasis


class FockBasis:
    """All paths of length ``<= depth``, by level and then lexicographically."""

    def __init__(self, g: Graph, depth: int):
        if not g.is_finite:
            raise UnsupportedInputError("the Fock oracle needs a finite graph")
        if depth < 0:
            raise InputError("depth must be a natural number")
        self.graph, self.depth = g, depth
        self.paths: list[Path] = []
        self.levels: list[range] = []
        for k in range(depth + 1):
            start = len(self.paths)
            self.paths.extend(paths(g, k))
            self.levels.append(range(start, len(self.paths)))
        self.index = {p: n for n, p in enumerate(self.paths)}
        self.level_of = [len(p) for p in self.paths]

    @property
    def dim(self) -> int:
        return len(self.paths)

    def vectorize(self, op: dict) -> dict:
        return linalg.vectorize(op, self.dim)


_BASES: dict = {}


def fock_basis(g: Graph, depth: int) -> FockBasis:
    key = (g, depth)
    if key not in _BASES:
        _BASES[key] = FockBasis(g, depth)
    return _BASES[key]


def creation(g: Graph, e: str, N: int) -> dict:
    """Sparse 0/1 matrix ``{(row, col): 1}`` of ``T_e``; its transpose is ``T_e^*``."""
    if not isinstance(e, str) or e not in {x.id for x in g.edges}:
        raise InputError(f"unknown edge {e!r}")
    fb = fock_basis(g, N)
    edge = next(x for x in g.edges if x.id == e)
    out = {}
    for col, mu in enumerate(fb.paths):
        if len(mu) < N and mu.range == edge.s:
            longer = Path((e,) + mu.edges, (edge.r,) + mu.vertices)
            out[(fb.index[longer], col)] = 1
    return out


def vertex_proj(g: Graph, v, N: int) -> dict:
    g.check_vertex(v)
    fb = fock_basis(g, N)
    return {(n, n): 1 for n, p in enumerate(fb.paths) if p.range == v}


class _Ops:
    """Cached creation operators and path products for one ``(graph, N)``."""

    def __init__(self, g: Graph, N: int):
        self.g, self.N = g, N
        self.fb = fock_basis(g, N)
        self.T = {e.id: creation(g, e.id, N) for e in g.edges}
        self.Tt = {k: linalg.transpose(m) for k, m in self.T.items()}
        self.P = {v: vertex_proj(g, v, N) for v in g.vertices}
        self._path = {}

    def t_path(self, mu: Path) -> dict:
        """``T_mu = T_{e1} ... T_{en}``, or ``p_v`` for the vertex path."""
        if mu not in self._path:
            if not mu.edges:
                m = self.P[mu.range]
            else:
                m = self.T[mu.edges[-1]]
                for e in reversed(mu.edges[:-1]):
                    m = linalg.matmul(self.T[e], m)
            self._path[mu] = m
        return self._path[mu]

    def unit(self, mu: Path, nu: Path) -> dict:
        return linalg.matmul(self.t_path(mu), linalg.transpose(self.t_path(nu)))

    def balanced_pairs(self, i: int):
        for k in range(i + 1):
            level = paths(self.g, k)
            for mu in level:
                for nu in level:
                    if mu.source == nu.source:
                        yield mu, nu

    def defect(self, v) -> dict:
        d = dict(self.P[v])
        for e in self.g.edges:
            if e.r == v:
                d = linalg.add(d, linalg.matmul(self.T[e.id], self.Tt[e.id]), -1)
        return d


_OPS: dict = {}


def _ops(g: Graph, N: int) -> _Ops:
    key = (g, N)
    if key not in _OPS:
        _OPS[key] = _Ops(g, N)
    return _OPS[key]


def defect(g: Graph, v, N: int) -> dict:
    """``d_v = p_v - sum_{r(e)=v} T_e T_e^*``."""
    g.check_vertex(v)
    return _ops(g, N).defect(v)


# -- checks ------------------------------------------------------------------

def rep_axiom_check(g: Graph, N: int) -> dict:
    """``T_e^* T_f = [e=f] p_{s(e)}`` below the cut and ``p_v T_e = [v=r(e)] T_e``."""
    ops = _ops(g, N)
    below = {n for n, k in enumerate(ops.fb.level_of) if k <= N - 1}
    checked = 0
    for e in g.edges:
        for f in g.edges:
            lhs = linalg.matmul(ops.Tt[e.id], ops.T[f.id])
            rhs = ops.P[e.s] if e.id == f.id else {}
            lhs = {k: x for k, x in lhs.items() if k[1] in below}
            rhs = {k: x for k, x in rhs.items() if k[1] in below}
            if lhs != rhs:
                raise VerificationError("T_e^* T_f = [e=f] p_s(e)", f"e={e.id}, f={f.id}, N={N}")
            checked += 1
        for v in g.vertices:
            lhs = linalg.matmul(ops.P[v], ops.T[e.id])
            rhs = ops.T[e.id] if v == e.r else {}
            if lhs != rhs:
                raise VerificationError("p_v T_e = [v=r(e)] T_e", f"v={v}, e={e.id}, N={N}")
            checked += 1
    total = {}
    for m in ops.P.values():
        total = linalg.add(total, m)
    if total != linalg.identity(ops.fb.dim):
        raise VerificationError("sum of vertex projections is the identity", f"N={N}")
    return {"N": N, "identities_checked": checked + 1, "pass": True}


def toeplitz_core_span(g: Graph, i: int, N: int | None = None) -> SpanBasis:
    """Exact span of ``T_mu T_nu^*`` with ``|mu| = |nu| <= i`` and ``s(mu) = s(nu)``."""
    N = i if N is None else N
    if N < i:
        raise PreconditionError("truncation depth must be at least the stage index")
    ops = _ops(g, N)
    basis = SpanBasis()
    for mu, nu in ops.balanced_pairs(i):
        basis.add(ops.fb.vectorize(ops.unit(mu, nu)))
    return basis


def span_generators(g: Graph, i: int, N: int) -> list:
    ops = _ops(g, N)
    return [ops.unit(mu, nu) for mu, nu in ops.balanced_pairs(i)]


def defect_ideal(g: Graph, V: Iterable, i: int, N: int, max_rounds: int = 10_000) -> SpanBasis:
    """Two-sided ideal of the level-``<= i`` span generated by the defects ``d_v``, ``v in V``.

    Closure uses left and right products with the spanning operators and the
    raising conjugations ``x -> T_e x T_f^*``; results outside the span are
    dropped.  At ``i = 0`` nothing has been quotiented yet and the ideal is 0.
    """
    ops = _ops(g, N)
    span = toeplitz_core_span(g, i, N)
    ideal = SpanBasis()
    if i == 0:
        return ideal
    gens = span_generators(g, i, N)
    todo = []
    for v in sorted(V, key=g.vertex_key):
        d = ops.defect(v)
        vec = ops.fb.vectorize(d)
        if vec in span and ideal.add(vec):
            todo.append(d)
    rounds = 0
    while todo:
        rounds += 1
        if rounds > max_rounds:
            raise VerificationError("defect ideal stabilises", f"no fixed point after {max_rounds} steps; raise N")
        x = todo.pop()
        cands = []
        for a in gens:
            cands.append(linalg.matmul(a, x))
            cands.append(linalg.matmul(x, a))
        for e in g.edges:
            left = linalg.matmul(ops.T[e.id], x)
            if not left:
                continue
            for f in g.edges:
                cands.append(linalg.matmul(left, ops.Tt[f.id]))
        for c in cands:
            if not c:
                continue
            vec = ops.fb.vectorize(c)
            if vec in span and ideal.add(vec):
                todo.append(c)
    return ideal


def relative_core_dim(g: Graph, V: Iterable, i: int, N: int | None = None, allow_singular: bool = False) -> int:
    """``dim B_[0,i] - dim(defect ideal)``; ``V`` must be regular unless ``allow_singular``."""
    V = frozenset(g.check_vertex(v) for v in V)
    cls = classify(g)
    if not allow_singular and not V <= cls.reg:
        raise PreconditionError(f"V must consist of regular vertices; {sorted(V - cls.reg)} are not")
    N = i + 1 if N is None else N
    if N < i + 1:
        raise PreconditionError("defect ideals need one guard level: N >= i + 1")
    span = toeplitz_core_span(g, i, N)
    return span.dim - defect_ideal(g, V, i, N).dim


def span_stability(g: Graph, i: int) -> tuple:
    a, b = toeplitz_core_span(g, i, i).dim, toeplitz_core_span(g, i, i + 1).dim
    if a != b:
        raise VerificationError("span dimension stable under deeper truncation", f"i={i}: {a} vs {b}")
    return a, b


def relative_stability(g: Graph, V, i: int, allow_singular: bool = False) -> tuple:
    a = relative_core_dim(g, V, i, i + 1, allow_singular)
    b = relative_core_dim(g, V, i, i + 2, allow_singular)
    if a != b:
        raise VerificationError("relative dimension stable under deeper truncation", f"i={i}: {a} vs {b}")
    return a, b


def is_level_preserving(op: dict, fb: FockBasis) -> bool:
    return all(fb.level_of[r] == fb.level_of[c] for r, c in op)


def gauge_grading_check(g: Graph, i: int, N: int | None = None, pairs=None) -> dict:
    """Each ``T_mu T_nu^*`` maps every level into itself (all balanced pairs, or the given ones)."""
    N = i if N is None else N
    ops = _ops(g, N)
    todo = list(ops.balanced_pairs(i)) if pairs is None else list(pairs)
    for mu, nu in todo:
        if not is_level_preserving(ops.unit(mu, nu), ops.fb):
            raise VerificationError("gauge-fixed operators preserve the level grading", f"T_{mu} T_{nu}^*")
    return {"i": i, "N": N, "operators": len(todo), "pass": True}


def rep_ideal_check(g: Graph, N: int = 2) -> dict:
    """No nonzero combination of vertex projections lies in ``span{T_e T_f^*}``."""
    if N < 2:
        raise PreconditionError("rep_ideal_check needs N >= 2")
    ops = _ops(g, N)
    proj = [ops.fb.vectorize(ops.P[v]) for v in g.vertices]
    raising = [
        ops.fb.vectorize(linalg.matmul(ops.T[e.id], ops.Tt[f.id])) for e in g.edges for f in g.edges
    ]
    rp, rt = linalg.rank(proj), linalg.rank(raising)
    together = linalg.rank(proj + raising)
    ok = together == rp + rt
    if not ok:
        raise VerificationError("I_rho = 0 for the Fock representation", f"rank {together} < {rp} + {rt}")
    # vertices receiving nothing: p_z lives on level 0 only, a boundary case outside the claim
    level0 = sorted(classify(g).src, key=g.vertex_key)
    return {"N": N, "rank_projections": rp, "rank_TT*": rt, "pass": True, "level0_only": level0}


def embedding_multiplicities(g: Graph, i: int) -> dict:
    """Count, for each level-``i`` path ``mu``, the level-``i+1`` support of ``T_mu T_mu^*`` by source.

    Returns ``{((i+1, w), (i, v)): m}``; raises if paths in one block disagree.
    """
    ops = _ops(g, i + 1)
    out: dict = {}
    seen: dict = {}
    for mu in paths(g, i):
        p = ops.unit(mu, mu)
        counts: dict = {}
        for r, c in p:
            if r == c and ops.fb.level_of[r] == i + 1:
                w = ops.fb.paths[r].source
                counts[w] = counts.get(w, 0) + 1
        key = mu.source
        if key in seen and seen[key] != counts:
            raise VerificationError("embedding multiplicities constant on a block", f"block {(i, key)}")
        seen[key] = counts
        for w, m in counts.items():
            out[((i + 1, w), (i, key))] = m
    return out


def oracle_dims(g: Graph, V, N: int, allow_singular: bool = False) -> list:
    """Oracle stage dimensions for ``i = 0..N``: span dims if ``V`` is empty, else relative dims."""
    V = frozenset(V)
    if not V:
        return [toeplitz_core_span(g, i, i).dim for i in range(N + 1)]
    return [relative_core_dim(g, V, i, i + 1, allow_singular) for i in range(N + 1)]
