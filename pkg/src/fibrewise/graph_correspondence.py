"""Stage algebras and Bratteli diagrams of regulated limits for finite graphs.

For a finite graph ``E`` the compact operators on the ``i``-th tensor power
of the graph correspondence split into blocks ``(i, v)`` of size ``n_i(v)``,
the number of length-``i`` paths with source ``v``.  Left multiplication
extends ``Theta(mu, nu)`` to ``sum_{r(e)=s(mu)} Theta(mu e, nu e)``, so block
``(i, v)`` enters ``(i+1, w)`` once per edge from ``w`` to ``v``.

A vertex set ``V`` regulates the limit: stage ``i`` is the top level ``i``
plus every earlier level ``k < i`` cut down to the vertices outside ``V``.
``V = {}`` is the Toeplitz-type tower, ``V = reg`` the Cuntz-Pimsner core,
``V = all vertices`` the minimal tower (every earlier level is quotiented
away, leaving the plain system of compact-operator algebras).
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Iterable

from fibrewise.errors import InputError, PreconditionError, UnsupportedInputError, VerificationError
from fibrewise.findim_cstar import (
    TAG_A,
    TAG_B,
    BlockIdeal,
    FinDimAlgebra,
    StarMorphism,
    check_extension,
    katsura_ideal,
    quotient_fw,
)
from fibrewise.graph_paths import Graph, classify, paths

MODES = ("toeplitz", "perfect", "min", "custom")


def _require_finite(g: Graph):
    if not g.is_finite:
        raise UnsupportedInputError("algebra side requires finite graph")


@dataclass(frozen=True)
class PathBlockStructure:
    """``counts[i]`` maps vertex ``v`` to ``n_i(v) > 0``."""

    graph: Graph
    counts: tuple

    def n(self, i: int, v) -> int:
        return self.counts[i].get(v, 0)

    def blocks(self, i: int) -> list:
        return [((i, v), self.counts[i][v]) for v in self.graph.vertices if v in self.counts[i]]


def block_structure(g: Graph, i: int) -> PathBlockStructure:
    _require_finite(g)
    if i < 0:
        raise InputError("level must be a natural number")
    level = {v: 1 for v in g.vertices}
    counts = [level]
    for _ in range(i):
        nxt = {}
        for e in g.edges:
            k = level.get(e.r, 0)
            if k:
                nxt[e.s] = nxt.get(e.s, 0) + k
        level = nxt
        counts.append(level)
    return PathBlockStructure(g, tuple(counts))


def block_structure_by_enumeration(g: Graph, i: int) -> PathBlockStructure:
    _require_finite(g)
    counts = []
    for k in range(i + 1):
        c = {}
        for p in paths(g, k):
            c[p.source] = c.get(p.source, 0) + 1
        counts.append(c)
    return PathBlockStructure(g, tuple(counts))


def compact_algebra(g: Graph, i: int) -> FinDimAlgebra:
    return FinDimAlgebra(block_structure(g, i).blocks(i))


def phi_multiplicity(g: Graph, i: int) -> StarMorphism:
    """Left action of level-``i`` compacts on level ``i + 1``."""
    src, tgt = compact_algebra(g, i), compact_algebra(g, i + 1)
    mult = {}
    for e in g.edges:
        a, b = (i, e.r), (i + 1, e.s)
        if a in src and b in tgt:
            mult[(b, a)] = mult.get((b, a), 0) + 1
    return StarMorphism(src, tgt, mult)


def pim_blocks(g: Graph, i: int) -> BlockIdeal:
    alg = compact_algebra(g, i)
    fin = classify(g).fin
    return alg.block_ideal(lab for lab in alg.labels if lab[1] in fin)


def kat_blocks(g: Graph, i: int) -> BlockIdeal:
    """Katsura ideal predicted by transporting ``kat`` of the coefficient map (needs a full module)."""
    alg = compact_algebra(g, i)
    reg = classify(g).reg
    return alg.block_ideal(lab for lab in alg.labels if lab[1] in reg)


def kat_direct(g: Graph, i: int) -> BlockIdeal:
    return katsura_ideal(phi_multiplicity(g, i))


def has_sink(g: Graph) -> bool:
    """A vertex emitting no edge; the module is full exactly when there is none."""
    emitting = {e.s for e in g.edges}
    return any(v not in emitting for v in g.vertices)


# -- regulating choices and stages --------------------------------------------

@dataclass(frozen=True)
class RegulatingChoice:
    mode: str
    V: frozenset

    def __post_init__(self):
        object.__setattr__(self, "V", frozenset(self.V))


def regulating_choice(g: Graph, mode: str, vertices: Iterable | None = None) -> RegulatingChoice:
    _require_finite(g)
    cls = classify(g)
    given = None if vertices is None else frozenset(g.check_vertex(v) for v in vertices)
    if mode == "toeplitz":
        if given:
            raise PreconditionError("toeplitz mode takes no vertices")
        v = frozenset()
    elif mode == "perfect":
        v = cls.reg if given is None else given
        if not v <= cls.reg:
            raise PreconditionError(f"perfect mode needs V within reg; {sorted(v - cls.reg)} are not regular")
    elif mode == "min":
        if given is not None and given != cls.fin:
            raise PreconditionError("min mode uses every finite receiver; do not pass vertices")
        v = cls.fin
    elif mode == "custom":
        if given is None:
            raise PreconditionError("custom mode needs an explicit vertex set")
        if not given <= cls.fin:
            raise PreconditionError(f"V must consist of finite receivers; {sorted(given - cls.fin)} are not")
        v = given
    else:
        raise InputError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")
    return RegulatingChoice(mode, v)


def is_perfect_choice(g: Graph, choice: RegulatingChoice) -> bool:
    return choice.V <= classify(g).reg


def _vset(g: Graph, V) -> frozenset:
    if isinstance(V, RegulatingChoice):
        V = V.V
    v = frozenset(g.check_vertex(x) for x in V)
    if not v <= classify(g).fin:
        raise PreconditionError("V must consist of finite receivers")
    return v


def stage(g: Graph, V, i: int) -> FinDimAlgebra:
    """Top blocks ``(i, v)`` followed by kept blocks ``(k, v)``, ``k < i``, ``v`` outside ``V``."""
    _require_finite(g)
    v = _vset(g, V)
    bs = block_structure(g, i)
    blocks = bs.blocks(i)
    for k in range(i):
        blocks.extend(b for b in bs.blocks(k) if b[0][1] not in v)
    return FinDimAlgebra(blocks)


def block_kind(label, i: int) -> str:
    return "top" if label[0] == i else "quotient"


def connecting(g: Graph, V, i: int) -> StarMorphism:
    v = _vset(g, V)
    src, tgt = stage(g, v, i), stage(g, v, i + 1)
    mult = {}
    for e in g.edges:
        a, b = (i, e.r), (i + 1, e.s)
        if a in src and b in tgt:
            mult[(b, a)] = mult.get((b, a), 0) + 1
    for lab in src.labels:
        if lab[0] < i or lab[1] not in v:
            # kept below the top: passes into the same quotient block
            mult[(lab, lab)] = 1
    return StarMorphism(src, tgt, mult)


# -- towers and diagrams ------------------------------------------------------

@dataclass
class StageTower:
    graph: Graph
    choice: RegulatingChoice
    stages: list
    connecting: list
    structure: PathBlockStructure

    @property
    def dims(self) -> list:
        return [a.dim for a in self.stages]

    def provenance(self, i: int) -> list:
        """Per block of stage ``i``: label, size and whether it is the top level."""
        return [
            {"level": lab[0], "vertex": lab[1], "size": n, "kind": block_kind(lab, i)}
            for lab, n in self.stages[i].blocks
        ]

    def omitted(self, i: int) -> list:
        """Blocks ``(k, v)`` of stage ``i`` dropped because ``n_k(v) = 0``."""
        out = []
        v = self.choice.V
        for k in range(i + 1):
            for x in self.graph.vertices:
                if self.structure.n(k, x) == 0 and (k == i or x not in v):
                    out.append((k, x))
        return out


def tower(g: Graph, choice: RegulatingChoice | Iterable, N: int) -> StageTower:
    _require_finite(g)
    if N < 1:
        raise InputError("a tower needs at least one connecting map (N >= 1)")
    if not isinstance(choice, RegulatingChoice):
        choice = RegulatingChoice("custom", _vset(g, choice))
    stages = [stage(g, choice.V, i) for i in range(N + 1)]
    maps = [connecting(g, choice.V, i) for i in range(N)]
    for i, m in enumerate(maps):
        if not m.is_unital:
            raise VerificationError("connecting maps are unital", f"stage {i}")
    return StageTower(g, choice, stages, maps, block_structure(g, N))


def dimension_law(t: StageTower) -> list:
    """Per step: does ``dim A_{i+1} = dim K_{i+1} + dim A_i - sum_{v in V} n_i(v)^2`` hold?"""
    out = []
    for i in range(len(t.stages) - 1):
        k_next = compact_algebra(t.graph, i + 1).dim
        cut = sum(t.structure.n(i, v) ** 2 for v in t.choice.V)
        out.append(t.stages[i + 1].dim == k_next + t.stages[i].dim - cut)
    return out


@dataclass
class BratteliDiagram:
    """Nodes ``(stage, (level, vertex), size)``; edges ``(stage, from, to, multiplicity)``."""

    nodes: list = field(default_factory=list)
    edges: list = field(default_factory=list)
    meta: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return {
            "meta": self.meta,
            "nodes": [
                {"stage": s, "level": lab[0], "vertex": lab[1], "size": n} for s, lab, n in self.nodes
            ],
            "edges": [
                {
                    "stage": s,
                    "from": {"level": a[0], "vertex": a[1]},
                    "to": {"level": b[0], "vertex": b[1]},
                    "multiplicity": m,
                }
                for s, a, b, m in self.edges
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)

    @classmethod
    def from_dict(cls, d: dict) -> "BratteliDiagram":
        nodes = [(n["stage"], (n["level"], n["vertex"]), n["size"]) for n in d["nodes"]]
        edges = [
            (e["stage"], (e["from"]["level"], e["from"]["vertex"]), (e["to"]["level"], e["to"]["vertex"]), e["multiplicity"])
            for e in d["edges"]
        ]
        return cls(nodes, edges, dict(d.get("meta", {})))

    @classmethod
    def from_json(cls, text: str) -> "BratteliDiagram":
        return cls.from_dict(json.loads(text))

    def stage_dims(self) -> list:
        dims = {}
        for s, _, n in self.nodes:
            dims[s] = dims.get(s, 0) + n * n
        return [dims.get(s, 0) for s in range(self.meta.get("stages", max(dims, default=-1) + 1))]

    def multiplicity(self, s: int, a, b) -> int:
        for st, x, y, m in self.edges:
            if st == s and x == tuple(a) and y == tuple(b):
                return m
        return 0


BrattelliDiagram = BratteliDiagram


def bratteli(t: StageTower) -> BratteliDiagram:
    nodes = [(i, lab, n) for i, a in enumerate(t.stages) for lab, n in a.blocks]
    edges = []
    for i, m in enumerate(t.connecting):
        for b in m.target.labels:
            for a in m.source.labels:
                k = m.m(b, a)
                if k:
                    edges.append((i, a, b, k))
    meta = {"mode": t.choice.mode, "V": sorted(t.choice.V), "stages": len(t.stages)}
    return BratteliDiagram(nodes, edges, meta)


def diagram_matches_tower(d: BratteliDiagram, t: StageTower) -> bool:
    """Edge multiplicities reproduce the connecting morphisms exactly."""
    for i, m in enumerate(t.connecting):
        for b in m.target.labels:
            for a in m.source.labels:
                if d.multiplicity(i, a, b) != m.m(b, a):
                    return False
    return [(s, lab, n) for s, lab, n in d.nodes] == [
        (i, lab, n) for i, a in enumerate(t.stages) for lab, n in a.blocks
    ]


# -- checks -----------------------------------------------------------------

def stage_map_to_compacts(g: Graph, V, i: int) -> StarMorphism:
    """``A_i -> K_{i+1}``: top blocks act by left multiplication, kept blocks by zero."""
    v = _vset(g, V)
    src, tgt = stage(g, v, i), compact_algebra(g, i + 1)
    mult = {}
    for e in g.edges:
        a, b = (i, e.r), (i + 1, e.s)
        if a in src and b in tgt:
            mult[(b, a)] = mult.get((b, a), 0) + 1
    return StarMorphism(src, tgt, mult)


def iterate_check(g: Graph, V, i: int) -> dict:
    """Build stage ``i+1`` as ``K_{i+1} (+)^J A_i`` and compare it with :func:`stage`.

    ``J`` is the set of top blocks ``(i, v)`` with ``v`` in ``V``.  The
    recursion places level ``i`` before the older kept levels, while
    :func:`stage` sorts kept levels upward, so blocks and multiplicities
    are compared as label-keyed maps.
    """
    v = _vset(g, V)
    phi_hat = stage_map_to_compacts(g, v, i)
    J = [lab for lab in phi_hat.source.labels if lab[0] == i and lab[1] in v]
    Q = quotient_fw(phi_hat, J)
    check_extension(Q)

    def untag(label):
        return label[1]

    built = {untag(lab): n for lab, n in Q.carrier.blocks}
    direct = dict(stage(g, v, i + 1).blocks)
    if built != direct:
        for lab in sorted(set(built) | set(direct)):
            if built.get(lab) != direct.get(lab):
                raise VerificationError(
                    "stage blocks", f"stage {i + 1}: first differing block {lab}: {built.get(lab)} vs {direct.get(lab)}"
                )
    conn = connecting(g, v, i)
    built_mult = {(untag(t), s): k for (t, s), k in Q.phi_J.mult.items()}
    if built_mult != conn.mult:
        diff = sorted(set(built_mult.items()) ^ set(conn.mult.items()))
        raise VerificationError("connecting multiplicities", f"stage {i}: first difference {diff[0]}")
    tags_ok = all(t == TAG_B for (t, _), _n in Q.carrier.blocks[: len(Q.B.blocks)]) and all(
        t == TAG_A for (t, _), _n in Q.carrier.blocks[len(Q.B.blocks):]
    )
    return {
        "stage": i + 1,
        "blocks": True,
        "connecting": True,
        "extension": True,
        "layout": tags_ok,
        "multiplicities": built_mult,
    }


def surjection_check(g: Graph, V, V2, i: int) -> bool:
    """For ``V <= V2`` the stage for ``V2`` is a quotient of the stage for ``V``: block containment."""
    v, v2 = _vset(g, V), _vset(g, V2)
    if not v <= v2:
        raise PreconditionError("surjection check needs V contained in V2")
    small, big = dict(stage(g, v2, i).blocks), dict(stage(g, v, i).blocks)
    return all(big.get(lab) == n for lab, n in small.items())


def k0_stage(t: StageTower, i: int) -> dict:
    """Rank of ``K_0`` of stage ``i`` and the integer matrix of the next connecting map."""
    blocks = [list(lab) for lab in t.stages[i].labels]
    out = {"rank": len(blocks), "blocks": blocks}
    if i < len(t.connecting):
        m = t.connecting[i]
        out["matrix"] = m.matrix()
        out["targets"] = [list(lab) for lab in m.target.labels]
    return out
