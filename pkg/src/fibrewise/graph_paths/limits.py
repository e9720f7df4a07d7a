"""Regulated limits of the path-space inverse system ``... -> E^2 -> E^1 -> E^0``.

For a vertex set ``V`` the ``V``-regulated limit consists of all infinite
paths and the finite paths whose source lies outside ``V``.  ``V = {}`` gives
the unified limit (all finite and infinite paths), ``V = reg`` the boundary
path space and ``V = fin`` the minimal limit.  Basic neighbourhoods of a
finite point ``mu`` are the cylinders ``Z(mu, F)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable

from fibrewise.errors import InputError, PreconditionError
from fibrewise.graph_paths.graph import (
    BundleEdge,
    Graph,
    InfinitePath,
    Path,
    classify,
    paths,
)

MODES = ("unified", "perfect", "min", "custom")


def regulating_set(g: Graph, mode: str, vertices: Iterable | None = None) -> frozenset:
    """Resolve a mode name (and optional explicit vertices) to the set ``V``."""
    cls = classify(g)
    given = None if vertices is None else frozenset(g.check_vertex(v) for v in vertices)
    if mode == "unified":
        if given:
            raise PreconditionError("unified mode excises nothing; do not pass vertices")
        return frozenset()
    if mode == "perfect":
        v = cls.reg if given is None else given
        if not v <= cls.reg:
            raise PreconditionError(f"perfect mode needs V within the regular vertices, got {sorted(v - cls.reg)} extra")
        return frozenset(v)
    if mode == "min":
        if given is not None and given != cls.fin:
            raise PreconditionError("min mode uses all finite receivers; do not pass vertices")
        return cls.fin
    if mode == "custom":
        if given is None:
            raise PreconditionError("custom mode needs an explicit vertex set")
        if not given <= cls.fin:
            raise PreconditionError(f"V must consist of finite receivers; {sorted(given - cls.fin)} are not")
        return given
    raise InputError(f"unknown mode {mode!r}; expected one of {', '.join(MODES)}")


def member(x, mode: str, g: Graph, vertices: Iterable | None = None) -> bool:
    v = regulating_set(g, mode, vertices)
    return _member(x, v)


def _member(x, v: frozenset) -> bool:
    if isinstance(x, InfinitePath):
        return True
    return x.source not in v


def projection(x, k: int) -> Path:
    if k < 0:
        raise InputError("projection level must be a natural number")
    return x.truncate(k)


def _length(x):
    return len(x) if isinstance(x, Path) else None


@dataclass(frozen=True)
class CylinderSet:
    base: Path
    forbidden: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "forbidden", frozenset(self.forbidden))


def cylinder_member(x, z: CylinderSet) -> bool:
    n = len(z.base)
    if isinstance(x, Path) and len(x) < n:
        return False
    if x.truncate(n) != z.base:
        return False
    for nu in z.forbidden:
        if isinstance(x, Path) and len(nu) > len(x):
            continue
        if x.truncate(len(nu)) == nu:
            return False
    return True


# -- convergence of one-parameter families -----------------------------------

@dataclass(frozen=True)
class Slot:
    """The edge ``bundle[step*j + start]`` repeated ``repeat`` times (``None``: forever)."""

    bundle: str
    step: int = 1
    start: int = 0
    repeat: int | None = None

    def __post_init__(self):
        if self.step < 1 or self.start < 0:
            raise InputError("slot index must be step*j + start with step >= 1, start >= 0")
        if self.repeat is not None and self.repeat < 1:
            raise InputError("slot repeat must be positive or None")

    def edge(self, j: int) -> BundleEdge:
        return BundleEdge(self.bundle, self.step * j + self.start)


@dataclass(frozen=True)
class PathSequenceSpec:
    """``x_j = prefix . slot(j)^repeat . suffix . period^inf``; every part optional."""

    prefix: tuple = ()
    slot: Slot | None = None
    suffix: tuple = ()
    period: tuple = ()
    vertex: str | None = None  # base vertex when the whole template is empty

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        object.__setattr__(self, "suffix", tuple(self.suffix))
        object.__setattr__(self, "period", tuple(self.period))
        if self.slot is not None and self.slot.repeat is None and (self.suffix or self.period):
            raise InputError("nothing can follow a slot that repeats forever")

    @property
    def infinite(self) -> bool:
        return bool(self.period) or (self.slot is not None and self.slot.repeat is None)

    def instantiate(self, g: Graph, j: int):
        pre = self.prefix
        if self.slot is not None:
            e = self.slot.edge(j)
            if self.slot.repeat is None:
                return g.infinite_path(pre, (e,))
            pre = pre + (e,) * self.slot.repeat
        pre = pre + self.suffix
        if self.period:
            return g.infinite_path(pre, self.period)
        return g.path(pre, None if pre else self.vertex)

    def fixed_head(self) -> int | None:
        """Number of leading positions that do not depend on ``j`` (None: all of them)."""
        if self.slot is not None:
            return len(self.prefix)
        if self.infinite:
            return None
        return len(self.prefix) + len(self.suffix)


def _check_members(seq, target, g, v):
    for j in (0, 1, 2):
        x = seq.instantiate(g, j)
        if not _member(x, v):
            raise PreconditionError(f"x_{j} = {x} is not a point of the regulated limit")
    if not _member(target, v):
        raise PreconditionError(f"target {target} is not a point of the regulated limit")


def converges(seq: PathSequenceSpec, target, mode: str, g: Graph, vertices=None) -> bool:
    """Decide ``x_j -> target`` in the regulated limit.

    The first position that depends on ``j`` holds a bundle edge whose index
    is injective in ``j``, so any fixed finite path is matched by at most one
    ``x_j`` once it reaches that position.  A finite target therefore has to
    coincide with the ``j``-independent head exactly; an infinite target is
    approached only by an eventually constant sequence.
    """
    v = regulating_set(g, mode, vertices)
    _check_members(seq, target, g, v)
    head = seq.fixed_head()
    x0 = seq.instantiate(g, 0)
    if isinstance(target, InfinitePath):
        return head is None and x0 == target
    if head is None:
        # constant infinite sequence; never eventually inside Z(mu, {mu e})
        return False
    return len(target) == head and x0.truncate(head) == target


def stage_set(g: Graph, v: Iterable, i: int, bound: int | None = None) -> list:
    """The ``i``-th stage ``E^i + sum_{k<i} (E^k - E^k V)`` as ``(level, path)`` pairs."""
    v = frozenset(g.check_vertex(x) for x in v)
    out = [(i, p) for p in paths(g, i, bound)]
    for k in range(i):
        out.extend((k, p) for p in paths(g, k, bound) if p.source not in v)
    return out
