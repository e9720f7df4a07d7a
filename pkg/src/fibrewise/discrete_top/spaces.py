"""Unified spaces ``X (+)_f^U Y`` over discrete data, and their compositions.

A topological space here is an *ambient* :class:`DiscreteSpace` (the point
labels) together with a definable set of actual ``points`` and a topology
given by decision procedures.  Two kinds exist:

* :class:`DiscreteTop` -- every set is open, compact means finite.
* :class:`UnifiedSpace` -- built from a source space, a target space, a tame
  map between their ambients and an excised set ``U`` of target points.
  Source points carry the tag ``"X"``, surviving target points ``"Y"``.

Openness follows the three conditions characterising opens of the unified
topology: a set ``S`` of the full space is open iff its source part is open,
its target part is open, and for every compact ``K`` in the target part the
set ``f^-1(K) - S`` is compact in the source.  ``S`` is open in the excised
subspace iff ``S`` together with ``U`` is open in the full space (``U`` is
open there, so this is the trace topology).

The quantifier over compact ``K`` is reduced to a finite list of witnesses:
singletons of infinite fibre and, when the target is itself a unified space
over discrete data, the sets ``{b} + (h^-1(b) & T)`` for ``b`` of infinite
``h``-fibre.  Every compact subset of the target part lies in a finite union
of these and of finite sets, and finite unions of compacts are compact.
Deeper nesting is refused with :class:`UnsupportedInputError`.

On a discrete ``X`` the closure of ``X`` inside ``X (+)_f Y`` is ``X`` plus
the points of infinite fibre: a neighbourhood of ``y`` must contain all but
finitely many points of ``f^-1(y)``, so ``y`` is adherent to ``X`` exactly
when that fibre is infinite, i.e. when ``y`` lies outside ``pr(f)``.  Hence
``unified(f, pr(f))`` is already the strict fibrewise compactification.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Hashable

from fibrewise.errors import InputError, PreconditionError, UnsupportedInputError
from fibrewise.discrete_top.maps import ConstTo, Reindex, TameMap
from fibrewise.discrete_top.sets import (
    DefinableSet,
    DiscreteSpace,
    FamilyPoint,
    tag_point,
)

SIDE_X = "X"
SIDE_Y = "Y"


# -- sequences ---------------------------------------------------------------

@dataclass(frozen=True)
class Const:
    point: Hashable


@dataclass(frozen=True)
class FamilyWalk:
    """Tail ``n -> (family, step*n + start)``."""

    family: Hashable
    step: int = 1
    start: int = 0

    def __post_init__(self):
        if not isinstance(self.step, int) or self.step < 1:
            raise InputError(f"walk step must be >= 1, got {self.step!r}")
        if not isinstance(self.start, int) or self.start < 0:
            raise InputError(f"walk start must be >= 0, got {self.start!r}")

    def at(self, n: int) -> FamilyPoint:
        return FamilyPoint(self.family, self.step * n + self.start)


@dataclass(frozen=True)
class SequenceSpec:
    prefix: tuple = ()
    tail: Const | FamilyWalk = None

    def __post_init__(self):
        object.__setattr__(self, "prefix", tuple(self.prefix))
        if not isinstance(self.tail, (Const, FamilyWalk)):
            raise InputError("sequence tail must be Const or FamilyWalk")

    @property
    def eventually_injective(self) -> bool:
        return isinstance(self.tail, FamilyWalk)

    def term(self, n: int):
        if n < len(self.prefix):
            return self.prefix[n]
        n -= len(self.prefix)
        return self.tail.point if isinstance(self.tail, Const) else self.tail.at(n)


def _untag_family(fam):
    return fam[0], fam[1]


# -- spaces ------------------------------------------------------------------

class TopSpace:
    ambient: DiscreteSpace
    points: DefinableSet

    def _own(self, s: DefinableSet) -> DefinableSet:
        if s.space != self.ambient:
            raise InputError("set is not drawn from this space's ambient labels")
        if not s.is_subset(self.points):
            raise InputError(f"set {s!r} contains points outside the space")
        return s

    def point(self, ref):
        p = self.ambient.point(ref)
        if p not in self.points:
            raise InputError(f"{ref!r} is not a point of this space")
        return p

    def is_closed(self, s: DefinableSet) -> bool:
        return self.is_open(self.points - self._own(s))

    def is_compact(self, s: DefinableSet) -> bool:
        return self.is_closed(s) and self.is_precompact(s)

    def is_isolated(self, ref) -> bool:
        return self.is_open(self.ambient.subset([self.point(ref)]))

    def _check_seq(self, seq: SequenceSpec):
        for p in seq.prefix:
            self.point(p)
        tail = seq.tail
        if isinstance(tail, Const):
            self.point(tail.point)
        else:
            if tail.family not in self.ambient.families:
                raise InputError(f"unknown family {tail.family!r}")
            if not self.points.spec(tail.family).walk_inside(tail.step, tail.start):
                raise InputError("walk leaves the point set of the space")

    def converges(self, seq: SequenceSpec, ref) -> bool:
        self._check_seq(seq)
        return self._tail_converges(seq.tail, self.point(ref))

    # hooks: is_open, is_precompact, _tail_converges, escapes, compact_witnesses


class DiscreteTop(TopSpace):
    def __init__(self, space: DiscreteSpace):
        self.ambient = space
        self.points = space.all()

    def __repr__(self):
        return f"DiscreteTop({len(self.ambient.atoms)} atoms, {len(self.ambient.families)} families)"

    def is_open(self, s):
        self._own(s)
        return True

    def is_precompact(self, s):
        return self._own(s).is_finite

    def _tail_converges(self, tail, p) -> bool:
        return isinstance(tail, Const) and tail.point == p

    def escapes(self, tail) -> bool:
        return isinstance(tail, FamilyWalk)

    def compact_witnesses(self, part: DefinableSet) -> list:
        # compact = finite; singletons are handled by the caller
        return []


class UnifiedSpace(TopSpace):
    """``source (+)_f^U target`` with ``f`` a tame map between ambients."""

    def __init__(self, source: TopSpace, target: TopSpace, f: TameMap, excised: DefinableSet | None = None):
        if f.source != source.ambient or f.target != target.ambient:
            raise InputError("map does not match the ambients of source and target")
        if excised is None:
            excised = target.ambient.empty()
        target._own(excised)
        outside = f.image(source.points) - target.points
        if not outside.is_empty:
            raise InputError(f"map sends points outside the target: {outside!r}")
        self.source, self.target, self.f, self.excised = source, target, f, excised
        self.ambient = DiscreteSpace.disjoint_union({SIDE_X: source.ambient, SIDE_Y: target.ambient})
        self.points = source.points.embed(self.ambient, SIDE_X) | (target.points - excised).embed(
            self.ambient, SIDE_Y
        )

    # spec names
    @property
    def X(self):
        return self.source

    @property
    def Y(self):
        return self.target

    @property
    def U(self):
        return self.excised

    def __repr__(self):
        return f"UnifiedSpace({self.source!r} -> {self.target!r}, excised={self.excised!r})"

    def x(self, ref):
        return tag_point(self.source.point(ref), SIDE_X)

    def y(self, ref):
        p = self.target.point(ref)
        if p in self.excised:
            raise InputError(f"{ref!r} was excised")
        return tag_point(p, SIDE_Y)

    def subset(self, xs=(), ys=(), x_cofinite=None, y_cofinite=None) -> DefinableSet:
        sx = self.source.ambient.subset(xs, x_cofinite)
        sy = self.target.ambient.subset(ys, y_cofinite)
        return self._own(sx.embed(self.ambient, SIDE_X) | sy.embed(self.ambient, SIDE_Y))

    def parts(self, s: DefinableSet):
        return s.restrict(SIDE_X, self.source.ambient), s.restrict(SIDE_Y, self.target.ambient)

    def collapse(self, s: DefinableSet) -> DefinableSet:
        """Image under the extended map onto the target: ``f`` on X, identity on Y."""
        sx, sy = self.parts(s)
        return self.f.image(sx) | sy

    # topology

    def is_open(self, s: DefinableSet) -> bool:
        sx, sy = self.parts(self._own(s))
        full_y = sy | self.excised
        if not self.source.is_open(sx):
            return False
        if not self.target.is_open(full_y):
            return False
        for k in self._witnesses(full_y):
            rest = self.f.preimage(k) & self.source.points
            if not self.source.is_precompact(rest - sx):
                return False
        return True

    def _witnesses(self, part: DefinableSet) -> list:
        out = [self.target.ambient.subset([y]) for y in self.f.const_targets() if y in part]
        return out + self.target.compact_witnesses(part)

    def compact_witnesses(self, part: DefinableSet) -> list:
        if not isinstance(self.source, DiscreteTop) or not isinstance(self.target, DiscreteTop):
            raise UnsupportedInputError("compactness witnesses need a unified space over discrete data")
        px, py = self.parts(part)
        out = []
        for b in self.f.const_targets():
            if b in py:
                fib = self.f.preimage(self.target.ambient.subset([b])) & px
                out.append(self.ambient.subset([tag_point(b, SIDE_Y)]) | fib.embed(self.ambient, SIDE_X))
        return out

    def is_precompact(self, s: DefinableSet) -> bool:
        return self.target.is_precompact(self.collapse(self._own(s)))

    def closure(self, s: DefinableSet) -> DefinableSet:
        """Closure over discrete data: add ``y`` whose fibre meets ``S`` infinitely."""
        if not isinstance(self.source, DiscreteTop) or not isinstance(self.target, DiscreteTop):
            raise UnsupportedInputError("closure is implemented over discrete data only")
        sx, _ = self.parts(self._own(s))
        out = s
        for y in self.f.const_targets():
            if y in self.excised:
                continue
            if not (self.f.preimage(self.target.ambient.subset([y])) & sx).is_finite:
                out = out | self.ambient.subset([tag_point(y, SIDE_Y)])
        return out

    # sequences

    def _image_tail(self, tail):
        side, fam = _untag_family(tail.family)
        if side == SIDE_Y:
            return FamilyWalk(fam, tail.step, tail.start)
        rule = self.f.family_rule[fam]
        if isinstance(rule, ConstTo):
            return Const(rule.point)
        return FamilyWalk(rule.family, tail.step, tail.start + rule.offset)

    def _tail_converges(self, tail, p) -> bool:
        if isinstance(tail, Const):
            return tail.point == p
        side_p = p[0] if not isinstance(p, FamilyPoint) else p.family[0]
        side_t, fam = _untag_family(tail.family)
        if side_p == SIDE_X:
            if side_t != SIDE_X:
                return False
            inner = p[1] if not isinstance(p, FamilyPoint) else FamilyPoint(p.family[1], p.index)
            return self.source._tail_converges(FamilyWalk(fam, tail.step, tail.start), inner)
        target_p = p[1] if not isinstance(p, FamilyPoint) else FamilyPoint(p.family[1], p.index)
        if not self.target._tail_converges(self._image_tail(tail), target_p):
            return False
        if side_t == SIDE_X:
            return self.source.escapes(FamilyWalk(fam, tail.step, tail.start))
        return True

    def escapes(self, tail) -> bool:
        if isinstance(tail, Const):
            return False
        return self.target.escapes(self._image_tail(tail))


# -- constructions -----------------------------------------------------------

def pr_set(f: TameMap) -> DefinableSet:
    """Finite-fibre locus; always cofinite-representable."""
    return f.target.all() - f.target.subset(f.const_targets())


def per_set(f: TameMap) -> DefinableSet:
    return pr_set(f) & f.image()


def fiber_size(f: TameMap, y):
    return f.fiber_size(y)


def is_f_proper(f: TameMap, u: DefinableSet) -> bool:
    return u.is_subset(pr_set(f))


def is_f_perfect(f: TameMap, u: DefinableSet) -> bool:
    return u.is_subset(per_set(f))


def unified(f: TameMap, u: DefinableSet | None = None) -> UnifiedSpace:
    if u is None:
        u = f.target.empty()
    if u.space != f.target:
        raise InputError("excision must be a subset of the target")
    if not is_f_proper(f, u):
        raise PreconditionError(f"excised set {u!r} is not f-proper")
    return UnifiedSpace(DiscreteTop(f.source), DiscreteTop(f.target), f, u)


def minimal_fw(f: TameMap) -> UnifiedSpace:
    return unified(f, pr_set(f))


def minimal_perfection(f: TameMap) -> UnifiedSpace:
    return unified(f, per_set(f))


def is_open(s: DefinableSet, z: TopSpace) -> bool:
    return z.is_open(s)


def converges(seq: SequenceSpec, p, z: TopSpace) -> bool:
    return z.converges(seq, p)


def _relabel(s: DefinableSet, ambient: DiscreteSpace, label: Callable) -> DefinableSet:
    atoms = {label(a) for a in s.atoms}
    specs = {label(fam): spec for fam, spec in s.specs.items()}
    return DefinableSet(ambient, atoms, specs)


def _relabel_point(p, label: Callable):
    if isinstance(p, FamilyPoint):
        return FamilyPoint(label(p.family), p.index)
    return label(p)


class Composite:
    """A two-stage unified space ``X -> Y -> W`` built in both association orders.

    Points and sets are given in the flat labelling of ``X + Y + W`` (tags
    ``"X"``, ``"Y"``, ``"W"``) and translated into each order:

    * left  ``(X (+)_f^U Y) (+)_{g.f}^V W``
    * right ``X (+)_{f}^{U} (Y (+)_g^V W)``
    """

    _LEFT = {"X": ("X", "X"), "Y": ("X", "Y"), "W": ("Y",)}
    _RIGHT = {"X": ("X",), "Y": ("Y", "X"), "W": ("Y", "Y")}

    def __init__(self, z1: UnifiedSpace, g: TameMap, v: DefinableSet | None = None):
        if not isinstance(z1.source, DiscreteTop) or not isinstance(z1.target, DiscreteTop):
            raise UnsupportedInputError("compose expects a unified space over discrete data")
        f, u = z1.f, z1.excised
        if g.source != f.target:
            raise InputError("g must start where f ends")
        if v is None:
            v = g.target.empty()
        if not is_f_proper(f, u):
            raise PreconditionError("U is not f-proper")
        if not is_f_proper(g, v):
            raise PreconditionError("V is not g-proper")
        self.f, self.g, self.u, self.v = f, g, u, v
        X, Y, W = f.source, f.target, g.target
        self.flat = DiscreteSpace.disjoint_union({"X": X, "Y": Y, "W": W})

        # left: the outer map is g on the Y side and g.f on the X side
        outer_atoms = {(SIDE_X, a): g(f(a)) for a in X.atoms}
        outer_atoms.update({(SIDE_Y, a): g(a) for a in Y.atoms})
        outer_fams = {(SIDE_X, fam): r for fam, r in f.then(g).family_rule.items()}
        outer_fams.update({(SIDE_Y, fam): r for fam, r in g.family_rule.items()})
        outer = TameMap(z1.ambient, W, outer_atoms, outer_fams)
        self.left = UnifiedSpace(z1, DiscreteTop(W), outer, v)

        # right: f followed by the inclusion of Y into Y (+)_g^V W
        z2 = UnifiedSpace(DiscreteTop(Y), DiscreteTop(W), g, v)
        inner_atoms = {a: tag_point(f(a), SIDE_X) for a in X.atoms}
        inner_fams = {}
        for fam, r in f.family_rule.items():
            if isinstance(r, ConstTo):
                inner_fams[fam] = ConstTo(tag_point(r.point, SIDE_X))
            else:
                inner_fams[fam] = Reindex((SIDE_X, r.family), r.offset)
        inner = TameMap(X, z2.ambient, inner_atoms, inner_fams)
        self.right = UnifiedSpace(DiscreteTop(X), z2, inner, u.embed(z2.ambient, SIDE_X))

    def space(self, order: str) -> UnifiedSpace:
        if order not in ("left", "right"):
            raise InputError(f"unknown association order {order!r}")
        return self.left if order == "left" else self.right

    def _label(self, order):
        table = self._LEFT if order == "left" else self._RIGHT

        def label(name):
            tag, inner = name
            for t in reversed(table[tag]):
                inner = (t, inner)
            return inner

        return label

    def to_order(self, s: DefinableSet, order: str) -> DefinableSet:
        if s.space != self.flat:
            raise InputError("set is not drawn from the flat labelling")
        return _relabel(s, self.space(order).ambient, self._label(order))

    def point_to_order(self, p, order: str):
        return _relabel_point(self.flat.point(p), self._label(order))

    def seq_to_order(self, seq: SequenceSpec, order: str) -> SequenceSpec:
        label = self._label(order)
        prefix = tuple(_relabel_point(self.flat.point(p), label) for p in seq.prefix)
        t = seq.tail
        if isinstance(t, Const):
            tail = Const(_relabel_point(self.flat.point(t.point), label))
        else:
            tail = FamilyWalk(label(t.family), t.step, t.start)
        return SequenceSpec(prefix, tail)

    def flat_points(self) -> DefinableSet:
        f_pts = (
            self.f.source.all().embed(self.flat, "X")
            | (self.f.target.all() - self.u).embed(self.flat, "Y")
            | (self.g.target.all() - self.v).embed(self.flat, "W")
        )
        return f_pts

    def point_set(self, order: str) -> DefinableSet:
        return self.space(order).points

    def is_open(self, s: DefinableSet, order: str) -> bool:
        return self.space(order).is_open(self.to_order(s, order))

    def converges(self, seq: SequenceSpec, p, order: str) -> bool:
        return self.space(order).converges(self.seq_to_order(seq, order), self.point_to_order(p, order))


def compose(z1: UnifiedSpace, g: TameMap, v: DefinableSet | None = None) -> Composite:
    return Composite(z1, g, v)
