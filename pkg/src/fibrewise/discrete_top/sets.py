"""Discrete spaces made of finitely many atoms and countably infinite families.

A family ``F`` stands for the isolated points ``(F, 0), (F, 1), ...``.  Subsets
are described per family as either a finite index set (``Fin``) or the
complement of one (``Cofin``); that class is closed under the Boolean
operations, and on a discrete space "compact" is the same as "finite".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Iterator, Mapping, NamedTuple

from fibrewise.errors import InputError

OMEGA = math.inf
"""Cardinality of a countably infinite set."""


class FamilyPoint(NamedTuple):
    family: Hashable
    index: int


@dataclass(frozen=True)
class FamilySpec:
    """Subset of the index set of one family: ``Fin(indices)`` or ``Cofin(indices)``."""

    cofinite: bool
    indices: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "indices", frozenset(self.indices))
        if any(not isinstance(i, int) or i < 0 for i in self.indices):
            raise InputError(f"family indices must be natural numbers: {sorted(self.indices)}")

    def __contains__(self, n: int) -> bool:
        return (n not in self.indices) if self.cofinite else (n in self.indices)

    @property
    def is_empty(self) -> bool:
        return not self.cofinite and not self.indices

    @property
    def is_full(self) -> bool:
        return self.cofinite and not self.indices

    def complement(self) -> "FamilySpec":
        return FamilySpec(not self.cofinite, self.indices)

    def union(self, other: "FamilySpec") -> "FamilySpec":
        a, b = self, other
        if a.cofinite and b.cofinite:
            return FamilySpec(True, a.indices & b.indices)
        if a.cofinite:
            return FamilySpec(True, a.indices - b.indices)
        if b.cofinite:
            return FamilySpec(True, b.indices - a.indices)
        return FamilySpec(False, a.indices | b.indices)

    def intersection(self, other: "FamilySpec") -> "FamilySpec":
        return self.complement().union(other.complement()).complement()

    def is_subset(self, other: "FamilySpec") -> bool:
        return self.intersection(other.complement()).is_empty

    def shifted(self, offset: int) -> "FamilySpec":
        """Image under ``n -> n + offset``."""
        moved = {i + offset for i in self.indices}
        if self.cofinite:
            return FamilySpec(True, moved | set(range(offset)))
        return FamilySpec(False, moved)

    def unshifted(self, offset: int) -> "FamilySpec":
        """Preimage under ``n -> n + offset``."""
        return FamilySpec(self.cofinite, {i - offset for i in self.indices if i >= offset})

    def walk_inside(self, step: int, start: int) -> bool:
        """Whether every index ``step*n + start`` (n >= 0) lies in this spec."""
        if not self.cofinite:
            return False
        return not any(i >= start and (i - start) % step == 0 for i in self.indices)


FIN_EMPTY = FamilySpec(False)
ALL = FamilySpec(True)


@dataclass(frozen=True)
class DiscreteSpace:
    atoms: frozenset = frozenset()
    families: frozenset = frozenset()

    def __post_init__(self):
        object.__setattr__(self, "atoms", frozenset(self.atoms))
        object.__setattr__(self, "families", frozenset(self.families))
        clash = self.atoms & self.families
        if clash:
            raise InputError(f"names used both as atom and family: {sorted(map(repr, clash))}")

    @property
    def is_finite(self) -> bool:
        return not self.families

    def point(self, ref) -> Hashable:
        """Normalise a point reference, raising :class:`InputError` if it is not in the space."""
        if isinstance(ref, FamilyPoint):
            if ref.family in self.families and isinstance(ref.index, int) and ref.index >= 0:
                return ref
            raise InputError(f"unknown point {ref!r}")
        try:
            if ref in self.atoms:
                return ref
        except TypeError:
            raise InputError(f"unhashable point reference {ref!r}") from None
        if (
            isinstance(ref, tuple)
            and len(ref) == 2
            and ref[0] in self.families
            and isinstance(ref[1], int)
            and ref[1] >= 0
        ):
            return FamilyPoint(ref[0], ref[1])
        raise InputError(f"unknown point {ref!r}")

    def contains(self, ref) -> bool:
        try:
            self.point(ref)
        except InputError:
            return False
        return True

    def all(self) -> "DefinableSet":
        return DefinableSet(self, self.atoms, {f: ALL for f in self.families})

    def empty(self) -> "DefinableSet":
        return DefinableSet(self)

    def subset(self, points: Iterable = (), cofinite: Mapping | None = None) -> "DefinableSet":
        """Finite set of ``points`` plus, for each family in ``cofinite``, all indices except the listed ones."""
        atoms = set()
        specs: dict = {}
        for ref in points:
            p = self.point(ref)
            if isinstance(p, FamilyPoint):
                spec = specs.get(p.family, FIN_EMPTY)
                specs[p.family] = spec.union(FamilySpec(False, {p.index}))
            else:
                atoms.add(p)
        for fam, excluded in (cofinite or {}).items():
            if fam not in self.families:
                raise InputError(f"unknown family {fam!r}")
            specs[fam] = specs.get(fam, FIN_EMPTY).union(FamilySpec(True, excluded))
        return DefinableSet(self, atoms, specs)

    def tagged(self, tag) -> "DiscreteSpace":
        return DiscreteSpace({(tag, a) for a in self.atoms}, {(tag, f) for f in self.families})

    @staticmethod
    def disjoint_union(parts: Mapping) -> "DiscreteSpace":
        """Tagged disjoint union of ``{tag: space}``."""
        atoms, fams = set(), set()
        for tag, space in parts.items():
            atoms |= {(tag, a) for a in space.atoms}
            fams |= {(tag, f) for f in space.families}
        return DiscreteSpace(atoms, fams)


def tag_point(p, tag):
    if isinstance(p, FamilyPoint):
        return FamilyPoint((tag, p.family), p.index)
    return (tag, p)


def untag_point(p):
    """Inverse of :func:`tag_point`; returns ``(tag, point)``."""
    if isinstance(p, FamilyPoint):
        tag, fam = p.family
        return tag, FamilyPoint(fam, p.index)
    return p


@dataclass(frozen=True, eq=False)
class DefinableSet:
    """Finitely described subset of a :class:`DiscreteSpace`."""

    space: DiscreteSpace
    atoms: frozenset = frozenset()
    specs: Mapping = field(default_factory=dict)

    def __post_init__(self):
        atoms = frozenset(self.atoms)
        if not atoms <= self.space.atoms:
            raise InputError(f"atoms outside the space: {sorted(map(repr, atoms - self.space.atoms))}")
        specs = {}
        for fam, spec in dict(self.specs).items():
            if fam not in self.space.families:
                raise InputError(f"unknown family {fam!r}")
            if not spec.is_empty:
                specs[fam] = spec
        object.__setattr__(self, "atoms", atoms)
        object.__setattr__(self, "specs", specs)

    @cached_property
    def _key(self):
        return (self.space, self.atoms, frozenset(self.specs.items()))

    def __eq__(self, other):
        return isinstance(other, DefinableSet) and self._key == other._key

    def __hash__(self):
        return hash(self._key)

    def __repr__(self):
        parts = [repr(a) for a in sorted(self.atoms, key=repr)]
        for fam in sorted(self.specs, key=repr):
            spec = self.specs[fam]
            idx = sorted(spec.indices)
            parts.append(f"{fam!r}:{'Cofin' if spec.cofinite else 'Fin'}{idx}")
        return "{" + ", ".join(parts) + "}"

    def spec(self, family) -> FamilySpec:
        return self.specs.get(family, FIN_EMPTY)

    def __contains__(self, ref) -> bool:
        p = self.space.point(ref)
        if isinstance(p, FamilyPoint):
            return p.index in self.spec(p.family)
        return p in self.atoms

    def _check(self, other: "DefinableSet"):
        if other.space != self.space:
            raise InputError("sets live in different spaces")

    def _combine(self, other, atoms, op) -> "DefinableSet":
        fams = set(self.specs) | set(other.specs)
        return DefinableSet(self.space, atoms, {f: op(self.spec(f), other.spec(f)) for f in fams})

    def union(self, other: "DefinableSet") -> "DefinableSet":
        self._check(other)
        return self._combine(other, self.atoms | other.atoms, FamilySpec.union)

    def intersection(self, other: "DefinableSet") -> "DefinableSet":
        self._check(other)
        return self._combine(other, self.atoms & other.atoms, FamilySpec.intersection)

    def complement(self) -> "DefinableSet":
        return DefinableSet(
            self.space,
            self.space.atoms - self.atoms,
            {f: self.spec(f).complement() for f in self.space.families},
        )

    def difference(self, other: "DefinableSet") -> "DefinableSet":
        return self.intersection(other.complement())

    __or__ = union
    __and__ = intersection
    __sub__ = difference

    def is_subset(self, other: "DefinableSet") -> bool:
        return self.difference(other).is_empty

    __le__ = is_subset

    @property
    def is_empty(self) -> bool:
        return not self.atoms and not self.specs

    @property
    def is_finite(self) -> bool:
        return all(not s.cofinite for s in self.specs.values())

    is_compact = is_finite

    def size(self):
        """Number of points, or ``OMEGA``."""
        if not self.is_finite:
            return OMEGA
        return len(self.atoms) + sum(len(s.indices) for s in self.specs.values())

    def points(self) -> Iterator:
        """Enumerate a finite set in a deterministic order."""
        if not self.is_finite:
            raise InputError("cannot enumerate an infinite set")
        yield from sorted(self.atoms, key=repr)
        for fam in sorted(self.specs, key=repr):
            for i in sorted(self.specs[fam].indices):
                yield FamilyPoint(fam, i)

    def sample(self, depth: int) -> list:
        """The atoms plus family points with index below ``depth``."""
        out = sorted(self.atoms, key=repr)
        for fam in sorted(self.specs, key=repr):
            out.extend(FamilyPoint(fam, i) for i in range(depth) if i in self.specs[fam])
        return out

    def tagged(self, tag) -> "DefinableSet":
        return DefinableSet(
            self.space.tagged(tag),
            {(tag, a) for a in self.atoms},
            {(tag, f): s for f, s in self.specs.items()},
        )

    def embed(self, ambient: DiscreteSpace, tag) -> "DefinableSet":
        """Tag this set and view it inside a disjoint union ``ambient``."""
        t = self.tagged(tag)
        return DefinableSet(ambient, t.atoms, t.specs)

    def restrict(self, tag, space: DiscreteSpace) -> "DefinableSet":
        """The part carrying ``tag``, untagged, as a subset of ``space``."""
        atoms = {a[1] for a in self.atoms if a[0] == tag}
        specs = {f[1]: s for f, s in self.specs.items() if f[0] == tag}
        return DefinableSet(space, atoms, specs)
