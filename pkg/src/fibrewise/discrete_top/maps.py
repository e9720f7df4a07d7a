"""Tame maps between discrete spaces.

Every atom is sent to a point.  A family is either collapsed onto one point
(:class:`ConstTo`) or shifted injectively into a target family
(:class:`Reindex`).  Images, preimages and fibres of such maps stay definable.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Mapping

from fibrewise.errors import InputError
from fibrewise.discrete_top.sets import (
    ALL,
    OMEGA,
    DefinableSet,
    DiscreteSpace,
    FamilyPoint,
)


@dataclass(frozen=True)
class ConstTo:
    point: Hashable


@dataclass(frozen=True)
class Reindex:
    family: Hashable
    offset: int = 0

    def __post_init__(self):
        if not isinstance(self.offset, int) or self.offset < 0:
            raise InputError(f"reindex offset must be a natural number, got {self.offset!r}")


@dataclass(frozen=True, eq=False)
class TameMap:
    source: DiscreteSpace
    target: DiscreteSpace
    atom_rule: Mapping = field(default_factory=dict)
    family_rule: Mapping = field(default_factory=dict)

    def __post_init__(self):
        atoms = {}
        for a, y in dict(self.atom_rule).items():
            if a not in self.source.atoms:
                raise InputError(f"rule for unknown atom {a!r}")
            atoms[a] = self.target.point(y)
        missing = self.source.atoms - set(atoms)
        if missing:
            raise InputError(f"atoms without an image: {sorted(map(repr, missing))}")
        fams = {}
        for fam, rule in dict(self.family_rule).items():
            if fam not in self.source.families:
                raise InputError(f"rule for unknown family {fam!r}")
            if isinstance(rule, ConstTo):
                rule = ConstTo(self.target.point(rule.point))
            elif isinstance(rule, Reindex):
                if rule.family not in self.target.families:
                    raise InputError(f"reindex into unknown family {rule.family!r}")
            else:
                raise InputError(f"unsupported family rule {rule!r}")
            fams[fam] = rule
        missing = self.source.families - set(fams)
        if missing:
            raise InputError(f"families without a rule: {sorted(map(repr, missing))}")
        object.__setattr__(self, "atom_rule", atoms)
        object.__setattr__(self, "family_rule", fams)

    def _key(self):
        return (
            self.source,
            self.target,
            frozenset(self.atom_rule.items()),
            frozenset(self.family_rule.items()),
        )

    def __eq__(self, other):
        return isinstance(other, TameMap) and self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    @classmethod
    def identity(cls, space: DiscreteSpace) -> "TameMap":
        return cls(space, space, {a: a for a in space.atoms}, {f: Reindex(f) for f in space.families})

    def __call__(self, ref):
        p = self.source.point(ref)
        if isinstance(p, FamilyPoint):
            rule = self.family_rule[p.family]
            if isinstance(rule, ConstTo):
                return rule.point
            return FamilyPoint(rule.family, p.index + rule.offset)
        return self.atom_rule[p]

    def const_targets(self) -> set:
        """Points whose fibre is infinite."""
        return {r.point for r in self.family_rule.values() if isinstance(r, ConstTo)}

    def fiber_size(self, ref):
        y = self.target.point(ref)
        if y in self.const_targets():
            return OMEGA
        n = sum(1 for img in self.atom_rule.values() if img == y)
        if isinstance(y, FamilyPoint):
            n += sum(
                1
                for r in self.family_rule.values()
                if isinstance(r, Reindex) and r.family == y.family and y.index >= r.offset
            )
        return n

    def preimage(self, s: DefinableSet) -> DefinableSet:
        if s.space != self.target:
            raise InputError("preimage of a set outside the target")
        atoms = {a for a, y in self.atom_rule.items() if y in s}
        specs = {}
        for fam, rule in self.family_rule.items():
            if isinstance(rule, ConstTo):
                if rule.point in s:
                    specs[fam] = ALL
            else:
                specs[fam] = s.spec(rule.family).unshifted(rule.offset)
        return DefinableSet(self.source, atoms, specs)

    def image(self, s: DefinableSet | None = None) -> DefinableSet:
        if s is None:
            s = self.source.all()
        if s.space != self.source:
            raise InputError("image of a set outside the source")
        out = self.target.subset(self.atom_rule[a] for a in s.atoms)
        for fam, spec in s.specs.items():
            rule = self.family_rule[fam]
            if isinstance(rule, ConstTo):
                out = out | self.target.subset([rule.point])
            else:
                moved = DefinableSet(self.target, (), {rule.family: spec.shifted(rule.offset)})
                out = out | moved
        return out

    def then(self, g: "TameMap") -> "TameMap":
        """The composite ``g . self``."""
        if g.source != self.target:
            raise InputError("maps are not composable")
        atoms = {a: g(y) for a, y in self.atom_rule.items()}
        fams = {}
        for fam, rule in self.family_rule.items():
            if isinstance(rule, ConstTo):
                fams[fam] = ConstTo(g(rule.point))
                continue
            nxt = g.family_rule[rule.family]
            if isinstance(nxt, ConstTo):
                fams[fam] = nxt
            else:
                fams[fam] = Reindex(nxt.family, rule.offset + nxt.offset)
        return TameMap(self.source, g.target, atoms, fams)
