"""Fibrewise compactifications of tame maps between discrete spaces."""

from fibrewise.discrete_top.maps import ConstTo, Reindex, TameMap
from fibrewise.discrete_top.sets import (
    OMEGA,
    DefinableSet,
    DiscreteSpace,
    FamilyPoint,
    FamilySpec,
)
from fibrewise.discrete_top.spaces import (
    Composite,
    Const,
    DiscreteTop,
    FamilyWalk,
    SequenceSpec,
    UnifiedSpace,
    compose,
    converges,
    fiber_size,
    is_f_perfect,
    is_f_proper,
    is_open,
    minimal_fw,
    minimal_perfection,
    per_set,
    pr_set,
    unified,
)

__all__ = [
    "OMEGA", "Composite", "Const", "ConstTo", "DefinableSet", "DiscreteSpace",
    "DiscreteTop", "FamilyPoint", "FamilySpec", "FamilyWalk", "Reindex",
    "SequenceSpec", "TameMap", "UnifiedSpace", "compose", "converges",
    "fiber_size", "is_f_perfect", "is_f_proper", "is_open", "minimal_fw",
    "minimal_perfection", "per_set", "pr_set", "unified",
]
