"""Finite-dimensional C*-algebras as direct sums of matrix blocks.

Scalars are exact Gaussian rationals (sympy's ``QQ_I``).  A *-homomorphism
between block algebras is recorded by its multiplicity matrix ``M[t][s]``
together with one fixed embedding: inside target block ``t`` the source
blocks sit block-diagonally in source order, block ``s`` repeated
``M[t][s]`` times, and the rest is zero.

In finite dimensions several distinctions of the general theory disappear:
the multiplier algebra of ``B`` is ``B``, every morphism is proper, the
corona algebra is zero, so the Pimsner ideal of any morphism is the whole
source.  That collapse is reported through :attr:`BlockIdeal.note` rather
than hidden.  The closed two-sided ideals of a block algebra are exactly the
sums of blocks, so ideals are block-label sets and the annihilator of an
ideal is the complementary set of blocks.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Mapping

from sympy.polys.domains import QQ_I

from fibrewise import linalg
from fibrewise.errors import InputError, PreconditionError, VerificationError

ZERO = QQ_I.zero
ONE = QQ_I.one

FD_COLLAPSE = "finite-dimensional collapse: M(B) = B, so pim is the whole source"


def scalar(x):
    """Coerce ints, Fractions, ``complex`` with rational parts, ``(re, im)`` pairs or QQ_I values."""
    if isinstance(x, tuple) and len(x) == 2:
        return QQ_I(Fraction(x[0]), Fraction(x[1]))
    if isinstance(x, complex):
        return QQ_I(Fraction(x.real), Fraction(x.imag))
    if isinstance(x, (int, Fraction)):
        return QQ_I(Fraction(x), 0)
    if QQ_I.of_type(x):
        return x
    raise InputError(f"not an exact Gaussian rational: {x!r}")


def conj(z):
    return QQ_I(z.x, -z.y)


# -- algebras and elements ---------------------------------------------------

class FinDimAlgebra:
    def __init__(self, blocks: Iterable = ()):
        self.blocks = tuple((label, int(n)) for label, n in blocks)
        labels = [b[0] for b in self.blocks]
        if len(set(labels)) != len(labels):
            raise InputError("block labels must be unique")
        for label, n in self.blocks:
            if n < 1:
                raise InputError(f"block {label!r} has size {n}; sizes must be positive")
        self._size = dict(self.blocks)
        self._pos = {label: i for i, label in enumerate(labels)}

    @property
    def labels(self) -> tuple:
        return tuple(b[0] for b in self.blocks)

    @property
    def dim(self) -> int:
        return sum(n * n for _, n in self.blocks)

    def size(self, label) -> int:
        try:
            return self._size[label]
        except KeyError:
            raise InputError(f"no block {label!r}") from None

    def __contains__(self, label) -> bool:
        return label in self._size

    def __eq__(self, other):
        return isinstance(other, FinDimAlgebra) and self.blocks == other.blocks

    def __hash__(self):
        return hash(self.blocks)

    def __repr__(self):
        inner = " + ".join(f"M_{n}[{label!r}]" for label, n in self.blocks)
        return f"FinDimAlgebra({inner or '0'})"

    def zero(self) -> "AlgElement":
        return AlgElement(self, {})

    def identity(self) -> "AlgElement":
        return AlgElement(self, {label: {(i, i): ONE for i in range(n)} for label, n in self.blocks})

    def unit(self, label, i: int, j: int) -> "AlgElement":
        n = self.size(label)
        if not (0 <= i < n and 0 <= j < n):
            raise InputError(f"matrix unit ({i},{j}) outside block {label!r} of size {n}")
        return AlgElement(self, {label: {(i, j): ONE}})

    def units(self):
        """All matrix units ``(label, i, j)`` in block order."""
        for label, n in self.blocks:
            for i in range(n):
                for j in range(n):
                    yield label, i, j

    def element(self, dense: Mapping) -> "AlgElement":
        out = {}
        for label, rows in dense.items():
            n = self.size(label)
            if len(rows) != n or any(len(r) != n for r in rows):
                raise InputError(f"block {label!r} needs an {n}x{n} matrix")
            out[label] = {(i, j): scalar(v) for i, r in enumerate(rows) for j, v in enumerate(r)}
        return AlgElement(self, out)

    def block_ideal(self, labels: Iterable = (), note: str = "") -> "BlockIdeal":
        return BlockIdeal(self, frozenset(labels), note)


def _clean(m: Mapping) -> dict:
    return {k: v for k, v in m.items() if v}


class AlgElement:
    def __init__(self, algebra: FinDimAlgebra, blocks: Mapping):
        self.algebra = algebra
        clean = {}
        for label, m in blocks.items():
            n = algebra.size(label)
            m = _clean(m)
            if any(not (0 <= i < n and 0 <= j < n) for i, j in m):
                raise InputError(f"entry outside block {label!r}")
            if m:
                clean[label] = m
        self.blocks = clean

    def block(self, label) -> dict:
        self.algebra.size(label)
        return dict(self.blocks.get(label, {}))

    def _same(self, other):
        if not isinstance(other, AlgElement) or other.algebra != self.algebra:
            raise InputError("elements of different algebras")

    def __add__(self, other):
        self._same(other)
        labels = set(self.blocks) | set(other.blocks)
        return AlgElement(self.algebra, {k: linalg.add(self.blocks.get(k, {}), other.blocks.get(k, {})) for k in labels})

    def __sub__(self, other):
        return self + other.scale(-ONE)

    def __neg__(self):
        return self.scale(-ONE)

    def scale(self, c) -> "AlgElement":
        c = scalar(c)
        return AlgElement(self.algebra, {k: {ij: c * v for ij, v in m.items()} for k, m in self.blocks.items()})

    def __mul__(self, other):
        self._same(other)
        labels = set(self.blocks) & set(other.blocks)
        return AlgElement(self.algebra, {k: linalg.matmul(self.blocks[k], other.blocks[k]) for k in labels})

    def star(self) -> "AlgElement":
        return AlgElement(
            self.algebra,
            {k: {(j, i): conj(v) for (i, j), v in m.items()} for k, m in self.blocks.items()},
        )

    def __eq__(self, other):
        return isinstance(other, AlgElement) and self.algebra == other.algebra and self.blocks == other.blocks

    def __hash__(self):
        return hash((self.algebra, frozenset((k, frozenset(m.items())) for k, m in self.blocks.items())))

    def is_zero(self) -> bool:
        return not self.blocks

    def __repr__(self):
        return f"AlgElement({self.blocks!r})"

    def vector(self) -> dict:
        """Coordinates keyed by ``(block position, i, j)``."""
        pos = self.algebra._pos
        return {(pos[k], i, j): v for k, m in self.blocks.items() for (i, j), v in m.items()}


@dataclass(frozen=True)
class BlockIdeal:
    algebra: FinDimAlgebra
    labels: frozenset
    note: str = ""

    def __post_init__(self):
        labels = frozenset(self.labels)
        bad = [x for x in labels if x not in self.algebra]
        if bad:
            raise InputError(f"unknown blocks {bad!r}")
        object.__setattr__(self, "labels", labels)

    def __contains__(self, label) -> bool:
        return label in self.labels

    def __le__(self, other: "BlockIdeal") -> bool:
        return self.labels <= other.labels

    def __eq__(self, other):
        return isinstance(other, BlockIdeal) and self.algebra == other.algebra and self.labels == other.labels

    def __hash__(self):
        return hash((self.algebra, self.labels))

    @property
    def dim(self) -> int:
        return sum(self.algebra.size(x) ** 2 for x in self.labels)

    def ordered(self) -> list:
        return [x for x in self.algebra.labels if x in self.labels]

    def complement(self) -> "BlockIdeal":
        return BlockIdeal(self.algebra, frozenset(self.algebra.labels) - self.labels)


# -- morphisms ---------------------------------------------------------------

class StarMorphism:
    """Canonical *-homomorphism with multiplicities ``mult[(t, s)]``."""

    def __init__(self, source: FinDimAlgebra, target: FinDimAlgebra, mult: Mapping):
        self.source, self.target = source, target
        m = {}
        for (t, s), k in mult.items():
            if t not in target or s not in source:
                raise InputError(f"multiplicity entry {(t, s)!r} names an unknown block")
            if not isinstance(k, int) or k < 0:
                raise InputError(f"multiplicity {(t, s)!r} must be a natural number")
            if k:
                m[(t, s)] = k
        self.mult = m
        for t, nt in target.blocks:
            used = self.filled(t)
            if used > nt:
                raise InputError(f"target block {t!r} of size {nt} cannot hold {used} rows")

    @classmethod
    def from_matrix(cls, source, target, rows) -> "StarMorphism":
        """``rows[t_index][s_index]`` in block order."""
        return cls(
            source,
            target,
            {(t, s): rows[i][j] for i, t in enumerate(target.labels) for j, s in enumerate(source.labels)},
        )

    def m(self, t, s) -> int:
        return self.mult.get((t, s), 0)

    def matrix(self) -> list:
        return [[self.m(t, s) for s in self.source.labels] for t in self.target.labels]

    def filled(self, t) -> int:
        return sum(self.m(t, s) * n for s, n in self.source.blocks)

    @property
    def is_unital(self) -> bool:
        return all(self.filled(t) == n for t, n in self.target.blocks)

    def __eq__(self, other):
        return (
            isinstance(other, StarMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.mult == other.mult
        )

    def __hash__(self):
        return hash((self.source, self.target, frozenset(self.mult.items())))

    def __repr__(self):
        return f"StarMorphism({self.matrix()})"

    def placements(self, t):
        """``(source block, offset)`` pairs of the canonical embedding into ``t``."""
        off = 0
        for s, n in self.source.blocks:
            for _ in range(self.m(t, s)):
                yield s, off
                off += n

    def apply(self, a: AlgElement) -> AlgElement:
        if a.algebra != self.source:
            raise InputError("element is not in the source algebra")
        out = {}
        for t in self.target.labels:
            blk = {}
            for s, off in self.placements(t):
                for (i, j), v in a.blocks.get(s, {}).items():
                    blk[(i + off, j + off)] = v
            if blk:
                out[t] = blk
        return AlgElement(self.target, out)

    __call__ = apply

    def explicit(self) -> "ExplicitMorphism":
        return ExplicitMorphism(
            self.source,
            self.target,
            {u: self.apply(self.source.unit(*u)) for u in self.source.units()},
        )


class ExplicitMorphism:
    """Linear map given by the images of all matrix units of the source."""

    def __init__(self, source: FinDimAlgebra, target: FinDimAlgebra, images: Mapping):
        self.source, self.target = source, target
        imgs = {}
        for u in source.units():
            img = images.get(u, target.zero())
            if img.algebra != target:
                raise InputError(f"image of {u!r} is not in the target algebra")
            imgs[u] = img
        extra = set(images) - set(imgs)
        if extra:
            raise InputError(f"images given for unknown matrix units {sorted(map(repr, extra))}")
        self.images = imgs

    def apply(self, a: AlgElement) -> AlgElement:
        if a.algebra != self.source:
            raise InputError("element is not in the source algebra")
        out = self.target.zero()
        for label, m in a.blocks.items():
            for (i, j), v in m.items():
                out = out + self.images[(label, i, j)].scale(v)
        return out

    __call__ = apply

    def then(self, other: "ExplicitMorphism") -> "ExplicitMorphism":
        return ExplicitMorphism(self.source, other.target, {u: other(img) for u, img in self.images.items()})

    def __eq__(self, other):
        return (
            isinstance(other, ExplicitMorphism)
            and self.source == other.source
            and self.target == other.target
            and self.images == other.images
        )

    __hash__ = None

    def failures(self) -> list:
        """Names of violated *-homomorphism identities on matrix units (empty if none)."""
        bad = []
        for label, i, j in self.source.units():
            x = self.images[(label, i, j)]
            if x.star() != self.images[(label, j, i)]:
                bad.append(f"star({label!r},{i},{j})")
            n = self.source.size(label)
            for k in range(n):
                for l in range(n):
                    prod = self.images[(label, i, l)] if j == k else self.target.zero()
                    if x * self.images[(label, k, l)] != prod:
                        bad.append(f"mult({label!r},{i},{j})({label!r},{k},{l})")
            for other, m in self.source.blocks:
                if other == label:
                    continue
                for k in range(m):
                    for l in range(m):
                        if not (x * self.images[(other, k, l)]).is_zero():
                            bad.append(f"orth({label!r},{other!r})")
                            break
        return bad

    @property
    def is_star_hom(self) -> bool:
        return not self.failures()


# -- ideals ------------------------------------------------------------------

def kernel_ideal(m: StarMorphism) -> BlockIdeal:
    zero = [s for s in m.source.labels if all(m.m(t, s) == 0 for t in m.target.labels)]
    return m.source.block_ideal(zero)


def annihilator(ideal: BlockIdeal) -> BlockIdeal:
    return ideal.complement()


def pimsner_ideal(m: StarMorphism) -> BlockIdeal:
    return m.source.block_ideal(m.source.labels, note=FD_COLLAPSE)


def katsura_ideal(m: StarMorphism) -> BlockIdeal:
    pim = pimsner_ideal(m)
    return m.source.block_ideal(pim.labels & annihilator(kernel_ideal(m)).labels)


def _as_ideal(alg: FinDimAlgebra, j) -> BlockIdeal:
    if isinstance(j, BlockIdeal):
        if j.algebra != alg:
            raise InputError("ideal belongs to another algebra")
        return j
    return alg.block_ideal(j)


# -- quotient fibrewise compactifications ------------------------------------

TAG_B = "B"
TAG_A = "A"


@dataclass
class QuotientFWAlgebra:
    A: FinDimAlgebra
    B: FinDimAlgebra
    phi: StarMorphism
    J: BlockIdeal
    carrier: FinDimAlgebra
    iota_B: StarMorphism
    phi_J: StarMorphism
    alpha: StarMorphism
    q: StarMorphism
    quotient: FinDimAlgebra  # A/J
    perfect: bool
    notes: list = field(default_factory=list)


def quotient_fw(phi: StarMorphism, J=()) -> QuotientFWAlgebra:
    """``B (+)_phi^J A``, realised as ``B + A/J`` with ``phi_J(a) = (phi(a), a + J)``."""
    A, B = phi.source, phi.target
    J = _as_ideal(A, J)
    if not phi.is_unital:
        raise PreconditionError("phi must be unital (proper in finite dimensions)")
    if not J <= pimsner_ideal(phi):
        raise PreconditionError("J must lie in the Pimsner ideal")
    rest = [(s, n) for s, n in A.blocks if s not in J]
    carrier = FinDimAlgebra([((TAG_B, t), n) for t, n in B.blocks] + [((TAG_A, s), n) for s, n in rest])
    quotient = FinDimAlgebra(rest)
    iota = StarMorphism(B, carrier, {((TAG_B, t), t): 1 for t in B.labels})
    mult = {((TAG_B, t), s): k for (t, s), k in phi.mult.items()}
    mult.update({((TAG_A, s), s): 1 for s, _ in rest})
    phi_J = StarMorphism(A, carrier, mult)
    alpha = StarMorphism(carrier, B, {(t, (TAG_B, t)): 1 for t in B.labels})
    q = StarMorphism(carrier, quotient, {(s, (TAG_A, s)): 1 for s, _ in rest})
    perfect = J <= katsura_ideal(phi)
    notes = [FD_COLLAPSE]
    return QuotientFWAlgebra(A, B, phi, J, carrier, iota, phi_J, alpha, q, quotient, perfect, notes)


def unified_algebra(phi: StarMorphism) -> QuotientFWAlgebra:
    return quotient_fw(phi, ())


def b_perp(Q: QuotientFWAlgebra) -> BlockIdeal:
    """Annihilator of ``iota_B(B)`` in the carrier; also checks it matches ``pim / phi_J^-1(B)``."""
    b_blocks = {(TAG_B, t) for t in Q.B.labels}
    perp = Q.carrier.block_ideal(set(Q.carrier.labels) - b_blocks)
    # phi_J^-1(B): source blocks with no multiplicity outside the B blocks
    into_b = [
        s for s in Q.A.labels if all(Q.phi_J.m(c, s) == 0 for c in Q.carrier.labels if c not in b_blocks)
    ]
    lhs = sorted(Q.A.size(s) for s in pimsner_ideal(Q.phi).labels if s not in into_b)
    rhs = sorted(Q.carrier.size(c) for c in perp.labels)
    if lhs != rhs:
        raise VerificationError("pim(phi)/phi_J^-1(B) = B^perp", f"{lhs} != {rhs}")
    return perp


def quotient_map(A: FinDimAlgebra, J) -> StarMorphism:
    J = _as_ideal(A, J)
    rest = [(s, n) for s, n in A.blocks if s not in J]
    return StarMorphism(A, FinDimAlgebra(rest), {(s, s): 1 for s, _ in rest})


def check_extension(Q: QuotientFWAlgebra) -> dict:
    """Verify the exact sequence ``0 -> B -> B (+)_phi^J A -> A/J -> 0`` and ``q . phi_J = quotient``."""
    report = {}
    report["dim"] = Q.carrier.dim == Q.B.dim + Q.A.dim - Q.J.dim
    ker_q = kernel_ideal(Q.q).labels
    image_iota = {t for t in Q.carrier.labels if any(Q.iota_B.m(t, s) for s in Q.B.labels)}
    full = all(Q.iota_B.filled(t) == Q.carrier.size(t) for t in image_iota)
    report["ker q = iota_B(B)"] = ker_q == image_iota and full
    lhs = Q.phi_J.explicit().then(Q.q.explicit())
    rhs = quotient_map(Q.A, Q.J).explicit()
    report["q . phi_J = A -> A/J"] = lhs == rhs
    report["alpha . iota_B = id"] = Q.iota_B.explicit().then(Q.alpha.explicit()) == StarMorphism(
        Q.B, Q.B, {(t, t): 1 for t in Q.B.labels}
    ).explicit()
    for name, ok in report.items():
        if not ok:
            raise VerificationError(name, f"carrier {Q.carrier!r}")
    return report


def _span_dim(elements: Iterable[AlgElement]) -> int:
    return linalg.rank(e.vector() for e in elements)


def sigma_universal(
    Q: QuotientFWAlgebra,
    C: FinDimAlgebra,
    b_blocks: Mapping,
    pi: ExplicitMorphism,
) -> ExplicitMorphism:
    """The map ``sigma_C(b + phi(a), a + J) = b + pi(a)`` out of the quotient algebra.

    ``b_blocks`` identifies each block of ``B`` with an equally sized block of
    ``C``; these form the ideal ``iota_C(B)`` and ``alpha_C`` is the
    compression of ``C`` onto it.
    """
    for t, c in b_blocks.items():
        if Q.B.size(t) != C.size(c):
            raise InputError(f"block {t!r} of B and block {c!r} of C differ in size")
    if set(b_blocks) != set(Q.B.labels) or len(set(b_blocks.values())) != len(b_blocks):
        raise InputError("b_blocks must identify every block of B with a distinct block of C")
    iota_C = StarMorphism(Q.B, C, {(c, t): 1 for t, c in b_blocks.items()}).explicit()
    alpha_C = StarMorphism(C, Q.B, {(t, c): 1 for t, c in b_blocks.items()}).explicit()
    if pi.source != Q.A or pi.target != C:
        raise InputError("pi must map A into C")
    bad = pi.failures()
    if bad:
        raise InputError(f"pi is not a *-homomorphism: {bad[:3]}")
    phi = Q.phi.explicit()
    if pi.then(alpha_C) != phi:
        raise InputError("alpha_C . pi != phi")
    for s in Q.J.labels:
        n = Q.A.size(s)
        for i in range(n):
            for j in range(n):
                a = Q.A.unit(s, i, j)
                if pi(a) != iota_C(phi(a)):
                    raise InputError(f"pi and phi disagree on J at ({s!r},{i},{j})")

    images = {}
    for label, i, j in Q.carrier.units():
        tag, inner = label
        if tag == TAG_B:
            images[(label, i, j)] = iota_C(Q.B.unit(inner, i, j))
        else:
            a = Q.A.unit(inner, i, j)
            images[(label, i, j)] = pi(a) - iota_C(phi(a))
    sigma = ExplicitMorphism(Q.carrier, C, images)

    bad = sigma.failures()
    if bad:
        raise VerificationError("sigma_C is a *-homomorphism", ", ".join(bad[:3]))
    if Q.phi_J.explicit().then(sigma) != pi:
        raise VerificationError("sigma_C . phi_J = pi")
    if Q.iota_B.explicit().then(sigma) != iota_C:
        raise VerificationError("sigma_C . iota_B = iota_C")
    # uniqueness: phi_J(A) + iota_B(B) spans the carrier
    gens = [Q.phi_J(Q.A.unit(*u)) for u in Q.A.units()] + [Q.iota_B(Q.B.unit(*u)) for u in Q.B.units()]
    if _span_dim(gens) != Q.carrier.dim:
        raise VerificationError("phi_J(A) + iota_B(B) spans the carrier")
    return sigma


# -- commutative duality -----------------------------------------------------

def function_algebra(points: Iterable) -> FinDimAlgebra:
    return FinDimAlgebra([(p, 1) for p in points])


def commutative_duality_check(f) -> dict:
    """Compare the unified algebra of ``f^*: C(Y) -> C(X)`` with the unified space of ``f``."""
    from fibrewise.discrete_top import unified

    X, Y = f.source, f.target
    if not X.is_finite or not Y.is_finite:
        raise InputError("duality check needs finite spaces (atoms only)")
    xs, ys = sorted(X.atoms, key=repr), sorted(Y.atoms, key=repr)
    CX, CY = function_algebra(xs), function_algebra(ys)
    f_star = StarMorphism(CY, CX, {(x, f(x)): 1 for x in xs})
    Q = unified_algebra(f_star)
    space = unified(f)
    spectrum = {}
    for label in Q.carrier.labels:
        tag, p = label
        spectrum[label] = space.x(p) if tag == TAG_B else space.y(p)
    points = list(space.points.points())
    report = {
        "block_count": len(Q.carrier.blocks) == len(xs) + len(ys),
        "commutative": all(n == 1 for _, n in Q.carrier.blocks),
        "spectrum_bijection": sorted(spectrum.values(), key=repr) == sorted(points, key=repr)
        and len(set(spectrum.values())) == len(spectrum),
    }
    # the character at each carrier point pulls back along phi_J to evaluation at (+)f of it
    collapse_ok = True
    for label in Q.carrier.labels:
        tag, p = label
        want = f(p) if tag == TAG_B else p
        row = {y: Q.phi_J.m(label, y) for y in ys}
        if row != {y: int(y == want) for y in ys}:
            collapse_ok = False
    report["phi_J matches (+)f"] = collapse_ok
    report["pass"] = all(report.values())
    return report
