import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import random_tame_map
from fibrewise.discrete_top import (
    OMEGA,
    Const,
    ConstTo,
    DefinableSet,
    DiscreteSpace,
    FamilyPoint,
    FamilySpec,
    FamilyWalk,
    Reindex,
    SequenceSpec,
    TameMap,
    compose,
    converges,
    is_f_perfect,
    is_f_proper,
    is_open,
    minimal_fw,
    minimal_perfection,
    per_set,
    pr_set,
    unified,
)
from fibrewise.errors import InputError, PreconditionError

DEPTH = 30  # brute-force window; every generated index stays well below it


specs = st.builds(FamilySpec, st.booleans(), st.frozensets(st.integers(0, 12), max_size=5))


def members(spec, depth=DEPTH):
    return {n for n in range(depth) if n in spec}


@given(specs, specs)
def test_family_spec_boolean_ops(a, b):
    assert members(a.union(b)) == members(a) | members(b)
    assert members(a.intersection(b)) == members(a) & members(b)
    assert members(a.complement()) == set(range(DEPTH)) - members(a)
    assert a.is_subset(b) == (members(a) <= members(b))


@given(specs, st.integers(0, 5))
def test_shift_is_image_and_unshift_is_preimage(a, k):
    assert members(a.shifted(k), DEPTH + k) == {n + k for n in members(a)}
    assert members(a.unshifted(k)) == {n for n in range(DEPTH) if n + k in a}


@given(specs, st.integers(1, 4), st.integers(0, 6))
def test_walk_inside(a, step, start):
    brute = all(step * n + start in a for n in range(DEPTH))
    assert a.walk_inside(step, start) == brute


SPACE = DiscreteSpace(["a", "b", "c"], ["F", "G"])


@st.composite
def definable(draw, space=SPACE):
    atoms = draw(st.frozensets(st.sampled_from(sorted(space.atoms))))
    fams = {f: draw(specs) for f in sorted(space.families)}
    return DefinableSet(space, atoms, fams)


def sample(s):
    return set(s.sample(DEPTH))


@given(definable(), definable())
def test_definable_set_algebra(s, t):
    assert sample(s | t) == sample(s) | sample(t)
    assert sample(s & t) == sample(s) & sample(t)
    assert sample(s - t) == sample(s) - sample(t)
    assert (s | t).complement() == s.complement() & t.complement()
    assert s.complement().complement() == s


def test_point_references():
    assert SPACE.point(("F", 3)) == FamilyPoint("F", 3)
    with pytest.raises(InputError):
        SPACE.point(("F", -1))
    with pytest.raises(InputError):
        SPACE.point("zzz")
    s = SPACE.subset(["a", ("G", 2)], cofinite={"F": [0, 1]})
    assert s.size() == OMEGA
    assert ("F", 2) in s and ("F", 1) not in s


# -- maps ------------------------------------------------------------------------


def brute_fibre(f, y, depth=DEPTH):
    """Source points with index below ``depth`` that ``f`` sends to ``y``."""
    src = f.source.all().sample(depth)
    return [x for x in src if f(x) == y]


def brute_fibre_infinite(f, y):
    # tame fibres are either bounded or grow with the window
    return len(brute_fibre(f, y, DEPTH)) != len(brute_fibre(f, y, 2 * DEPTH))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10_000))
def test_preimage_and_image_match_brute_force(seed):
    f = random_tame_map(seed)
    r = random.Random(seed)
    ys = f.target.all().sample(10)
    chosen = [y for y in ys if r.random() < 0.5]
    s = f.target.subset(chosen)
    pre = f.preimage(s)
    for x in f.source.all().sample(DEPTH):
        assert (x in pre) == (f(x) in s)
    img = f.image()
    hit = {f(x) for x in f.source.all().sample(2 * DEPTH)}
    for y in f.target.all().sample(DEPTH):
        assert (y in img) == (y in hit)


def test_then_composes_pointwise():
    X = DiscreteSpace(["a"], ["F"])
    Y = DiscreteSpace(["p"], ["G"])
    W = DiscreteSpace(["w"], ["H"])
    f = TameMap(X, Y, {"a": ("G", 1)}, {"F": Reindex("G", 2)})
    g = TameMap(Y, W, {"p": "w"}, {"G": Reindex("H", 3)})
    gf = f.then(g)
    for x in X.all().sample(10):
        assert gf(x) == g(f(x))


def test_map_rejects_partial_rules():
    X = DiscreteSpace(["a", "b"])
    Y = DiscreteSpace(["p"])
    with pytest.raises(InputError, match="without an image"):
        TameMap(X, Y, {"a": "p"})
    with pytest.raises(InputError):
        Reindex("G", -1)


# -- pr / per -------------------------------------------------------------------


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 10_000), st.data())
def test_maximality_against_fibre_oracle(seed, data):
    f = random_tame_map(seed)
    u = data.draw(definable(f.target))
    # the oracle: U is f-proper iff no point of U has an infinite fibre
    bad = [y for y in u.sample(DEPTH) if brute_fibre_infinite(f, y)]
    proper = not bad
    assert is_f_proper(f, u) == proper
    if proper:
        assert u <= pr_set(f)
    perfect = proper and all(brute_fibre(f, y, 2 * DEPTH) for y in u.sample(DEPTH))
    assert is_f_perfect(f, u) == perfect
    assert per_set(f) == pr_set(f) & f.image()


def test_pr_examples():
    X = DiscreteSpace([], ["F"])
    Y = DiscreteSpace(["y", "z"])
    f = TameMap(X, Y, {}, {"F": ConstTo("y")})
    assert is_f_proper(f, Y.empty()) and is_f_perfect(f, Y.empty())
    assert is_f_proper(f, pr_set(f))
    assert not is_f_proper(f, Y.subset(["y"]))
    assert pr_set(f) == Y.subset(["z"])
    # z is proper but unhit
    assert per_set(f) == Y.empty()


# -- unified spaces -------------------------------------------------------------


def one_point():
    X = DiscreteSpace([], ["F"])
    Y = DiscreteSpace(["y", "y2"])
    return TameMap(X, Y, {}, {"F": ConstTo("y")})


def test_proper_map_gives_isolated_points():
    X = DiscreteSpace(["a", "b"])
    Y = DiscreteSpace(["p"])
    z = unified(TameMap(X, Y, {"a": "p", "b": "p"}))
    for p in z.points.points():
        assert z.is_open(z.ambient.subset([p]))
        assert z.is_isolated(p)


def test_one_point_compactification():
    f = one_point()
    z = unified(f)
    assert not is_open(z.subset(ys=["y"]), z)
    assert is_open(z.subset(ys=["y"], x_cofinite={"F": [0, 4]}), z)
    assert is_open(z.subset(x_cofinite={"F": []}), z)
    assert converges(SequenceSpec((), FamilyWalk(("X", "F"))), ("Y", "y"), z)
    assert not converges(SequenceSpec((), FamilyWalk(("X", "F"))), ("Y", "y2"), z)
    assert not converges(SequenceSpec((), FamilyWalk(("X", "F"))), FamilyPoint(("X", "F"), 0), z)
    assert converges(SequenceSpec((), Const(FamilyPoint(("X", "F"), 2))), FamilyPoint(("X", "F"), 2), z)


def test_const_source_sequence_never_reaches_y_side():
    f = one_point()
    z = unified(f)
    seq = SequenceSpec((), Const(FamilyPoint(("X", "F"), 1)))
    assert not converges(seq, ("Y", "y"), z)


def test_unified_rejects_improper_excision():
    f = one_point()
    with pytest.raises(PreconditionError):
        unified(f, f.target.subset(["y"]))


def test_minimal_fw_and_perfection():
    f = one_point()
    zf = minimal_fw(f)
    assert {p for p in zf.points.sample(3) if p[0] == "Y"} == {("Y", "y")}
    zp = minimal_perfection(f)
    # y2 is unhit, so it is not in per and survives
    assert {p for p in zp.points.sample(3) if p[0] == "Y"} == {("Y", "y"), ("Y", "y2")}
    X = DiscreteSpace(["a"], ["F"])
    ident = TameMap.identity(X)
    assert minimal_fw(ident).points == X.all().embed(minimal_fw(ident).ambient, "X")


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 10_000))
def test_excised_proper_set_is_closed(seed):
    f = random_tame_map(seed)
    z = unified(f)
    u = pr_set(f)
    yu = u.embed(z.ambient, "Y")
    assert z.is_open(z.points - yu)


def test_closure_of_source_is_strict_compactification():
    for seed in range(30):
        f = random_tame_map(seed)
        z = unified(f)
        xs = f.source.all().embed(z.ambient, "X")
        want = xs | (f.target.all() - pr_set(f)).embed(z.ambient, "Y")
        assert z.closure(xs) == want


# -- composition ---------------------------------------------------------------


def chain():
    X = DiscreteSpace(["a"], ["F"])
    Y = DiscreteSpace(["p", "q"], ["G"])
    W = DiscreteSpace(["w", "w2"])
    f = TameMap(X, Y, {"a": "q"}, {"F": Reindex("G")})
    g = TameMap(Y, W, {"p": "w2", "q": "w2"}, {"G": ConstTo("w")})
    return f, g


def test_compose_point_sets_agree():
    f, g = chain()
    c = compose(unified(f), g)
    for order in ("left", "right"):
        assert c.point_set(order) == c.to_order(c.flat_points(), order)


def test_compose_scripted_sequences():
    f, g = chain()
    c = compose(unified(f), g)
    walks = [FamilyWalk(("X", "F"), k, s) for k in (1, 2) for s in (0, 3)]
    walks += [FamilyWalk(("Y", "G"), 1, s) for s in (0, 2)]
    consts = [Const(("X", "a")), Const(("Y", "p")), Const(("W", "w"))]
    targets = [("W", "w"), ("W", "w2"), ("Y", "p"), ("X", "a"), FamilyPoint(("Y", "G"), 1)]
    n = 0
    for tail in walks + consts:
        for p in targets:
            seq = SequenceSpec((), tail)
            assert c.converges(seq, p, "left") == c.converges(seq, p, "right")
            n += 1
    assert n >= 20
    # the X-walk escapes through G to w in both orders
    assert c.converges(SequenceSpec((), FamilyWalk(("X", "F"))), ("W", "w"), "left")


def test_compose_proper_maps_are_discrete():
    X = DiscreteSpace(["a", "b"])
    Y = DiscreteSpace(["p"])
    W = DiscreteSpace(["w"])
    c = compose(unified(TameMap(X, Y, {"a": "p", "b": "p"})), TameMap(Y, W, {"p": "w"}))
    for order in ("left", "right"):
        z = c.space(order)
        assert all(z.is_isolated(p) for p in z.points.points())


def test_compose_rejects_improper_v():
    f, g = chain()
    with pytest.raises(PreconditionError):
        compose(unified(f), g, g.target.subset(["w"]))
