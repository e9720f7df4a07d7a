import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from corpus import OMEGA_SEEDS, corpus, edge_uw, loop, omega_graph, two_loops, zinf
from fibrewise.errors import InputError, PreconditionError
from fibrewise.graph_paths import (
    BundleEdge,
    CylinderSet,
    Graph,
    PathSequenceSpec,
    Slot,
    classify,
    converges,
    cylinder_member,
    member,
    paths,
    paths_upto,
    projection,
    regulating_set,
    stage_set,
)


def test_classify_examples():
    c = classify(Graph(["v"]))
    assert (c.src, c.sing, c.fin, c.reg) == ({"v"}, {"v"}, {"v"}, set())
    c = classify(edge_uw())
    assert (c.fin, c.src, c.sing, c.reg) == ({"u", "w"}, {"u"}, {"u"}, {"w"})
    c = classify(Graph(["v", "w"], [], [("b", "w", "v")]))
    assert (c.fin, c.src, c.sing, c.reg) == ({"w"}, {"w"}, {"v", "w"}, set())


def test_classification_invariants():
    graphs = [g for _, g in corpus()] + [omega_graph(s) for s in OMEGA_SEEDS]
    for g in graphs:
        c = classify(g)
        assert c.reg <= c.fin and not (c.reg & c.src)
        assert c.sing == c.src | (set(g.vertices) - c.fin)
        assert c.reg == set(g.vertices) - c.sing


def test_paths_examples():
    assert [str(p) for p in paths(loop(), 3)] == ["e,e,e"]
    assert [str(p) for p in paths(two_loops(), 2)] == ["e,e", "e,f", "f,e", "f,f"]
    assert paths(edge_uw(), 2) == []


def test_paths_need_a_bound_near_bundles():
    with pytest.raises(InputError):
        paths(zinf(), 1)
    assert len(paths(zinf(), 2, bound=3)) == 9
    assert len(paths(zinf(), 0)) == 1


def brute_paths(g, n):
    """All edge tuples of length ``n`` obeying ``s(e_i) = r(e_{i+1})``."""
    out = []
    for tup in itertools.product([e.id for e in g.edges], repeat=n):
        if all(g.s(tup[k]) == g.r(tup[k + 1]) for k in range(n - 1)):
            out.append(tup)
    return out


def test_paths_match_brute_force():
    for _, g in corpus():
        for n in range(1, 4):
            assert sorted(p.edges for p in paths(g, n)) == sorted(brute_paths(g, n))


def test_member_examples():
    g = edge_uw()
    e = g.path(["e"])
    assert member(e, "perfect", g)
    assert not member(g.vertex_path("w"), "perfect", g)
    assert all(member(p, "unified", g) for p in paths_upto(g, 3))
    assert not any(member(p, "min", g) for p in paths_upto(g, 3))
    with pytest.raises(PreconditionError):
        member(e, "perfect", g, ["u"])
    with pytest.raises(PreconditionError):
        regulating_set(g, "custom")


def test_projection_examples():
    g = two_loops()
    assert str(projection(loop().path(["e"] * 3), 2)) == "e,e"
    assert str(projection(g.infinite_path([], ["e", "f"]), 3)) == "e,f,e"
    assert str(projection(loop().vertex_path("v"), 5)) == "@v"


def test_projection_compatibility():
    for _, g in corpus():
        for p in paths_upto(g, 4):
            for k in range(5):
                assert projection(p, k) == projection(projection(p, k + 1), k)


def test_infinite_path_normal_form():
    g = two_loops()
    a = g.infinite_path(["e"], ["f", "e"])
    b = g.infinite_path([], ["e", "f"])
    assert a == b
    assert g.infinite_path(["e", "e"], ["e"]) == g.infinite_path([], ["e", "e"])


def test_cylinder_examples():
    g = loop()
    d = g.path(["e"])
    assert cylinder_member(d, CylinderSet(d))
    assert not cylinder_member(g.path(["e", "e"]), CylinderSet(d, {g.path(["e", "e"])}))
    z = zinf()
    base = z.path([("b", 1)])
    forb = {z.path([("b", 1), ("b", 4)])}
    for j in range(8):
        x = z.infinite_path([("b", 1)], [("b", j)])
        assert cylinder_member(x, CylinderSet(base, forb)) == (j != 4)


def test_stage_set_examples():
    g = edge_uw()
    lab = lambda xs: sorted((k, str(p)) for k, p in xs)  # noqa: E731
    assert lab(stage_set(g, {"w"}, 1)) == [(0, "@u"), (1, "e")]
    assert lab(stage_set(g, set(), 1)) == [(0, "@u"), (0, "@w"), (1, "e")]
    for i in range(4):
        assert [str(p) for _, p in stage_set(loop(), {"v"}, i)] == [str(loop().path(["e"] * i, "v"))]


def test_stage_consistency():
    for _, g in corpus():
        reg = classify(g).reg
        for i in range(4):
            got = {(k, p) for k, p in stage_set(g, reg, i)}
            want = {(len(p), p) for p in paths_upto(g, i) if len(p) == i or p.source not in reg}
            assert got == want


def test_boundary_nesting():
    for _, g in corpus():
        c = classify(g)
        for p in paths_upto(g, 3):
            if member(p, "min", g):
                assert member(p, "perfect", g)
            if member(p, "perfect", g):
                assert member(p, "unified", g)
            assert member(p, "perfect", g) == (p.source in c.sing)


# -- convergence ------------------------------------------------------------------


def test_converge_examples():
    z = zinf()
    walk = PathSequenceSpec((), Slot("b"))
    assert converges(walk, z.vertex_path("d"), "unified", z)
    assert not converges(walk, z.path([("b", 0)]), "unified", z)
    mu = z.path([("b", 2), ("b", 5)])
    assert converges(PathSequenceSpec(mu.edges), mu, "unified", z)


def test_converge_rejects_non_members():
    g = edge_uw()
    with pytest.raises(PreconditionError):
        converges(PathSequenceSpec((), vertex="w"), g.vertex_path("w"), "perfect", g)


# The integer example, decided directly on Z-sequences.  A point is a tuple of
# integers (finite) or a pair (prefix, c) meaning prefix followed by c, c, ...


def z_prefix(a, k):
    if isinstance(a, tuple) and (len(a) != 2 or not isinstance(a[0], tuple)):
        return a[:k] if k <= len(a) else None
    prefix, c = a
    return (prefix + (c,) * k)[:k]


def z_length(a):
    if isinstance(a, tuple) and (len(a) != 2 or not isinstance(a[0], tuple)):
        return len(a)
    return None


def in_neighbourhood(a, n, forbidden):
    """Membership of ``a`` in Z(n, F): starts with ``n`` and no initial segment lies in ``F``."""
    if z_prefix(a, len(n)) != n:
        return False
    for f in forbidden:
        seg = z_prefix(a, len(f))
        if seg is not None and seg == f:
            return False
    return True


def z_converges(seq, target, radius=3):
    """Check every basic neighbourhood of ``target`` built from entries in ``[-radius, radius]``."""
    n_len = z_length(target)
    if n_len is None:
        # infinite target: only the cylinders pi_k^-1 matter
        bases = [z_prefix(target, k) for k in range(5)]
        nbhds = [(b, ()) for b in bases]
    else:
        bases = [target[:k] for k in range(n_len + 1)]
        ext = [target + (c,) for c in range(-radius, radius + 1)]
        ext += [target + (c, c2) for c in (-1, 1) for c2 in (0, 2)]
        nbhds = []
        for b in bases:
            for r in range(3):
                for forb in itertools.combinations(ext, r):
                    nbhds.append((b, forb))
    horizon = range(radius + 2, 4 * radius + 8)
    for n, forb in nbhds:
        if not in_neighbourhood(target, n, forb):
            continue
        if not all(in_neighbourhood(seq(j), n, forb) for j in horizon):
            return False
    return True


def relabel(n: int) -> int:
    return 2 * n if n >= 0 else -2 * n - 1


def to_graph(g, a):
    if z_length(a) is not None:
        return g.path([("b", relabel(x)) for x in a], None if a else "d")
    prefix, c = a
    return g.infinite_path([("b", relabel(x)) for x in prefix], [("b", relabel(c))])


@settings(max_examples=40, deadline=None)
@given(st.lists(st.integers(-3, 3), max_size=3))
def test_integer_example_matches_graph_verdicts(d):
    """b^j = (d, j, j, ...) for j >= 1, relabelled so b[2j] carries the integer j."""
    d = tuple(d)
    g = zinf()
    # j = 1, 2, ... becomes slot index 2*(j'+1) for j' = 0, 1, ...
    spec = PathSequenceSpec(tuple(("b", relabel(x)) for x in d), Slot("b", 2, 2))
    seq = lambda j: (d, j)  # noqa: E731
    targets = [d, d[:-1] if d else d]
    targets += [d + (c,) for c in (-1, 0, 1, 2)]
    targets += [(d, c) for c in (0, 1)]
    for t in targets:
        want = z_converges(seq, t)
        got = converges(spec, to_graph(g, t), "unified", g)
        assert got == want, (d, t)
    assert converges(spec, to_graph(g, d), "unified", g)


def test_integer_example_diverges_as_infinite_paths():
    g = zinf()
    spec = PathSequenceSpec((("b", 3),), Slot("b", 2, 2))
    for c in range(6):
        assert not converges(spec, g.infinite_path([("b", 3)], [("b", c)]), "unified", g)


def test_random_constant_sequences_converge_only_to_themselves():
    g = zinf()
    r = random.Random(5)
    for _ in range(20):
        mu = g.path([("b", r.randint(0, 4)) for _ in range(r.randint(1, 3))])
        nu = g.path([("b", r.randint(0, 4)) for _ in range(r.randint(1, 3))])
        assert converges(PathSequenceSpec(mu.edges), nu, "unified", g) == (mu == nu)


def test_bundle_edge_names():
    assert str(BundleEdge("b", 3)) == "b[3]"
