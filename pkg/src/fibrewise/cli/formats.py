"""Text formats read and written by the command line tool.

Graph files::

    # comment
    vertex u
    vertex w
    edge e u w        # id, source, range
    omega b w w       # countably many parallel edges b[0], b[1], ...

Map files (finite maps for the duality check)::

    space X a b c
    space Y p q
    map a p

Path literals: ``e,f,b[3]`` (edge ids, bundle members as ``b[k]``), ``@v`` or
a bare vertex name for the empty path at ``v``, and ``inf:<prefix>:(<period>)``
for eventually periodic infinite paths.

Sequence specs: ``prefix=<edges>; tail=const:<path>`` (constant sequence
``prefix . path``) or ``prefix=<edges>; tail=walk:<bundle>:<a>n+<b>`` (the
sequence ``x_j = prefix . bundle[a*j+b] . bundle[a*j+b] ...``).
"""

from __future__ import annotations

import re

from fibrewise.discrete_top import DiscreteSpace, TameMap
from fibrewise.errors import InputError
from fibrewise.graph_paths import Graph, PathSequenceSpec, Slot


def parse_graph(text: str) -> Graph:
    vertices, edges, bundles = [], [], []
    declared, ids = set(), set()
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        kind, args = parts[0], parts[1:]

        def fail(msg):
            raise InputError(f"line {lineno}: {msg}")

        if kind == "vertex":
            if len(args) != 1:
                fail("expected 'vertex <name>'")
            if args[0] in declared:
                fail(f"duplicate vertex {args[0]!r}")
            declared.add(args[0])
            vertices.append(args[0])
        elif kind in ("edge", "omega"):
            if len(args) != 3:
                fail(f"expected '{kind} <id> <source> <range>'")
            eid, s, r = args
            if eid in ids:
                fail(f"duplicate edge id {eid!r}")
            if "[" in eid or "]" in eid or "," in eid:
                fail(f"edge id {eid!r} may not contain '[', ']' or ','")
            for end in (s, r):
                if end not in declared:
                    fail(f"vertex {end!r} used before it is declared")
            ids.add(eid)
            (edges if kind == "edge" else bundles).append((eid, s, r))
        else:
            fail(f"unknown directive {kind!r}")
    return Graph(vertices, edges, bundles)


def emit_graph(g: Graph) -> str:
    lines = [f"vertex {v}" for v in g.vertices]
    lines += [f"edge {e.id} {e.s} {e.r}" for e in g.edges]
    lines += [f"omega {b.id} {b.s} {b.r}" for b in g.bundles]
    return "\n".join(lines) + "\n"


_BUNDLE_REF = re.compile(r"^([^\[\],]+)\[(\d+)\]$")


def parse_edge_ref(g: Graph, token: str):
    token = token.strip()
    m = _BUNDLE_REF.match(token)
    if m:
        return g.edge_ref((m.group(1), int(m.group(2))))
    return g.edge_ref(token)


def parse_edges(g: Graph, text: str) -> tuple:
    text = text.strip()
    if not text:
        return ()
    return tuple(parse_edge_ref(g, t) for t in text.split(","))


def parse_path(g: Graph, text: str):
    text = text.strip()
    if text.startswith("inf:"):
        m = re.match(r"^inf:([^:]*):\((.+)\)$", text)
        if not m:
            raise InputError(f"bad infinite path literal {text!r}; expected inf:<prefix>:(<period>)")
        return g.infinite_path(parse_edges(g, m.group(1)), parse_edges(g, m.group(2)))
    if text.startswith("@"):
        return g.vertex_path(text[1:])
    if text in g.vertices and text not in {e.id for e in g.edges}:
        return g.vertex_path(text)
    if not text:
        raise InputError("empty path literal; write @<vertex> for a vertex")
    return g.path(parse_edges(g, text))


_WALK = re.compile(r"^walk:([^:]+):(\d*)n\+(\d+)$")


def parse_sequence(g: Graph, text: str) -> PathSequenceSpec:
    fields = {}
    for part in text.split(";"):
        part = part.strip()
        if not part:
            continue
        if "=" not in part:
            raise InputError(f"bad sequence clause {part!r}; expected key=value")
        key, value = (x.strip() for x in part.split("=", 1))
        if key not in ("prefix", "tail") or key in fields:
            raise InputError(f"unexpected or repeated sequence key {key!r}")
        fields[key] = value
    if "tail" not in fields:
        raise InputError("sequence spec needs a tail=... clause")
    prefix = parse_edges(g, fields.get("prefix", ""))
    tail = fields["tail"]
    if tail.startswith("const:"):
        x = parse_path(g, tail[len("const:"):])
        if x.is_finite:
            if not x.edges:
                if prefix:
                    g.path(prefix, x.source)
                    return PathSequenceSpec(prefix)
                return PathSequenceSpec((), vertex=x.source)
            g.path(prefix + x.edges)
            return PathSequenceSpec(prefix + x.edges)
        g.path(prefix + x.prefix + x.period)
        return PathSequenceSpec(prefix + x.prefix, period=x.period)
    m = _WALK.match(tail)
    if not m:
        raise InputError(f"bad tail {tail!r}; expected const:<path> or walk:<bundle>:<a>n+<b>")
    bundle = m.group(1)
    step = int(m.group(2)) if m.group(2) else 1
    start = int(m.group(3))
    if step < 1:
        raise InputError("walk step must be at least 1")
    g.edge_ref((bundle, 0))
    seq = PathSequenceSpec(prefix, Slot(bundle, step, start))
    seq.instantiate(g, 0)
    return seq


def parse_mapfile(text: str) -> TameMap:
    spaces, rule = {}, {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()

        def fail(msg):
            raise InputError(f"line {lineno}: {msg}")

        if parts[0] == "space":
            if len(parts) < 2 or parts[1] not in ("X", "Y"):
                fail("expected 'space X|Y <points...>'")
            if parts[1] in spaces:
                fail(f"space {parts[1]} declared twice")
            pts = parts[2:]
            if len(set(pts)) != len(pts):
                fail("duplicate point names")
            spaces[parts[1]] = pts
        elif parts[0] == "map":
            if len(parts) != 3:
                fail("expected 'map <x> <y>'")
            if "X" not in spaces or "Y" not in spaces:
                fail("declare both spaces before any map line")
            x, y = parts[1:]
            if x not in spaces["X"]:
                fail(f"{x!r} is not a point of X")
            if y not in spaces["Y"]:
                fail(f"{y!r} is not a point of Y")
            if x in rule:
                fail(f"{x!r} mapped twice")
            rule[x] = y
        else:
            fail(f"unknown directive {parts[0]!r}")
    for name in ("X", "Y"):
        if name not in spaces:
            raise InputError(f"missing 'space {name} ...' line")
    missing = [x for x in spaces["X"] if x not in rule]
    if missing:
        raise InputError(f"points without an image: {', '.join(missing)}")
    return TameMap(DiscreteSpace(spaces["X"]), DiscreteSpace(spaces["Y"]), rule)
