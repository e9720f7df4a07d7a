"""JSON reports and DOT diagrams.  Both are deterministic byte for byte."""

from __future__ import annotations

import json

from fibrewise.graph_correspondence import BratteliDiagram, StageTower, bratteli
from fibrewise.graph_paths import Graph, classify

SCHEMA_VERSION = 1


def graph_dict(g: Graph) -> dict:
    def ed(e):
        return {"id": e.id, "source": e.s, "range": e.r}

    return {
        "vertices": list(g.vertices),
        "edges": [ed(e) for e in g.edges],
        "omega": [ed(b) for b in g.bundles],
    }


def classification_dict(g: Graph) -> dict:
    c = classify(g)
    order = g.vertex_key
    return {k: sorted(getattr(c, k), key=order) for k in ("fin", "src", "sing", "reg")}


def new_report(g: Graph) -> dict:
    return {
        "schema_version": SCHEMA_VERSION,
        "graph": graph_dict(g),
        "classification": classification_dict(g),
        "mode": None,
        "stages": None,
        "connecting": None,
        "verification": None,
    }


def tower_sections(t: StageTower) -> tuple:
    stages = [
        {
            "index": i,
            "blocks": [{"level": lab[0], "vertex": lab[1], "size": n} for lab, n in a.blocks],
            "dim": a.dim,
        }
        for i, a in enumerate(t.stages)
    ]
    conn = []
    for i, m in enumerate(t.connecting):
        for b in m.target.labels:
            for a in m.source.labels:
                k = m.m(b, a)
                if k:
                    conn.append(
                        {
                            "from": {"stage": i, "level": a[0], "vertex": a[1]},
                            "to": {"stage": i + 1, "level": b[0], "vertex": b[1]},
                            "multiplicity": k,
                        }
                    )
    return stages, conn


def dumps(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2, ensure_ascii=False) + "\n"


def _q(s: str) -> str:
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"') + '"'


def _node_id(stage: int, label) -> str:
    return _q(f"s{stage}:{label[0]}:{label[1]}")


def emit_dot(d: BratteliDiagram | StageTower, name: str = "bratteli") -> str:
    if isinstance(d, StageTower):
        d = bratteli(d)
    by_stage: dict = {}
    for s, lab, n in d.nodes:
        by_stage.setdefault(s, []).append((lab, n))
    n_stages = d.meta.get("stages", len(by_stage))
    out = [f"digraph {_q(name)} {{", "  rankdir=LR;", "  node [shape=box];"]
    for s in range(n_stages):
        out.append(f"  subgraph {_q(f'cluster_stage{s}')} {{")
        out.append(f"    label={_q(f'stage {s}')};")
        out.append("    rank=same;")
        for lab, n in by_stage.get(s, []):
            out.append(f"    {_node_id(s, lab)} [label={_q(f'({lab[0]},{lab[1]}):{n}')}];")
        out.append("  }")
    for s, a, b, m in d.edges:
        out.append(f"  {_node_id(s, a)} -> {_node_id(s + 1, b)} [label={_q(str(m))}];")
    out.append("}")
    return "\n".join(out) + "\n"
