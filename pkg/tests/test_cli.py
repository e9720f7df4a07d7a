import json

import pytest

from corpus import corpus, edge_uw, omega_graph, OMEGA_SEEDS, zinf
from fibrewise.cli import main
from fibrewise.cli.formats import emit_graph, parse_graph
from fibrewise.errors import InputError

UW = "vertex u\nvertex w\nedge e u w\n"
LOOP = "# one vertex, one loop\nvertex v\nedge e v v\n"
TWO = "vertex v\nedge e v v\nedge f v v\n"
ZINF = "vertex d\nomega b d d\n"


@pytest.fixture
def put(tmp_path):
    def write(text, name="g.txt"):
        p = tmp_path / name
        p.write_text(text, encoding="utf-8")
        return str(p)

    return write


def call(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_round_trip_on_corpus():
    graphs = [g for _, g in corpus()] + [zinf()] + [omega_graph(s) for s in OMEGA_SEEDS]
    for g in graphs:
        text = emit_graph(g)
        assert parse_graph(text) == g
        assert emit_graph(parse_graph(text)) == text


@pytest.mark.parametrize(
    "text, line",
    [
        ("vertex u\nedge e u w\n", 2),
        ("vertex u\nvertex u\n", 2),
        ("vertex u\n\n# c\nedge e u u\nedge e u u\n", 5),
        ("vertex u\nloop e u\n", 2),
        ("vertex\n", 1),
        ("vertex u\nedge b[1] u u\n", 2),
    ],
)
def test_parse_errors_carry_line_numbers(text, line, put, capsys):
    with pytest.raises(InputError, match=f"line {line}:"):
        parse_graph(text)
    code, out, err = call(capsys, "classify", put(text))
    assert code == 2 and f"line {line}" in err and out == ""


def test_classify_examples(put, capsys):
    code, out, _ = call(capsys, "classify", put(UW))
    rep = json.loads(out)
    assert code == 0 and rep["classification"]["reg"] == ["w"]
    assert rep["schema_version"] == 1
    code, out, _ = call(capsys, "classify", put(""))
    assert json.loads(out)["classification"] == {"fin": [], "src": [], "sing": [], "reg": []}
    code, out, _ = call(capsys, "classify", put("vertex v\nvertex w\nomega b w v\n"))
    assert "v" in json.loads(out)["classification"]["sing"]


def test_boundary_examples(put, capsys):
    f = put(UW)

    def listed(*extra):
        code, out, _ = call(capsys, "boundary", f, *extra)
        assert code == 0
        return [p["path"] for p in json.loads(out)["paths"]]

    assert listed() == ["@u", "e"]
    assert sorted(listed("--mode", "unified")) == ["@u", "@w", "e"]
    assert listed("--mode", "min") == []
    assert listed("--mode", "custom", "--vertices", "w") == ["@u", "e"]
    assert listed("--mode", "custom", "--vertices", "u") == ["@w"]
    code, _, err = call(capsys, "boundary", f, "--mode", "perfect", "--vertices", "u")
    assert code == 2 and "regular" in err
    code, _, err = call(capsys, "boundary", f, "--mode", "custom")
    assert code == 2 and err


def test_boundary_needs_bound_for_bundles(put, capsys):
    f = put(ZINF)
    assert call(capsys, "boundary", f, "--mode", "unified")[0] == 2
    code, out, _ = call(capsys, "boundary", f, "--mode", "unified", "--max-len", "1", "--bundle-bound", "2")
    assert code == 0 and [p["path"] for p in json.loads(out)["paths"]] == ["@d", "b[0]", "b[1]"]


def test_core_examples(put, capsys):
    code, out, _ = call(capsys, "core", put(LOOP), "--emit", "dot")
    assert code == 0
    nodes = [ln for ln in out.splitlines() if '[label="(' in ln and "->" not in ln]
    assert [n.split('label="')[1][:7] for n in nodes] == ["(0,v):1", "(1,v):1", "(2,v):1", "(3,v):1"]
    assert len([ln for ln in out.splitlines() if "->" in ln]) == 3
    code, out, _ = call(capsys, "core", put(TWO), "--mode", "toeplitz", "--stages", "2")
    assert [s["dim"] for s in json.loads(out)["stages"]] == [1, 5, 21]
    code, out, _ = call(capsys, "core", put(UW))
    rep = json.loads(out)
    assert [s["dim"] for s in rep["stages"]] == [2, 2, 2, 2]
    assert all(len(s["blocks"]) == 2 for s in rep["stages"])


def test_core_rejects_bundles(put, capsys):
    code, out, err = call(capsys, "core", put(ZINF))
    assert code == 2 and "algebra side requires finite graph" in err


def test_dot_layout(put, capsys):
    _, out, _ = call(capsys, "core", put(UW), "--stages", "2", "--emit", "dot")
    assert out.startswith("digraph")
    assert "rankdir=LR" in out
    assert out.count("subgraph") == 3


def test_verify_corpus_and_fault(put, capsys):
    for name, g in corpus():
        f = put(emit_graph(g), f"{name}.txt")
        code, out, _ = call(capsys, "verify", f)
        ver = json.loads(out)["verification"]
        assert code == 0 and ver["match"], name
        assert ver["oracle_dims"] == ver["stage_dims"]
    code, out, _ = call(capsys, "verify", put(LOOP))
    assert json.loads(out)["verification"]["oracle_dims"] == [1, 2, 3, 4]
    code, out, _ = call(capsys, "verify", put(TWO), "--inject-fault", "1")
    ver = json.loads(out)["verification"]
    assert code == 1 and not ver["match"]
    assert {f["stage"] for f in ver["failures"] if f["check"] == "iterate"} == {1}
    assert call(capsys, "verify", put(TWO), "--inject-fault", "9")[0] == 2


def test_verify_non_regular_choice_is_not_compared(put, capsys):
    code, out, _ = call(capsys, "verify", put(UW), "--mode", "min")
    ver = json.loads(out)["verification"]
    assert code == 0 and ver["oracle_comparable"] is False
    assert ver["checks"]["oracle_equivalence"] is None


def test_converge(put, capsys):
    f = put(ZINF)

    def verdict(seq, target, code=0):
        c, out, _ = call(capsys, "converge", f, "--seq", seq, "--target", target)
        assert c == code
        return json.loads(out)["converges"] if out else None

    assert verdict("tail=walk:b:n+0", "@d") is True
    assert verdict("tail=walk:b:n+0", "d") is True
    assert verdict("prefix=b[1]; tail=const:b[2]", "b[1],b[2]") is True
    assert verdict("tail=const:b[2]", "b[3]") is False
    assert verdict("prefix=b[3]; tail=walk:b:2n+2", "b[3]") is True
    assert verdict("prefix=b[3]; tail=walk:b:2n+2", "inf:b[3]:(b[0])") is False
    assert verdict("tail=walk:q:n+0", "@d", code=2) is None
    assert verdict("tail=nonsense", "@d", code=2) is None
    assert verdict("tail=walk:b:n+0", "inf:b[0]", code=2) is None


def test_duality(put, capsys):
    ok = put("space X a b c\nspace Y p q\nmap a p\nmap b p\nmap c q\n", "m.txt")
    assert call(capsys, "duality", ok)[0] == 0
    one = put("space X a\nspace Y p\nmap a p\n", "one.txt")
    assert call(capsys, "duality", one)[0] == 0
    bad = put("space X a b\nspace Y p\nmap a p\n", "bad.txt")
    code, _, err = call(capsys, "duality", bad)
    assert code == 2 and "without an image: b" in err
    bad = put("space X a\nspace Y p\nmap a z\n", "bad2.txt")
    code, _, err = call(capsys, "duality", bad)
    assert code == 2 and "line 3" in err


def test_usage_and_missing_files(tmp_path, capsys):
    code, _, err = call(capsys, "classify", str(tmp_path / "nope.txt"))
    assert code == 2 and "cannot read" in err
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    with pytest.raises(SystemExit) as exc:
        main(["core", str(tmp_path / "x"), "--emit", "svg"])
    assert exc.value.code == 2


def test_outputs_are_byte_identical(put, capsys):
    f = put(TWO)
    runs = [
        ("core", f, "--emit", "dot"),
        ("core", f, "--mode", "toeplitz"),
        ("verify", f),
        ("boundary", f, "--mode", "unified"),
        ("classify", f),
    ]
    for argv in runs:
        first = call(capsys, *argv)
        assert call(capsys, *argv) == first
    g = edge_uw()
    assert parse_graph(emit_graph(g)) == g
