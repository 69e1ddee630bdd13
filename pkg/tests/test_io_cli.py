import json
import math

import pytest
from hypothesis import given, settings

from tdspanner import io as tio
from tdspanner.cli import bench, main
from tdspanner.construct import EdgeKind, SpannerEdge, build_spanner
from tdspanner.errors import DuplicatePoint, ParseError, SchemaMismatch
from tdspanner.generators import GenSpec, generate
from tdspanner.verify import check_planarity

from conftest import THREE_POINTS, point_sets


def write(path, text):
    path.write_text(text)
    return path


# -- points ----------------------------------------------------------------

def test_csv_example(tmp_path):
    pts = tio.read_points(write(tmp_path / "p.csv", "0,0\n0,2\n2,0.5\n"))
    assert [(p.x, p.y) for p in pts] == THREE_POINTS
    assert [p.id for p in pts] == [0, 1, 2]


def test_csv_header_and_blank_lines(tmp_path):
    pts = tio.read_points(write(tmp_path / "p.csv", "x,y\n0,0\n\n1,2\n"))
    assert len(pts) == 2


def test_csv_errors_carry_line(tmp_path):
    with pytest.raises(ParseError, match="line 3"):
        tio.read_points(write(tmp_path / "p.csv", "0,0\n1,1\nfoo,2\n"))
    with pytest.raises(ParseError, match="line 1"):
        tio.read_points(write(tmp_path / "p.csv", "0,0,0\n"))
    with pytest.raises(ParseError):
        tio.read_points(write(tmp_path / "p.csv", "0,nan\n"))


def test_json_points(tmp_path):
    assert tio.read_points(write(tmp_path / "p.json", '{"points": []}')) == []
    pts = tio.read_points(write(tmp_path / "q.json", '{"points": [[0, 0], [1.5, 2]]}'))
    assert (pts[1].x, pts[1].y) == (1.5, 2.0)
    with pytest.raises(ParseError, match="byte"):
        tio.read_points(write(tmp_path / "r.json", '{"points": [[0, 0],'))
    with pytest.raises(ParseError):
        tio.read_points(write(tmp_path / "s.json", '{"points": [[0, "a"]]}'))


def test_duplicate_points(tmp_path):
    with pytest.raises(DuplicatePoint):
        tio.read_points(write(tmp_path / "p.csv", "0,0\n0,0\n"))


@given(point_sets(min_size=0, max_size=30))
@settings(max_examples=30)
def test_points_roundtrip(tmp_path_factory, points):
    d = tmp_path_factory.mktemp("pts")
    for name in ("p.csv", "p.json"):
        tio.write_points(d / name, points)
        assert tio.read_points(d / name) == points


# -- graph files -----------------------------------------------------------

@given(point_sets(min_size=0, max_size=30))
@settings(max_examples=30)
def test_graph_roundtrip(points):
    s, _ = build_spanner(points)
    text = tio.dumps_graph(tio.GraphFile.from_spanner(s))
    back = tio.loads_graph(text)
    assert back.n == s.n and back.rotation_applied == s.rotation
    assert {e.key: (e.kind, e.source_color) for e in back.edges} == {
        k: (e.kind, e.source_color) for k, e in s.edges.items()
    }
    assert tio.dumps_graph(back) == text


def test_empty_graph_file():
    text = tio.dumps_graph(tio.GraphFile(0))
    assert json.loads(text) == {"n": 0, "rotation_applied": 0, "edges": []}
    assert tio.loads_graph(text).edges == []


def test_graph_file_layout(three_points):
    s, _ = build_spanner(three_points)
    doc = json.loads(tio.dumps_graph(tio.GraphFile.from_spanner(s)))
    assert list(doc) == ["edges", "n", "rotation_applied"]
    assert [(e["u"], e["v"]) for e in doc["edges"]] == [(0, 1), (0, 2)]
    assert doc["edges"][0] == {
        "color": doc["edges"][0]["color"], "in_anchor_subgraph": True,
        "kind": "white_anchor", "u": 0, "v": 1,
    }


def test_rotation_roundtrips_exactly():
    angle = math.pi / 7 + 1e-13
    g = tio.loads_graph(tio.dumps_graph(tio.GraphFile(2, angle)))
    assert g.rotation_applied == angle


def edge(u, v, kind="white_anchor", color="red", anchor=True):
    return {"color": color, "in_anchor_subgraph": anchor, "kind": kind, "u": u, "v": v}


@pytest.mark.parametrize(
    "doc",
    [
        {"n": 2, "rotation_applied": 0, "edges": [edge(1, 1)]},
        {"n": 2, "rotation_applied": 0, "edges": [edge(1, 0)]},
        {"n": 2, "rotation_applied": 0, "edges": [edge(0, 2)]},
        {"n": 2, "rotation_applied": 0, "edges": [edge(0, 1), edge(0, 1)]},
        {"n": 2, "rotation_applied": 0, "edges": [edge(0, 1, kind="diagonal")]},
        {"n": 2, "rotation_applied": 0, "edges": [edge(0, 1, color="purple")]},
        {"n": 2, "rotation_applied": 0, "edges": [edge(0, 1, anchor=False)]},
        {"n": 2, "rotation_applied": 0},
        {"n": -1, "rotation_applied": 0, "edges": []},
        {"n": 2, "rotation_applied": "x", "edges": []},
        [],
    ],
)
def test_schema_mismatch(doc):
    with pytest.raises(SchemaMismatch):
        tio.loads_graph(json.dumps(doc))


def test_graph_parse_error():
    with pytest.raises(ParseError):
        tio.loads_graph("{")


def test_graph_n_must_match_points(three_points):
    with pytest.raises(SchemaMismatch):
        tio.GraphFile(4).to_spanner(three_points)


# -- SVG -------------------------------------------------------------------

def test_svg_three_points(three_points):
    s, _ = build_spanner(three_points)
    text = tio.svg_text(s.points, s.edges.values())
    assert text.count("<circle") == 3 and text.count("<line") == 2
    assert text.startswith("<svg") and text.rstrip().endswith("</svg>")
    assert text == tio.svg_text(s.points, list(s.edges.values())[::-1])


def test_svg_empty():
    text = tio.svg_text([], [])
    assert "<circle" not in text and "<line" not in text and 'viewBox="0 0 1 1"' in text


def test_svg_styles():
    pts = generate(GenSpec("uniform", n=4, seed=0))
    edges = [
        SpannerEdge(0, 1, EdgeKind.SHORTCUT_WHITE_CONE, "white"),
        SpannerEdge(2, 3, EdgeKind.BLUE_ANCHOR, "blue"),
    ]
    text = tio.svg_text(pts, edges)
    assert "stroke-dasharray" in text and tio.SVG_COLORS["white"] in text


# -- CLI -------------------------------------------------------------------

def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def built(tmp_path):
    pts, graph = tmp_path / "p.csv", tmp_path / "g.json"
    assert run("gen", "--kind", "uniform", "--n", 100, "--seed", 7, "--out", pts) == 0
    assert run("build", "--input", pts, "--output", graph) == 0
    return pts, graph


def test_cli_end_to_end(built, tmp_path):
    pts, graph = built
    stats = tmp_path / "s.json"
    rc = run("verify", "--points", pts, "--graph", graph, "--bounds", "--charging", "--structure",
             "--stats", stats)
    assert rc == 0
    doc = json.loads(stats.read_text())
    assert doc["is_plane"] and doc["max_degree"] <= 4 and doc["charging_ok"]
    assert doc["stretch"]["value"] <= 20 and doc["bound_audit"]["violations"] == 0
    assert doc["matches_construction"] and doc["failures"] == []
    svg = tmp_path / "g.svg"
    assert run("render", "--points", pts, "--graph", graph, "--out", svg) == 0
    assert svg.read_text().count("<circle") == 100


def test_cli_stats_are_reproducible(built, tmp_path):
    pts, graph = built
    outs = []
    for name in ("a.json", "b.json"):
        run("verify", "--points", pts, "--graph", graph, "--no-timing", "--stats", tmp_path / name)
        outs.append((tmp_path / name).read_bytes())
    assert outs[0] == outs[1]


def test_cli_td_baseline(built, tmp_path, capsys):
    pts, graph = built
    assert run("verify", "--points", pts, "--graph", graph, "--baseline", "td") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["baseline"] == "td" and doc["stretch"]["value"] <= doc["tri_stretch"]["value"] * 2 + 1e-9


def test_cli_detects_crossing_edge(built, capsys):
    pts, graph = built
    points = tio.read_points(pts)
    g = tio.read_graph(graph)
    s = g.to_spanner(points)
    edges = s.edge_list()
    for a in range(len(points)):
        for b in range(a + 1, len(points)):
            if (a, b) in s:
                continue
            if not check_planarity(points, edges + [(a, b)]).is_plane:
                g.edges.append(SpannerEdge(a, b, EdgeKind.CANONICAL_WHITE_CONE, "red"))
                tio.write_graph(graph, g)
                capsys.readouterr()
                assert run("verify", "--points", pts, "--graph", graph) == 2
                assert "planarity" in capsys.readouterr().err
                return
    pytest.fail("every candidate edge kept the drawing plane")


def test_cli_grid_records_rotation(tmp_path, capsys):
    pts, graph = tmp_path / "grid.csv", tmp_path / "g.json"
    assert run("gen", "--kind", "grid", "--rows", 3, "--cols", 3, "--out", pts) == 0
    assert run("build", "--input", pts, "--output", graph) == 0
    assert tio.read_graph(graph).rotation_applied != 0
    assert run("verify", "--points", pts, "--graph", graph, "--no-timing") == 0
    doc = json.loads(capsys.readouterr().out)
    assert doc["rotation_applied"] != 0 and doc["is_plane"]


def test_cli_naive_gives_identical_bytes(built, tmp_path):
    pts, graph = built
    other = tmp_path / "naive.json"
    assert run("build", "--input", pts, "--output", other, "--naive") == 0
    assert other.read_bytes() == graph.read_bytes()


def test_cli_explicit_rotation(built, tmp_path):
    pts, _ = built
    out = tmp_path / "r.json"
    assert run("build", "--input", pts, "--output", out, "--rotate", "0.25") == 0
    assert tio.read_graph(out).rotation_applied == 0.25
    assert run("verify", "--points", pts, "--graph", out, "--stats", tmp_path / "s.json") == 0


def test_cli_usage_and_io_errors(tmp_path, capsys):
    assert run("build", "--input", tmp_path / "missing.csv", "--output", tmp_path / "g.json") == 1
    assert run("frobnicate") == 1
    assert run("gen", "--kind", "lower_bound_rect", "--out", tmp_path / "x.csv") == 1
    assert run("build", "--input", "a", "--output", "b", "--rotate", "inf") == 1
    dup = write(tmp_path / "d.csv", "0,0\n0,0\n")
    assert run("build", "--input", dup, "--output", tmp_path / "g.json") == 1
    assert "error:" in capsys.readouterr().err
    assert run("--help") == 0


def test_cli_verify_size_mismatch(built, tmp_path):
    _, graph = built
    other = tmp_path / "o.csv"
    run("gen", "--kind", "uniform", "--n", 10, "--out", other)
    assert run("verify", "--points", other, "--graph", graph) == 1


def test_bench_rows(capsys):
    rows = bench([200, 400], runs=1)
    assert [r["n"] for r in rows] == [200, 400] and "ratio_to_prev" in rows[1]
    assert run("bench", "--sizes", "100,200", "--runs", 1, "--json") == 0
    assert len(json.loads(capsys.readouterr().out)) == 2
