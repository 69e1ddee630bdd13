"""Point readers, the graph file format, SVG rendering and stats files."""
from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

from .construct import ANCHOR_KINDS, EdgeKind, SpannerEdge, SpannerGraph
from .errors import DuplicatePoint, ParseError, SchemaMismatch
from .geometry import Point, make_points

COLORS = ("red", "green", "blue", "white")
GRAPH_KEYS = ("edges", "n", "rotation_applied")
EDGE_KEYS = ("color", "in_anchor_subgraph", "kind", "u", "v")


# --------------------------------------------------------------------------
# Points
# --------------------------------------------------------------------------

def _check_duplicates(coords: Sequence[tuple[float, float]]) -> None:
    seen: dict[tuple[float, float], int] = {}
    for i, xy in enumerate(coords):
        j = seen.setdefault(xy, i)
        if j != i:
            raise DuplicatePoint(f"points {j} and {i} are both at ({xy[0]!r}, {xy[1]!r})")


def _finite(value, where: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ParseError(f"{where}: expected a number, got {value!r}")
    x = float(value)
    if not math.isfinite(x):
        raise ParseError(f"{where}: coordinate {value!r} is not finite")
    return x


def parse_csv(text: str) -> list[tuple[float, float]]:
    """One ``x,y`` pair per line; a non-numeric first row is taken as a header."""
    coords = []
    for lineno, row in enumerate(csv.reader(text.splitlines()), start=1):
        if not row or all(not cell.strip() for cell in row):
            continue
        if len(row) != 2:
            raise ParseError(f"line {lineno}: expected 2 fields, got {len(row)}")
        try:
            x, y = float(row[0]), float(row[1])
        except ValueError:
            if lineno == 1:
                continue
            raise ParseError(f"line {lineno}: cannot parse {','.join(row)!r} as x,y") from None
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ParseError(f"line {lineno}: coordinates must be finite")
        coords.append((x, y))
    return coords


def parse_json_points(text: str) -> list[tuple[float, float]]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno} (byte {exc.pos}): {exc.msg}") from None
    if not isinstance(doc, dict) or not isinstance(doc.get("points"), list):
        raise ParseError('expected an object with a "points" array')
    coords = []
    for i, item in enumerate(doc["points"]):
        if not isinstance(item, list) or len(item) != 2:
            raise ParseError(f"points[{i}]: expected an [x, y] pair, got {item!r}")
        coords.append((_finite(item[0], f"points[{i}][0]"), _finite(item[1], f"points[{i}][1]")))
    return coords


def read_points(path, fmt: str | None = None) -> list[Point]:
    """Read a CSV or JSON point file; ids follow file order.

    ``fmt`` defaults to the file extension (``.json`` means JSON, anything
    else CSV).
    """
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    text = path.read_text()
    if fmt == "csv":
        coords = parse_csv(text)
    elif fmt == "json":
        coords = parse_json_points(text)
    else:
        raise ValueError(f"unknown point format {fmt!r}")
    _check_duplicates(coords)
    return make_points(coords)


def write_points(path, points: Iterable[Point], fmt: str | None = None) -> None:
    """CSV with a header, or JSON for a ``.json`` path; round-trip precision."""
    path = Path(path)
    fmt = fmt or ("json" if path.suffix.lower() == ".json" else "csv")
    if fmt == "json":
        text = json.dumps({"points": [[p.x, p.y] for p in points]}) + "\n"
    else:
        text = "\n".join(["x,y"] + [f"{p.x!r},{p.y!r}" for p in points]) + "\n"
    path.write_text(text)


# --------------------------------------------------------------------------
# Graph files
# --------------------------------------------------------------------------

def format_float(x: float) -> str:
    """17 significant digits, enough to round-trip any double."""
    return f"{x:.17g}"


@dataclass
class GraphFile:
    n: int
    rotation_applied: float = 0.0
    edges: list[SpannerEdge] = field(default_factory=list)

    @classmethod
    def from_spanner(cls, s: SpannerGraph) -> "GraphFile":
        edges = [SpannerEdge(u, v, e.kind, e.source_color) for (u, v), e in s.edges.items()]
        return cls(s.n, s.rotation, sorted(edges, key=lambda e: (e.u, e.v)))

    def to_spanner(self, points: Sequence[Point]) -> SpannerGraph:
        """Attach the edges to points (already rotated by ``rotation_applied``)."""
        if len(points) != self.n:
            raise SchemaMismatch(f"graph has n={self.n} but the point set has {len(points)} points")
        s = SpannerGraph(points=list(points), rotation=self.rotation_applied)
        for e in self.edges:
            s.edges[e.key] = e
        return s

    def edge_set(self) -> set[tuple[int, int]]:
        return {e.key for e in self.edges}


def dumps_graph(graph: GraphFile) -> str:
    rows = []
    for e in sorted(graph.edges, key=lambda e: e.key):
        u, v = e.key
        item = {
            "color": e.source_color,
            "in_anchor_subgraph": e.kind in ANCHOR_KINDS,
            "kind": str(e.kind),
            "u": u,
            "v": v,
        }
        rows.append("  " + json.dumps(item, sort_keys=True))
    body = "[\n" + ",\n".join(rows) + "\n ]" if rows else "[]"
    return (
        "{\n"
        f' "edges": {body},\n'
        f' "n": {graph.n},\n'
        f' "rotation_applied": {format_float(graph.rotation_applied)}\n'
        "}\n"
    )


def write_graph(path, graph: GraphFile | SpannerGraph) -> None:
    if isinstance(graph, SpannerGraph):
        graph = GraphFile.from_spanner(graph)
    Path(path).write_text(dumps_graph(graph))


def _schema(cond: bool, msg: str) -> None:
    if not cond:
        raise SchemaMismatch(msg)


def _is_int(x) -> bool:
    return isinstance(x, int) and not isinstance(x, bool)


def loads_graph(text: str) -> GraphFile:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno} column {exc.colno} (byte {exc.pos}): {exc.msg}") from None
    _schema(isinstance(doc, dict), "graph file must be a JSON object")
    _schema(sorted(doc) == list(GRAPH_KEYS), f"graph keys must be {list(GRAPH_KEYS)}, got {sorted(doc)}")
    n, rot, items = doc["n"], doc["rotation_applied"], doc["edges"]
    _schema(_is_int(n) and n >= 0, f"n must be a non-negative integer, got {n!r}")
    _schema(
        isinstance(rot, (int, float)) and not isinstance(rot, bool) and math.isfinite(rot),
        f"rotation_applied must be a finite number, got {rot!r}",
    )
    _schema(isinstance(items, list), "edges must be an array")
    kinds = {k.value: k for k in EdgeKind}
    edges, seen = [], set()
    for i, item in enumerate(items):
        where = f"edges[{i}]"
        _schema(isinstance(item, dict) and sorted(item) == list(EDGE_KEYS),
                f"{where}: keys must be {list(EDGE_KEYS)}")
        u, v = item["u"], item["v"]
        _schema(_is_int(u) and _is_int(v), f"{where}: u and v must be integers")
        _schema(0 <= u < v < n, f"{where}: need 0 <= u < v < n, got u={u}, v={v}, n={n}")
        _schema((u, v) not in seen, f"{where}: duplicate edge ({u}, {v})")
        _schema(item["kind"] in kinds, f"{where}: unknown kind {item['kind']!r}")
        _schema(item["color"] in COLORS, f"{where}: unknown color {item['color']!r}")
        kind = kinds[item["kind"]]
        _schema(item["in_anchor_subgraph"] is (kind in ANCHOR_KINDS),
                f"{where}: in_anchor_subgraph disagrees with kind {kind.value}")
        seen.add((u, v))
        edges.append(SpannerEdge(u, v, kind, item["color"]))
    return GraphFile(n, float(rot), edges)


def read_graph(path) -> GraphFile:
    return loads_graph(Path(path).read_text())


# --------------------------------------------------------------------------
# SVG
# --------------------------------------------------------------------------

SVG_COLORS = {"red": "#c0392b", "green": "#27ae60", "blue": "#2c6fbb", "white": "#444444"}
# (relative stroke width, dash pattern) per edge kind
SVG_STROKE = {
    EdgeKind.BLUE_ANCHOR: (2.0, None),
    EdgeKind.WHITE_ANCHOR: (2.0, None),
    EdgeKind.CANONICAL_BLUE_CONE: (1.0, None),
    EdgeKind.CANONICAL_WHITE_CONE: (1.0, None),
    EdgeKind.SHORTCUT_BLUE_CONE: (1.0, "4 3"),
    EdgeKind.SHORTCUT_WHITE_CONE: (1.0, "4 3"),
}


def _num(x: float) -> str:
    return f"{x:.10g}"


def svg_text(points: Sequence[Point], edges: Iterable[SpannerEdge]) -> str:
    """Deterministic SVG; y is flipped so the picture has the usual orientation."""
    head = '<svg xmlns="http://www.w3.org/2000/svg" version="1.1"'
    if not points:
        return head + ' viewBox="0 0 1 1">\n</svg>\n'
    xs = [p.x for p in points]
    ys = [-p.y for p in points]
    x0, x1, y0, y1 = min(xs), max(xs), min(ys), max(ys)
    span = max(x1 - x0, y1 - y0) or 1.0
    mx = 0.05 * (x1 - x0 or span)
    my = 0.05 * (y1 - y0 or span)
    unit = 0.001 * span
    box = " ".join(_num(v) for v in (x0 - mx, y0 - my, x1 - x0 + 2 * mx, y1 - y0 + 2 * my))
    out = [head + f' viewBox="{box}">']
    out.append(f'<g fill="none" stroke-linecap="round">')
    for e in sorted(edges, key=lambda e: e.key):
        width, dash = SVG_STROKE[EdgeKind(e.kind)]
        a, b = points[e.u], points[e.v]
        attrs = (
            f'x1="{_num(a.x)}" y1="{_num(-a.y)}" x2="{_num(b.x)}" y2="{_num(-b.y)}" '
            f'stroke="{SVG_COLORS.get(e.source_color, "#000000")}" stroke-width="{_num(width * unit)}"'
        )
        if dash:
            attrs += f' stroke-dasharray="{" ".join(_num(float(d) * unit) for d in dash.split())}"'
        out.append(f'<line class="{EdgeKind(e.kind).value}" {attrs}/>')
    out.append("</g>")
    out.append('<g fill="#000000">')
    r = _num(0.005 * span)
    for p in points:
        out.append(f'<circle cx="{_num(p.x)}" cy="{_num(-p.y)}" r="{r}"/>')
    out.append("</g>")
    out.append("</svg>")
    return "\n".join(out) + "\n"


def render_svg(points: Sequence[Point], graph: GraphFile | SpannerGraph, path) -> None:
    edges = graph.edges.values() if isinstance(graph, SpannerGraph) else graph.edges
    Path(path).write_text(svg_text(points, edges))


# --------------------------------------------------------------------------
# Stats
# --------------------------------------------------------------------------

def _stretch(res) -> dict | None:
    if res is None:
        return None
    return {
        "value": res.value,
        "witness": list(res.witness) if res.witness is not None else None,
        "sampled": res.sampled,
    }


def stats_dict(report, build_ms: float | None = None) -> dict:
    """Flatten a VerificationReport into the stats-file layout."""
    return {
        "n": report.n,
        "m": report.m,
        "max_degree": report.max_degree,
        "degree_limit": report.degree_limit,
        "degree_histogram": {str(k): v for k, v in sorted(report.degree_histogram.items())},
        "is_plane": report.is_plane,
        "stretch": _stretch(report.stretch),
        "tri_stretch": _stretch(report.tri_stretch),
        "td_stretch": _stretch(report.td_stretch),
        "bound_audit": report.bound_audit.summary() if report.bound_audit is not None else None,
        "charging_ok": report.charging_ok,
        "convex_position": report.convex_position,
        "failures": report.failures(),
        "build_ms": build_ms,
    }


def write_stats(path, stats: dict) -> None:
    Path(path).write_text(json.dumps(stats, indent=2, sort_keys=True) + "\n")
