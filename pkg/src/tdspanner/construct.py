"""The six-step degree-4 spanner construction on top of the TD-Delaunay graph.

Blue cones (positive cone 3, negative cone 0) and blue edges are favoured;
the other four cones and the red and green edges are called *white*.

1. every blue anchor goes into the anchor subgraph A;
2. white anchors are scanned by increasing triangular length and kept if no
   adjacent white anchor is already in A;
3. white canonical edges in blue cones are added;
4. pairs of step-3 edges entering the same point are replaced by a shortcut;
5. white canonical edges in white cones on the white side of their own
   anchor are added when that anchor is not in A;
6. the white side of every white anchor's fan is walked and blue dips of the
   canonical path are bridged with shortcuts.

Steps 1 and 3-5 are vectorised over the fan arrays of the triangulation;
steps 2 and 6 are sequential by nature.
"""

from __future__ import annotations

import enum
import logging
from dataclasses import dataclass, field
from itertools import repeat
from typing import NamedTuple, Sequence

import numpy as np

from . import geometry as geo
from .delaunay import TdGraph, build_td
from .errors import BrokenTriangulation, ChargeCollision, ChargeMismatch
from .geometry import CONE_COLOR, IS_POSITIVE, Point

log = logging.getLogger(__name__)

WHITE = "white"
BLUE_POSITIVE = 3


class EdgeKind(str, enum.Enum):
    BLUE_ANCHOR = "blue_anchor"
    WHITE_ANCHOR = "white_anchor"
    CANONICAL_BLUE_CONE = "canonical_blue_cone"
    SHORTCUT_BLUE_CONE = "shortcut_blue_cone"
    CANONICAL_WHITE_CONE = "canonical_white_cone"
    SHORTCUT_WHITE_CONE = "shortcut_white_cone"

    def __str__(self) -> str:
        return self.value


ANCHOR_KINDS = frozenset({EdgeKind.BLUE_ANCHOR, EdgeKind.WHITE_ANCHOR})
SHORTCUT_KINDS = frozenset({EdgeKind.SHORTCUT_BLUE_CONE, EdgeKind.SHORTCUT_WHITE_CONE})


class SpannerEdge(NamedTuple):
    """An undirected spanner edge; ``u -> v`` records the orientation it was built with."""

    u: int
    v: int
    kind: EdgeKind
    source_color: str

    @property
    def in_anchor_subgraph(self) -> bool:
        return self.kind in ANCHOR_KINDS

    @property
    def key(self) -> tuple[int, int]:
        return (self.u, self.v) if self.u < self.v else (self.v, self.u)


def _key(a: int, b: int) -> tuple[int, int]:
    return (a, b) if a < b else (b, a)


@dataclass
class SpannerGraph:
    points: list[Point]
    edges: dict[tuple[int, int], SpannerEdge] = field(default_factory=dict)
    # Ordered step records: (step, action, detail...).
    log: list[tuple] = field(default_factory=list)
    rotation: float = 0.0
    # Step-4 records (w, p, q, r); step-6 records (w, v, p_i, p_j, p_{j-1}, u)
    # with v the anchor tail and u the white-side boundary tail.
    blue_shortcuts: list[tuple[int, int, int, int]] = field(default_factory=list)
    white_shortcuts: list[tuple[int, int, int, int, int, int]] = field(default_factory=list)

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __contains__(self, pair) -> bool:
        return _key(*pair) in self.edges

    def get(self, a: int, b: int) -> SpannerEdge | None:
        return self.edges.get(_key(a, b))

    def add(self, u: int, v: int, kind: EdgeKind, color: str, step: int) -> bool:
        """Insert one edge; an existing edge keeps its kind and the merge is logged."""
        key = _key(u, v)
        old = self.edges.get(key)
        if old is not None:
            self.log.append((step, "merge", key, str(old.kind), str(kind)))
            return False
        self.edges[key] = SpannerEdge(u, v, kind, color)
        return True

    def add_many(self, us, vs, kind: EdgeKind, colors, step: int) -> int:
        """Insert a batch of edges of one kind; same merge rule as ``add``."""
        keys = [(u, v) if u < v else (v, u) for u, v in zip(us, vs)]
        batch = dict(zip(keys, map(SpannerEdge, us, vs, repeat(kind), colors)))
        if len(batch) == len(keys) and self.edges.keys().isdisjoint(batch):
            self.edges.update(batch)
            added = len(batch)
        else:
            added = sum(self.add(u, v, kind, c, step) for u, v, c in zip(us, vs, colors))
        self.log.append((step, "added", str(kind), added))
        return added

    def remove(self, a: int, b: int, step: int) -> None:
        key = _key(a, b)
        e = self.edges.pop(key)
        self.log.append((step, "remove", key, str(e.kind)))

    def anchor_edges(self) -> list[SpannerEdge]:
        return [e for e in self.edges.values() if e.in_anchor_subgraph]

    def edge_list(self) -> list[tuple[int, int]]:
        return sorted(self.edges)

    def edge_array(self) -> np.ndarray:
        if not self.edges:
            return np.empty((0, 2), dtype=np.int64)
        return np.array(sorted(self.edges), dtype=np.int64)

    def degrees(self) -> np.ndarray:
        e = self.edge_array()
        return np.bincount(e.ravel(), minlength=self.n)


def _anchor_mask(g: TdGraph, s: SpannerGraph) -> np.ndarray:
    """Boolean mask over D edges: is the edge in the anchor subgraph of s."""
    mask = np.zeros(g.m, dtype=bool)
    blue, white = EdgeKind.BLUE_ANCHOR, EdgeKind.WHITE_ANCHOR
    pairs = [(e.u, e.v) for e in s.edges.values() if e.kind is blue or e.kind is white]
    if pairs:
        a, b = np.array(pairs).T
        mask[g.lookup(a, b)] = True
    return mask


def _colors(g: TdGraph, eids) -> list[str]:
    return [CONE_COLOR[k].value for k in g.cone[eids].tolist()]


# --------------------------------------------------------------------------
# Steps 1-2
# --------------------------------------------------------------------------

def build_anchor_subgraph(g: TdGraph) -> SpannerGraph:
    """Steps 1 and 2: all blue anchors, then a greedy set of white anchors."""
    s = SpannerGraph(points=g.points)
    anchors = g.anchor.reshape(-1, 6)
    blue = anchors[:, 0]
    blue = blue[blue >= 0]
    s.add_many(g.tail[blue].tolist(), g.head[blue].tolist(), EdgeKind.BLUE_ANCHOR,
               _colors(g, blue), 1)

    white = anchors[:, [2, 4]].ravel()
    white = white[white >= 0]
    xs = np.array([p.x for p in g.points])
    ys = np.array([p.y for p in g.points])
    tails, heads = g.tail[white], g.head[white]
    dist = geo.tri_dist_pairs(xs[tails], ys[tails], xs[heads], ys[heads])
    white = white[np.lexsort((heads, tails, dist))]

    # Bit k of occupied[p]: a white anchor already in A lies in cone k at p.
    occupied = [0] * g.n
    adjacent = [(1 << ((k + 1) % 6)) | (1 << ((k + 5) % 6)) for k in range(6)]
    kept, skipped = [], 0
    for eid, tail, head, kt in zip(white.tolist(), g.tail[white].tolist(),
                                   g.head[white].tolist(), g.cone[white].tolist()):
        kh = (kt + 3) % 6
        if adjacent[kt] & occupied[tail] or adjacent[kh] & occupied[head]:
            skipped += 1
            continue
        occupied[tail] |= 1 << kt
        occupied[head] |= 1 << kh
        kept.append(eid)
    s.add_many(g.tail[kept].tolist(), g.head[kept].tolist(), EdgeKind.WHITE_ANCHOR,
               _colors(g, kept), 2)
    s.log.append((2, "skipped", str(EdgeKind.WHITE_ANCHOR), skipped))
    return s


# --------------------------------------------------------------------------
# Canonical edges, vectorised
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class CanonicalEdges:
    """One row per pair of consecutive fan tails (s, t), in fan order."""

    pos: np.ndarray  # index i into g.fan_edges; the pair is tails at i and i + 1
    cone: np.ndarray  # negative cone of the fan
    w: np.ndarray
    s: np.ndarray
    t: np.ndarray
    eid: np.ndarray  # the D edge joining s and t


def canonical_edge_table(g: TdGraph) -> CanonicalEdges:
    fe = g.fan_edges
    if len(fe) < 2:
        empty = np.empty(0, dtype=np.int64)
        return CanonicalEdges(empty, empty, empty, empty, empty, empty)
    grp = g.group[fe]
    pos = np.flatnonzero(grp[1:] == grp[:-1])
    s = g.tail[fe[pos]]
    t = g.tail[fe[pos + 1]]
    fwd, bwd = g.lookup(s, t), g.lookup(t, s)
    eid = np.where(fwd >= 0, fwd, bwd)
    if (eid < 0).any():
        i = int(np.flatnonzero(eid < 0)[0])
        raise BrokenTriangulation(f"canonical-path points {int(s[i])} and {int(t[i])} are not adjacent")
    return CanonicalEdges(pos, grp[pos] % 6, grp[pos] // 6, s, t, eid)


def white_side_mask(g: TdGraph, eids: np.ndarray) -> np.ndarray:
    """For edges of white fans: True where the edge is on the white side of its anchor.

    In the red negative cone (4) the white side is counterclockwise of the
    anchor, in the green one (2) clockwise of it.  An anchor is on neither side.
    """
    eids = np.asarray(eids, dtype=np.int64)
    pe = g.fan_pos[eids]
    pa = g.fan_pos[g.fan_of[eids]]
    k = g.neg_cone[eids]
    return np.where(k == 4, pe > pa, np.where(k == 2, pe < pa, False))


def white_side(g: TdGraph, eid: int) -> str | None:
    """'white', 'blue', or None (the edge is its own anchor) for a white fan edge."""
    if g.is_anchor(eid):
        return None
    if g.neg_cone[eid] == 0:
        raise ValueError(f"edge {eid} is in a blue fan")
    return WHITE if bool(white_side_mask(g, [eid])[0]) else "blue"


def white_side_boundary(g: TdGraph, w: int, k: int) -> int:
    """Edge id of the white-side boundary edge of the fan (w, k)."""
    fan = g.fan(w, k)
    return fan[-1] if k == 4 else fan[0]


# --------------------------------------------------------------------------
# Steps 3-4
# --------------------------------------------------------------------------

def reconstruct_blue_cones(
    g: TdGraph, s: SpannerGraph, ce: CanonicalEdges | None = None
) -> SpannerGraph:
    """Steps 3 and 4."""
    ce = canonical_edge_table(g) if ce is None else ce
    in_a = _anchor_mask(g, s)
    sel = (ce.cone == 0) & ~in_a[ce.eid]
    eids = ce.eid[sel]
    s.add_many(g.tail[eids].tolist(), g.head[eids].tolist(), EdgeKind.CANONICAL_BLUE_CONE,
               _colors(g, eids), 3)

    # Consecutive step-3 edges p-q, q-r of one path, both directed into q.
    pos = ce.pos[sel]
    q = ce.t[sel]
    heads = g.head[eids]
    pair = np.flatnonzero((pos[1:] == pos[:-1] + 1) & (heads[:-1] == q[:-1]) & (heads[1:] == q[:-1]))
    for p, qq, r, w in zip(ce.s[sel][pair].tolist(), q[pair].tolist(),
                           ce.t[sel][pair + 1].tolist(), ce.w[sel][pair].tolist()):
        if (p, qq) not in s or (qq, r) not in s:
            continue
        s.remove(p, qq, 4)
        s.remove(qq, r, 4)
        s.add(p, r, EdgeKind.SHORTCUT_BLUE_CONE, WHITE, 4)
        s.blue_shortcuts.append((w, p, qq, r))
    return s


# --------------------------------------------------------------------------
# Steps 5-6
# --------------------------------------------------------------------------

def _visible(pts, w: int, chain: list[int], i: int, j: int) -> bool:
    """Does segment chain[i]-chain[j] see across the fan of w?

    The segment must meet the canonical path chain[i..j] only at its two
    endpoints and must cross every intermediate spoke (chain[m], w), i.e.
    stay on the apex side of the path.
    """
    seg = (pts[chain[i]], pts[chain[j]])
    apex = pts[w]
    for m in range(i + 1, j):
        if not geo.segments_properly_cross(seg, (pts[chain[m]], apex)):
            return False
    for m in range(i, j):
        if geo.segments_conflict(seg, (pts[chain[m]], pts[chain[m + 1]])):
            return False
    return True


def _walk_white_side(g: TdGraph, s: SpannerGraph, w: int, k: int, in_a: np.ndarray) -> None:
    """Step 6 for one white anchor: bridge the blue dips between boundary and anchor."""
    pts = g.points
    tails = g.canonical_path(w, k)
    anchor = int(g.anchor[w * 6 + k])
    apos = int(g.fan_pos[anchor])
    chain = tails[apos:][::-1] if k == 4 else tails[: apos + 1]
    edge_id = g.edge_id
    last = len(chain) - 1
    v = chain[-1]
    i = 0
    while i < last:
        p, q = chain[i], chain[i + 1]
        back = edge_id.get((q, p))
        if back is not None:
            if g.cone[back] == BLUE_POSITIVE:
                raise BrokenTriangulation(f"backward canonical edge {q}->{p} is blue")
            i += 1
            continue
        if g.cone[edge_id[(p, q)]] != BLUE_POSITIVE:
            raise BrokenTriangulation(f"forward canonical edge {p}->{q} is not blue")
        j = next((j for j in range(last, i + 1, -1) if _visible(pts, w, chain, i, j)), None)
        if j is None:
            raise BrokenTriangulation(f"no shortcut target from {p} in the fan of ({w}, {k})")
        pj, pjm = chain[j], chain[j - 1]
        prev = edge_id.get((pj, pjm))
        if prev is None:
            raise BrokenTriangulation(f"canonical edge into shortcut end {pj} is not white")
        s.add(pj, p, EdgeKind.SHORTCUT_WHITE_CONE, WHITE, 6)
        s.white_shortcuts.append((w, v, p, pj, pjm, chain[0]))
        if (pj, pjm) in s and not in_a[prev]:
            s.remove(pj, pjm, 6)
        i = j


def reconstruct_white_cones(
    g: TdGraph, s: SpannerGraph, ce: CanonicalEdges | None = None
) -> SpannerGraph:
    """Steps 5 and 6."""
    ce = canonical_edge_table(g) if ce is None else ce
    in_a = _anchor_mask(g, s)

    # Step 5: white canonical edges of white fans on the white side of their
    # own anchor, sides taken closed: a canonical edge that is itself a white
    # anchor left out of A is added too.
    cand = ce.eid[(ce.cone != 0) & (g.cone[ce.eid] != BLUE_POSITIVE)]
    cand = np.unique(cand)
    own = g.fan_of[cand] == cand
    cand = cand[(white_side_mask(g, cand) | own) & ~in_a[g.fan_of[cand]]]
    s.add_many(g.tail[cand].tolist(), g.head[cand].tolist(), EdgeKind.CANONICAL_WHITE_CONE,
               _colors(g, cand), 5)

    # Step 6: only fans whose anchor is not already the white-side boundary.
    groups = np.flatnonzero(np.diff(g.fan_start))
    groups = groups[groups % 6 != 0]
    anchor = g.anchor[groups]
    size = g.fan_start[groups + 1] - g.fan_start[groups]
    apos = g.fan_pos[anchor]
    boundary_pos = np.where(groups % 6 == 4, size - 1, 0)
    for grp in groups[apos != boundary_pos].tolist():
        _walk_white_side(g, s, grp // 6, grp % 6, in_a)
    return s


def build_spanner_from_td(g: TdGraph, rotation: float = 0.0) -> SpannerGraph:
    ce = canonical_edge_table(g)
    s = build_anchor_subgraph(g)
    s = reconstruct_blue_cones(g, s, ce)
    s = reconstruct_white_cones(g, s, ce)
    s.rotation = rotation
    return s


def build_spanner(points: Sequence[Point], naive: bool = False) -> tuple[SpannerGraph, TdGraph]:
    """Full pipeline: general position, triangulation, fans, steps 1-6.

    Returns the spanner and the triangulation it was built from, both on the
    rotated coordinates (``spanner.rotation`` records the angle).
    """
    rotated, angle = geo.ensure_general_position(points)
    if angle:
        log.info("rotated input by %.17g rad for general position", angle)
    g = build_td(rotated, naive=naive)
    return build_spanner_from_td(g, angle), g


# --------------------------------------------------------------------------
# Charging
# --------------------------------------------------------------------------

LB, RB, UW, LW = "LB", "RB", "UW", "LW"
SECTOR_OF_CONE = {0: RB, 1: UW, 2: UW, 3: LB, 4: LW, 5: LW}


def orient_edge(pts: Sequence[Point], a: int, b: int) -> tuple[int, int]:
    """(x, y) with y in a positive cone of x."""
    k = geo.cone_index(pts[a].x, pts[a].y, pts[b].x, pts[b].y)
    return (a, b) if IS_POSITIVE[k] else (b, a)


def _sector(pts, p: int, other: int) -> str:
    return SECTOR_OF_CONE[geo.cone_index(pts[p].x, pts[p].y, pts[other].x, pts[other].y)]


def _containing_white(pts, p: int, other: int, key) -> str:
    sector = _sector(pts, p, other)
    if sector not in (UW, LW):
        raise ChargeMismatch(f"edge {key} lies in blue sector {sector} of point {p}")
    return sector


def _require(pts, p: int, other: int, sector: str, key) -> str:
    found = _sector(pts, p, other)
    if found != sector:
        raise ChargeMismatch(f"edge {key} at {p} is in {found}, expected {sector}")
    return sector


def edge_charges(pts: Sequence[Point], e: SpannerEdge) -> tuple[tuple[int, str], tuple[int, str]]:
    """The sector charged at each endpoint of one edge, as ((x, sector), (y, sector)).

    Blue anchors use LB at x and RB at y; white anchors and blue-cone
    shortcuts use the white sector containing them at both ends; blue-cone
    canonical edges use their white sector at x and LB at y; white-cone
    canonical edges and shortcuts use RB at x and their white sector at y.
    """
    x, y = orient_edge(pts, e.u, e.v)
    kind, key = e.kind, e.key
    if kind is EdgeKind.BLUE_ANCHOR:
        return (x, _require(pts, x, y, LB, key)), (y, _require(pts, y, x, RB, key))
    if kind in (EdgeKind.WHITE_ANCHOR, EdgeKind.SHORTCUT_BLUE_CONE):
        return (x, _containing_white(pts, x, y, key)), (y, _containing_white(pts, y, x, key))
    if kind is EdgeKind.CANONICAL_BLUE_CONE:
        return (x, _containing_white(pts, x, y, key)), (y, LB)
    return (x, RB), (y, _containing_white(pts, y, x, key))


def charge_edges(s: SpannerGraph) -> dict[tuple[tuple[int, int], int], str]:
    """Charge every edge to one sector at each endpoint; no sector twice.

    Returns {(edge key, endpoint): sector}.
    """
    owner: dict[tuple[int, str], tuple[int, int]] = {}
    result = {}
    for key in sorted(s.edges):
        for p, sector in edge_charges(s.points, s.edges[key]):
            prev = owner.get((p, sector))
            if prev is not None:
                raise ChargeCollision(p, sector, prev, key)
            owner[(p, sector)] = key
            result[(key, p)] = sector
    return result
