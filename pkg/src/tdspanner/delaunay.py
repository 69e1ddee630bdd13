"""The TD-Delaunay triangulation (half-theta-6 graph) and its fan structure.

Every point links, in each of its three positive cones, to the cone member
nearest in triangular distance.  Edges are directed away from the point that
selected them and coloured by that positive cone.  Incoming edges of one
negative cone form a *fan*; its triangular-distance-shortest member is the
*anchor*, and the tails of the fan in counterclockwise order form the
*canonical path* of the cone.

Edges are stored as parallel numpy arrays; fans are stored CSR style, indexed
by ``group = head * 6 + negative cone``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import cached_property
from typing import NamedTuple, Sequence

import numpy as np

from . import geometry as geo
from ._accel import try_njit
from .errors import BrokenTriangulation, NonTermination, NotOnPath
from .geometry import CONE_COLOR, IS_POSITIVE, POSITIVE_CONE, Color, Point

POSITIVE_INDICES = (1, 3, 5)
NEGATIVE_INDICES = (0, 2, 4)


class DirectedEdge(NamedTuple):
    tail: int
    head: int
    color: Color


@dataclass(frozen=True, eq=False)
class TdGraph:
    points: list[Point]
    tail: np.ndarray
    head: np.ndarray
    # Positive cone index (1, 3 or 5) of each edge at its tail.
    cone: np.ndarray
    # out[p, k] is the edge id leaving p in positive cone k, or -1.
    out: np.ndarray
    # Filled by compute_anchors_and_fans.
    fan_edges: np.ndarray | None = None
    fan_start: np.ndarray | None = None
    anchor: np.ndarray | None = None
    fan_of: np.ndarray | None = None
    fan_pos: np.ndarray | None = None

    @property
    def n(self) -> int:
        return len(self.points)

    @property
    def m(self) -> int:
        return len(self.tail)

    @property
    def has_fans(self) -> bool:
        return self.fan_start is not None

    @property
    def neg_cone(self) -> np.ndarray:
        return (self.cone + 3) % 6

    @property
    def group(self) -> np.ndarray:
        return self.head * 6 + self.neg_cone

    @cached_property
    def edges(self) -> list[DirectedEdge]:
        return [
            DirectedEdge(t, h, CONE_COLOR[k])
            for t, h, k in zip(self.tail.tolist(), self.head.tolist(), self.cone.tolist())
        ]

    def edge_set(self) -> set[DirectedEdge]:
        return set(self.edges)

    @cached_property
    def edge_id(self) -> dict[tuple[int, int], int]:
        return dict(zip(zip(self.tail.tolist(), self.head.tolist()), range(self.m)))

    def lookup(self, a, b) -> np.ndarray:
        """Edge ids of the directed edges a -> b (vectorised), -1 where absent."""
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        if self.m == 0:
            return np.full(a.shape, -1, dtype=np.int64)
        cand = self.out[a][..., list(POSITIVE_INDICES)]
        hit = (cand >= 0) & (self.head[cand] == b[..., None])
        first = np.take_along_axis(cand, hit.argmax(axis=-1)[..., None], axis=-1)[..., 0]
        return np.where(hit.any(axis=-1), first, -1)

    def has_edge(self, a: int, b: int) -> bool:
        """Undirected adjacency."""
        return (a, b) in self.edge_id or (b, a) in self.edge_id

    def directed(self, a: int, b: int) -> DirectedEdge:
        """The edge between a and b with its stored orientation."""
        eid = self.edge_id.get((a, b))
        if eid is None:
            eid = self.edge_id.get((b, a))
        if eid is None:
            raise KeyError((a, b))
        return self.edges[eid]

    def color(self, eid: int) -> Color:
        return CONE_COLOR[int(self.cone[eid])]

    def fan_key(self, eid: int) -> tuple[int, int]:
        return int(self.head[eid]), (int(self.cone[eid]) + 3) % 6

    def is_anchor(self, eid: int) -> bool:
        return int(self.fan_of[eid]) == eid

    def fan(self, w: int, k: int) -> list[int]:
        """Edge ids entering w in negative cone k, counterclockwise."""
        g = w * 6 + k
        return self.fan_edges[self.fan_start[g] : self.fan_start[g + 1]].tolist()

    def canonical_path(self, w: int, k: int) -> list[int]:
        g = w * 6 + k
        return self.tail[self.fan_edges[self.fan_start[g] : self.fan_start[g + 1]]].tolist()

    def fan_keys(self) -> list[tuple[int, int]]:
        groups = np.flatnonzero(np.diff(self.fan_start))
        return [(int(g) // 6, int(g) % 6) for g in groups]

    @cached_property
    def fans(self) -> dict[tuple[int, int], list[int]]:
        return {key: self.fan(*key) for key in self.fan_keys()}

    @cached_property
    def anchors(self) -> dict[tuple[int, int], int]:
        return {key: int(self.anchor[key[0] * 6 + key[1]]) for key in self.fan_keys()}

    @cached_property
    def canonical(self) -> dict[tuple[int, int], list[int]]:
        return {key: self.canonical_path(*key) for key in self.fan_keys()}

    def undirected_pairs(self) -> list[tuple[int, int]]:
        lo = np.minimum(self.tail, self.head).tolist()
        hi = np.maximum(self.tail, self.head).tolist()
        return list(zip(lo, hi))


def _finish(points: list[Point], heads: np.ndarray) -> TdGraph:
    """Assemble a TdGraph from an (n, 6) table of positive-cone targets (-1 for none)."""
    n = len(points)
    cols = np.array(POSITIVE_INDICES)
    sub = heads[:, cols] if n else np.empty((0, 3), dtype=np.int64)
    rows, which = np.nonzero(sub >= 0)
    tail = rows.astype(np.int64)
    head = sub[rows, which].astype(np.int64)
    cone = cols[which].astype(np.int64)
    out = np.full((n, 6), -1, dtype=np.int64)
    out[tail, cone] = np.arange(len(tail))
    fwd = tail * n + head
    if np.intersect1d(fwd, head * n + tail).size:
        bad = int(np.intersect1d(fwd, head * n + tail)[0])
        raise BrokenTriangulation(f"segment {bad // n}-{bad % n} selected from both ends")
    return TdGraph(points=list(points), tail=tail, head=head, cone=cone, out=out)


def build_naive(points: Sequence[Point]) -> TdGraph:
    """Quadratic definition-level construction, used as the oracle."""
    points = list(points)
    n = len(points)
    heads = np.full((n, 6), -1, dtype=np.int64)
    for w in points:
        best = [math.inf] * 6
        for v in points:
            if v.id == w.id:
                continue
            k = geo.cone_index(w.x, w.y, v.x, v.y)
            if not IS_POSITIVE[k]:
                continue
            d = geo.tri_dist_xy(w.x, w.y, v.x, v.y)
            if d < best[k]:
                best[k] = d
                heads[w.id, k] = v.id
    return _finish(points, heads)


@try_njit(cache=True)
def _sweep_cone(a, b, order, rank, target):
    """Frontier sweep for one positive-cone family; fills target[w] with w's neighbour.

    The frontier is a max segment tree over a-ranks holding the ranks of
    points whose cone is still empty.  The points served by v are the
    frontier members just below v's rank whose b is smaller than v's.
    """
    n = a.shape[0]
    size = 1
    while size < n:
        size *= 2
    tree = np.empty(2 * size, np.int64)
    for i in range(2 * size):
        tree[i] = -1
    at_rank = np.empty(n, np.int64)
    for idx in range(n):
        v = order[idx]
        r = rank[v]
        while True:
            best = -1
            lo = size
            hi = r + size
            while lo < hi:
                if lo & 1:
                    if tree[lo] > best:
                        best = tree[lo]
                    lo += 1
                if hi & 1:
                    hi -= 1
                    if tree[hi] > best:
                        best = tree[hi]
                lo >>= 1
                hi >>= 1
            if best < 0:
                break
            w = at_rank[best]
            if b[w] >= b[v]:
                break
            target[w] = v
            i = best + size
            tree[i] = -1
            i >>= 1
            while i >= 1:
                tree[i] = max(tree[2 * i], tree[2 * i + 1])
                i >>= 1
        at_rank[r] = v
        i = r + size
        tree[i] = r
        i >>= 1
        while i >= 1:
            tree[i] = max(tree[2 * i], tree[2 * i + 1])
            i >>= 1


def build_sweep(points: Sequence[Point]) -> TdGraph:
    """O(n log n) construction: one ascending sweep per positive-cone family.

    For cone k with boundary directions u1 (at 60k) and u2 (at 60k+60), a
    point v is in the cone of w iff a(v) > a(w) and b(v) > b(w), where
    a = u1 x p and b = p x u2.  a + b is the projection onto the cone
    bisector, which orders the cone by triangular distance.  Points are swept
    by increasing a + b; the frontier holds points whose cone is still empty,
    ordered by a (hence by decreasing b), so the points that the new one
    serves form a contiguous run just below its rank.
    """
    points = list(points)
    n = len(points)
    heads = np.full((n, 6), -1, dtype=np.int64)
    if n < 2:
        return _finish(points, heads)
    xs = np.array([p.x for p in points])
    ys = np.array([p.y for p in points])
    for k in POSITIVE_INDICES:
        t1, t2 = k * geo.SIXTY, (k + 1) * geo.SIXTY
        a = math.cos(t1) * ys - math.sin(t1) * xs
        b = xs * math.sin(t2) - ys * math.cos(t2)
        order = np.argsort(a + b, kind="stable")
        rank = np.empty(n, dtype=np.int64)
        rank[np.argsort(a, kind="stable")] = np.arange(n)
        target = np.full(n, -1, dtype=np.int64)
        _sweep_cone(a, b, order, rank, target)
        heads[:, k] = target
    return _finish(points, heads)


def edge_geometry(g: TdGraph) -> tuple[np.ndarray, np.ndarray]:
    """Direction angle in [0, 2pi) of each edge seen from its head, and its d_tri."""
    xs = np.array([p.x for p in g.points])
    ys = np.array([p.y for p in g.points])
    dx, dy = xs[g.tail] - xs[g.head], ys[g.tail] - ys[g.head]
    ang = np.mod(np.arctan2(dy, dx), 2.0 * math.pi)
    return ang, geo.tri_dist_pairs(xs[g.head], ys[g.head], xs[g.tail], ys[g.tail])


def compute_anchors_and_fans(g: TdGraph) -> TdGraph:
    """Group incoming edges into counterclockwise fans and pick their anchors."""
    m, n = g.m, g.n
    group = g.group
    fan_start = np.zeros(6 * n + 1, dtype=np.int64)
    np.cumsum(np.bincount(group, minlength=6 * n), out=fan_start[1:])
    anchor = np.full(6 * n, -1, dtype=np.int64)
    if m == 0:
        empty = np.empty(0, dtype=np.int64)
        return replace(g, fan_edges=empty, fan_start=fan_start, anchor=anchor,
                       fan_of=empty, fan_pos=empty)

    ang, dist = edge_geometry(g)
    order = np.lexsort((ang, group))
    fan_pos = np.empty(m, dtype=np.int64)
    fan_pos[order] = np.arange(m) - fan_start[group[order]]

    by_length = np.lexsort((g.tail, dist, group))
    gl = group[by_length]
    first = np.ones(m, dtype=bool)
    first[1:] = gl[1:] != gl[:-1]
    anchor[gl[first]] = by_length[first]
    fan_of = anchor[group]

    # Consecutive tails of a fan must be joined by an edge of the graph.
    same = group[order[1:]] == group[order[:-1]]
    s = g.tail[order[:-1]][same]
    t = g.tail[order[1:]][same]
    missing = (g.lookup(s, t) < 0) & (g.lookup(t, s) < 0)
    if missing.any():
        i = int(np.flatnonzero(missing)[0])
        e = int(order[:-1][same][i])
        raise BrokenTriangulation(
            f"fan tails {int(s[i])} and {int(t[i])} of point {int(g.head[e])} "
            f"cone {(int(g.cone[e]) + 3) % 6} are not adjacent"
        )
    return replace(g, fan_edges=order, fan_start=fan_start, anchor=anchor,
                   fan_of=fan_of, fan_pos=fan_pos)


def build_td(points: Sequence[Point], naive: bool = False) -> TdGraph:
    """Build the triangulation and its fans in one call."""
    g = build_naive(points) if naive else build_sweep(points)
    return compute_anchors_and_fans(g)


def canonical_subpath(g: TdGraph, w: int, cone: int, r: int, s: int) -> list[int]:
    """Points of the canonical path of (w, cone) from r to s, inclusive."""
    path = g.canonical_path(w, cone)
    if not path:
        raise NotOnPath(f"point {w} has no canonical path in cone {cone}")
    try:
        i, j = path.index(r), path.index(s)
    except ValueError as exc:
        raise NotOnPath(f"{r} or {s} not on canonical path of ({w}, {cone})") from exc
    if i <= j:
        return path[i : j + 1]
    return path[j : i + 1][::-1]


def canonical_edges(g: TdGraph):
    """Yield (w, cone, eid) for every canonical edge, eid being its D edge."""
    edge_id = g.edge_id
    for (w, k), tails in g.canonical.items():
        for s, t in zip(tails, tails[1:]):
            eid = edge_id.get((s, t))
            if eid is None:
                eid = edge_id[(t, s)]
            yield w, k, eid


def lemma1_audit(g: TdGraph) -> list[str]:
    """Check the four basic facts about every canonical edge; return violations.

    (a) both spokes exist, (b) neither spoke is canonical on the side of the
    edge, (c) the spoke into the edge's head is not an anchor, (d) the edge
    is a boundary edge of its own fan.
    """
    pts = g.points
    owners: dict[int, list[int]] = {}
    for w, _, eid in canonical_edges(g):
        owners.setdefault(eid, []).append(w)

    violations = []
    for w, k, eid in canonical_edges(g):
        s, t = int(g.tail[eid]), int(g.head[eid])
        sw, tw = g.edge_id.get((s, w)), g.edge_id.get((t, w))
        if sw is None or tw is None:
            violations.append(f"(a) canonical edge {s}->{t} of {w}: missing spoke")
            continue
        side_t = geo.orientation(pts[s], pts[w], pts[t])
        for x in owners.get(sw, ()):
            if geo.orientation(pts[s], pts[w], pts[x]) == side_t:
                violations.append(
                    f"(b) spoke {s}->{w} is canonical (of {x}) on the side of {t}"
                )
        if g.is_anchor(tw):
            violations.append(f"(c) spoke {t}->{w} of canonical edge {s}->{t} is an anchor")
        size = len(g.fan(*g.fan_key(eid)))
        if int(g.fan_pos[eid]) not in (0, size - 1):
            violations.append(f"(d) canonical edge {s}->{t} is not a boundary edge of its fan")
    return violations


@dataclass(frozen=True)
class MonotonePath:
    points: list[int]
    colors: list[Color]

    @property
    def edges(self) -> list[tuple[int, int]]:
        return list(zip(self.points, self.points[1:]))


def extract_monotone_path(g: TdGraph, p: int, q: int) -> MonotonePath:
    """Walk the pair sequence from (p, q) until the two ends meet.

    At each step the member of the current pair that has the other in one of
    its positive cones follows its outgoing edge in that cone.
    """
    if p == q:
        raise ValueError("endpoints must differ")
    pts = g.points
    branch_p, branch_q = [p], [q]
    a, b = p, q
    guard = 2 * g.n
    steps = 0
    while a != b:
        steps += 1
        if steps > guard:
            raise NonTermination(f"monotone walk {p}->{q} exceeded {guard} steps")
        k = geo.cone_index(pts[a].x, pts[a].y, pts[b].x, pts[b].y)
        if IS_POSITIVE[k]:
            a = int(g.head[g.out[a, k]])
            branch_p.append(a)
        else:
            b = int(g.head[g.out[b, (k + 3) % 6]])
            branch_q.append(b)
    path = branch_p + branch_q[-2::-1]
    colors = [g.directed(x, y).color for x, y in zip(path, path[1:])]
    return MonotonePath(points=path, colors=colors)


def positive_cone_of(color: Color) -> int:
    return POSITIVE_CONE[Color(color)]
