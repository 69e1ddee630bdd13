"""Certification of the spanner guarantees.

Every check returns data (verdicts, worst ratios, witnesses, violation
messages) rather than raising, so a report can be assembled and printed even
when something fails.  Geometric predicates are filtered in floating point
with a forward error bound and re-decided exactly where the filter is unsure.
"""

from __future__ import annotations

import heapq
import math
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra

from . import geometry as geo
from .construct import ANCHOR_KINDS, SHORTCUT_KINDS, SpannerGraph, charge_edges
from .delaunay import TdGraph, canonical_edges, extract_monotone_path
from .errors import ChargeCollision, ChargeMismatch, Disconnected, UndefinedDelta
from .geometry import CONE_COLOR, IS_POSITIVE, ORIENT_ERRBOUND, REL_TOL, Color, Point

DENSE_LIMIT = 2000
SAMPLED_SOURCES = 256


def _coords(points: Sequence[Point]) -> tuple[np.ndarray, np.ndarray]:
    return (np.array([p.x for p in points], dtype=float),
            np.array([p.y for p in points], dtype=float))


def _as_edge_array(edges) -> np.ndarray:
    e = np.asarray(list(edges) if not isinstance(edges, np.ndarray) else edges, dtype=np.int64)
    return e.reshape(-1, 2)


# --------------------------------------------------------------------------
# Vectorised segment predicates
# --------------------------------------------------------------------------

def orient_signs(ax, ay, bx, by, cx, cy) -> tuple[np.ndarray, np.ndarray]:
    """Sign of (b-a) x (c-a) elementwise, and a mask of signs known to be exact."""
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    err = ORIENT_ERRBOUND * (np.abs(detleft) + np.abs(detright))
    certain = (
        (np.abs(det) > err)
        | ((detleft > 0) & (detright <= 0))
        | ((detleft < 0) & (detright >= 0))
        | (detleft == 0)
    )
    return np.sign(det).astype(np.int8), certain


def segment_candidates(x0, y0, x1, y1) -> tuple[np.ndarray, np.ndarray]:
    """Index pairs i < j of segments whose bounding boxes overlap.

    Segments are bucketed into a uniform grid by bounding box; pairs sharing
    a cell are deduplicated and filtered by exact box overlap.
    """
    m = len(x0)
    empty = np.empty(0, dtype=np.int64)
    if m < 2:
        return empty, empty
    lx, hx = np.minimum(x0, x1), np.maximum(x0, x1)
    ly, hy = np.minimum(y0, y1), np.maximum(y0, y1)
    ox, oy = lx.min(), ly.min()
    extent = max(hx.max() - ox, hy.max() - oy) or 1.0
    side = max(1, int(math.sqrt(m)))
    while True:
        h = extent / side
        cx0 = np.minimum(((lx - ox) / h).astype(np.int64), side)
        cx1 = np.minimum(((hx - ox) / h).astype(np.int64), side)
        cy0 = np.minimum(((ly - oy) / h).astype(np.int64), side)
        cy1 = np.minimum(((hy - oy) / h).astype(np.int64), side)
        width = cx1 - cx0 + 1
        counts = width * (cy1 - cy0 + 1)
        if counts.sum() <= 16 * m + 100_000 or side == 1:
            break
        side = max(1, side // 2)

    total = int(counts.sum())
    seg = np.repeat(np.arange(m), counts)
    off = np.arange(total) - np.repeat(np.cumsum(counts) - counts, counts)
    cell = (cy0[seg] + off // width[seg]) * (side + 1) + cx0[seg] + off % width[seg]
    order = np.argsort(cell, kind="stable")
    cell, seg = cell[order], seg[order]

    start = np.flatnonzero(np.r_[True, cell[1:] != cell[:-1]])
    size = np.diff(np.r_[start, total])
    rank = np.arange(total) - np.repeat(start, size)
    partners = np.repeat(size, size) - rank - 1
    n_pairs = int(partners.sum())
    if n_pairs == 0:
        return empty, empty
    left = np.repeat(np.arange(total), partners)
    right = left + 1 + np.arange(n_pairs) - np.repeat(np.cumsum(partners) - partners, partners)
    a, b = seg[left], seg[right]
    i, j = np.minimum(a, b), np.maximum(a, b)
    keep = i != j
    key = np.unique(i[keep] * m + j[keep])
    i, j = key // m, key % m
    overlap = (lx[i] <= hx[j]) & (lx[j] <= hx[i]) & (ly[i] <= hy[j]) & (ly[j] <= hy[i])
    return i[overlap], j[overlap]


def _pair_tests(xs, ys, e1: np.ndarray, e2: np.ndarray, proper: bool) -> np.ndarray:
    """For edge pairs (e1[k], e2[k]) decide conflict (closed) or proper crossing (open)."""
    a, b, c, d = e1[:, 0], e1[:, 1], e2[:, 0], e2[:, 1]
    shared = (a == c) | (a == d) | (b == c) | (b == d)
    d1, k1 = orient_signs(xs[a], ys[a], xs[b], ys[b], xs[c], ys[c])
    d2, k2 = orient_signs(xs[a], ys[a], xs[b], ys[b], xs[d], ys[d])
    d3, k3 = orient_signs(xs[c], ys[c], xs[d], ys[d], xs[a], ys[a])
    d4, k4 = orient_signs(xs[c], ys[c], xs[d], ys[d], xs[b], ys[b])
    sure = k1 & k2 & k3 & k4
    apart = ((d1 * d2 > 0) & k1 & k2) | ((d3 * d4 > 0) & k3 & k4)
    crossing = sure & (d1 * d2 < 0) & (d3 * d4 < 0)
    collinear = (d1 == 0) & (d2 == 0)
    result = crossing.copy()
    if proper:
        # With exact signs and no collinearity, crossing is the whole answer.
        decided = apart | (sure & ~collinear)
    else:
        # A shared endpoint is harmless unless the two segments are collinear.
        decided = apart | crossing | (sure & shared & ~collinear)
    undecided = ~decided
    test = geo.segments_properly_cross if proper else geo.segments_conflict
    for k in np.flatnonzero(undecided).tolist():
        s1 = ((xs[a[k]], ys[a[k]]), (xs[b[k]], ys[b[k]]))
        s2 = ((xs[c[k]], ys[c[k]]), (xs[d[k]], ys[d[k]]))
        result[k] = test(s1, s2)
    return result


# --------------------------------------------------------------------------
# Planarity
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class PlanarityResult:
    is_plane: bool
    witness: tuple[tuple[int, int], tuple[int, int]] | None = None
    conflicts: int = 0


def check_planarity(points: Sequence[Point], edges) -> PlanarityResult:
    """True iff no two edges meet anywhere except at a shared endpoint.

    The witness is the lexicographically first conflicting pair of edges.
    """
    e = _as_edge_array(edges)
    if len(e) < 2:
        return PlanarityResult(True)
    e = np.sort(e, axis=1)
    xs, ys = _coords(points)
    i, j = segment_candidates(xs[e[:, 0]], ys[e[:, 0]], xs[e[:, 1]], ys[e[:, 1]])
    bad = _pair_tests(xs, ys, e[i], e[j], proper=False)
    if not bad.any():
        return PlanarityResult(True)
    pairs = sorted(
        tuple(sorted((tuple(e[p].tolist()), tuple(e[q].tolist()))))
        for p, q in zip(i[bad], j[bad])
    )
    return PlanarityResult(False, pairs[0], len(pairs))


# --------------------------------------------------------------------------
# Shortest paths and stretch
# --------------------------------------------------------------------------

def _graph(points: Sequence[Point], edges) -> csr_matrix:
    n = len(points)
    e = _as_edge_array(edges)
    xs, ys = _coords(points)
    w = np.hypot(xs[e[:, 0]] - xs[e[:, 1]], ys[e[:, 0]] - ys[e[:, 1]])
    return csr_matrix((w, (e[:, 0], e[:, 1])), shape=(n, n))


def graph_distances(points: Sequence[Point], edges, sources=None) -> np.ndarray:
    """Euclidean-weighted shortest-path distances from ``sources`` (all by default)."""
    n = len(points)
    if n == 0:
        return np.zeros((0, 0))
    return dijkstra(_graph(points, edges), directed=False, indices=sources)


def _ensure_connected(points, edges) -> None:
    n = len(points)
    if n < 2:
        return
    count, labels = connected_components(_graph(points, edges), directed=False)
    if count > 1:
        raise Disconnected(set(np.flatnonzero(labels == labels[0]).tolist()))


def sample_sources(n: int, k: int = SAMPLED_SOURCES, seed: int = 0) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return np.sort(rng.choice(n, size=min(k, n), replace=False))


@dataclass(frozen=True)
class StretchResult:
    value: float
    witness: tuple[int, int] | None
    sampled: bool = False


def _baseline(xs, ys, src, baseline: str) -> np.ndarray:
    if baseline == "complete":
        return np.hypot(xs[None, :] - xs[src, None], ys[None, :] - ys[src, None])
    if baseline == "td":
        return geo.tri_dist_pairs(xs[src, None], ys[src, None], xs[None, :], ys[None, :])
    raise ValueError(f"unknown baseline {baseline!r}")


def compute_stretch(
    points: Sequence[Point],
    edges,
    baseline: str = "complete",
    sources=None,
    dist: np.ndarray | None = None,
) -> StretchResult:
    """max over pairs of d_graph(p, q) / base(p, q), base = |pq| or d_tri(p, q).

    With ``sources`` given only pairs with p among them are examined; ``dist``
    may carry the precomputed distance rows for those sources.
    """
    n = len(points)
    if n < 2:
        return StretchResult(1.0, None)
    _ensure_connected(points, edges)
    sampled = sources is not None and len(sources) < n
    src = np.arange(n) if sources is None else np.asarray(sources)
    if dist is None:
        dist = graph_distances(points, edges, src)
    xs, ys = _coords(points)
    base = _baseline(xs, ys, src, baseline)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(base > 0, dist / base, 1.0)
    k = int(np.argmax(ratio))
    r, c = divmod(k, n)
    p, q = int(src[r]), int(c)
    return StretchResult(float(ratio[r, c]), (min(p, q), max(p, q)), sampled)


def pair_distances(points: Sequence[Point], edges, pairs, cutoffs=None) -> np.ndarray:
    """Shortest-path distance for each (source, target) pair, inf beyond its cutoff.

    Used when the dense matrix would be too large: one bounded Dijkstra per
    distinct source, stopping once all of its targets are settled.
    """
    g = _graph(points, edges)
    g = (g + g.T).tocsr()
    indptr, indices, weights = g.indptr.tolist(), g.indices.tolist(), g.data.tolist()
    pairs = [(int(a), int(b)) for a, b in pairs]
    cutoffs = [math.inf] * len(pairs) if cutoffs is None else list(cutoffs)
    by_source: dict[int, list[int]] = {}
    for k, (a, _) in enumerate(pairs):
        by_source.setdefault(a, []).append(k)
    out = np.full(len(pairs), math.inf)
    for src, ks in by_source.items():
        targets = {pairs[k][1] for k in ks}
        limit = max(cutoffs[k] for k in ks)
        settled: dict[int, float] = {}
        heap = [(0.0, src)]
        while heap and targets:
            d, x = heapq.heappop(heap)
            if x in settled:
                continue
            settled[x] = d
            targets.discard(x)
            if d > limit:
                break
            for t in range(indptr[x], indptr[x + 1]):
                y = indices[t]
                if y not in settled:
                    heapq.heappush(heap, (d + weights[t], y))
        for k in ks:
            out[k] = settled.get(pairs[k][1], math.inf)
    return out


# --------------------------------------------------------------------------
# Degree and convex position
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class DegreeResult:
    max_degree: int
    witness: int | None
    histogram: dict[int, int]
    limit: int

    @property
    def ok(self) -> bool:
        return self.max_degree <= self.limit


def check_degree(n: int, edges, limit: int = 4) -> DegreeResult:
    e = _as_edge_array(edges)
    deg = np.bincount(e.ravel(), minlength=n) if n else np.zeros(0, dtype=np.int64)
    if n == 0:
        return DegreeResult(0, None, {}, limit)
    w = int(np.argmax(deg))
    hist = dict(sorted(Counter(deg.tolist()).items()))
    return DegreeResult(int(deg[w]), w, hist, limit)


def check_convex_position(points: Sequence[Point]) -> bool:
    """Every point is a strict vertex of the convex hull (n < 3 counts as convex)."""
    pts = sorted({(p[-2], p[-1]) for p in points})
    if len(pts) != len(points):
        return False
    if len(pts) < 3:
        return True

    def chain(seq):
        hull: list[tuple[float, float]] = []
        for p in seq:
            while len(hull) >= 2 and geo.orient(*hull[-2], *hull[-1], *p) <= 0:
                hull.pop()
            hull.append(p)
        return hull

    lower, upper = chain(pts), chain(pts[::-1])
    return len(lower) + len(upper) - 2 == len(pts)


def degree_limit(points: Sequence[Point]) -> int:
    return 3 if len(points) >= 3 and check_convex_position(points) else 4


# --------------------------------------------------------------------------
# Crossed and uncrossed edges
# --------------------------------------------------------------------------

UNCROSSED_BLUE = "uncrossed_blue"
UNCROSSED_WHITE = "uncrossed_white"
CROSSED_BLUE = "crossed_blue"
CROSSED_WHITE = "crossed_white"


@dataclass(frozen=True)
class EdgeClasses:
    """Per D edge: is it crossed by a shortcut of S, and is it blue."""

    crossed: np.ndarray
    blue: np.ndarray

    def label(self, eid: int) -> str:
        kind = "crossed" if self.crossed[eid] else "uncrossed"
        return f"{kind}_{'blue' if self.blue[eid] else 'white'}"

    def as_dict(self) -> dict[int, str]:
        return {eid: self.label(eid) for eid in range(len(self.crossed))}


def classify_edges(g: TdGraph, s: SpannerGraph) -> EdgeClasses:
    """Mark every D edge properly crossed by some shortcut of S."""
    blue = g.cone == 3
    crossed = np.zeros(g.m, dtype=bool)
    shortcuts = [k for k, e in s.edges.items() if e.kind in SHORTCUT_KINDS]
    if not shortcuts or g.m == 0:
        return EdgeClasses(crossed, blue)
    d_edges = np.stack([g.tail, g.head], axis=1)
    sc = np.array(shortcuts, dtype=np.int64)
    allseg = np.concatenate([d_edges, sc])
    xs, ys = _coords(g.points)
    i, j = segment_candidates(xs[allseg[:, 0]], ys[allseg[:, 0]],
                              xs[allseg[:, 1]], ys[allseg[:, 1]])
    mixed = (i < g.m) & (j >= g.m)
    i, j = i[mixed], j[mixed]
    hit = _pair_tests(xs, ys, allseg[i], allseg[j], proper=True)
    crossed[i[hit]] = True
    return EdgeClasses(crossed, blue)


# --------------------------------------------------------------------------
# Structural audits
# --------------------------------------------------------------------------

def _negative_white_cone(pts, apex: int, other: int) -> int | None:
    k = geo.cone_index(pts[apex].x, pts[apex].y, pts[other].x, pts[other].y)
    return k if k in (2, 4) else None


def shortcut_cone_audit(s: SpannerGraph) -> list[str]:
    """Every step-6 shortcut (p_j, p_i): p_j and the anchor tail v share a negative
    white cone of p_i, and share one of p_{j-1} too."""
    pts = s.points
    out = []
    for w, v, pi, pj, pjm, _ in s.white_shortcuts:
        for base in (pi, pjm):
            targets = [t for t in (pj, v) if t != base]
            cones = {_negative_white_cone(pts, base, t) for t in targets}
            if None in cones or len(cones) != 1:
                out.append(f"shortcut ({pj},{pi}) of fan {w}: {targets} not in one negative white cone of {base}")
    return out


def uncrossed_audit(g: TdGraph, classes: EdgeClasses) -> list[str]:
    """Anchors, canonical edges and fan boundary edges must be uncrossed."""
    special = np.zeros(g.m, dtype=bool)
    anchors = g.anchor[g.anchor >= 0]
    special[anchors] = True
    for _, _, eid in canonical_edges(g):
        special[eid] = True
    starts = g.fan_start[:-1]
    ends = g.fan_start[1:]
    nonempty = ends > starts
    special[g.fan_edges[starts[nonempty]]] = True
    special[g.fan_edges[ends[nonempty] - 1]] = True
    bad = np.flatnonzero(special & classes.crossed)
    return [f"edge {int(g.tail[e])}->{int(g.head[e])} is special but crossed" for e in bad]


def charging_audit(s: SpannerGraph) -> list[str]:
    try:
        charge_edges(s)
    except (ChargeCollision, ChargeMismatch) as exc:
        return [str(exc)]
    return []


def metric_identity_audit(g: TdGraph, tol: float = REL_TOL) -> list[str]:
    """Fan-mates v, u of a white fan with u in a positive white cone of v:
    d_tri(u, w) = d_tri(v, w) + delta_blue(v, u)."""
    pts = g.points
    out = []
    for (w, k), fan in g.fans.items():
        if k == 0:
            continue
        tails = [int(g.tail[e]) for e in fan]
        for v in tails:
            for u in tails:
                if u == v:
                    continue
                c = geo.cone_index(pts[v].x, pts[v].y, pts[u].x, pts[u].y)
                if not IS_POSITIVE[c] or c == 3:
                    continue
                lhs = geo.tri_dist(pts[u], pts[w])
                rhs = geo.tri_dist(pts[v], pts[w]) + geo.delta_values(pts[v], pts[u]).delta_blue
                if abs(lhs - rhs) > tol * max(lhs, 1e-300) + 1e-12:
                    out.append(f"fan ({w},{k}): d(u={u},w)={lhs!r} != {rhs!r}")
    return out


# --------------------------------------------------------------------------
# Monotone paths
# --------------------------------------------------------------------------

def path_audit(
    points: Sequence[Point],
    path: Sequence[int],
    colors: Sequence[Color],
    tol: float = REL_TOL,
    label: str = "",
) -> list[str]:
    """Check one path between path[0] and path[-1] against the monotone-path lemmas.

    Monotone projections onto the two sides of the smallest homothet that
    meet at the vertex of the missing colour, no two consecutive edges
    in neighbouring cones of the shared point, bi-coloured with the colour of
    the end-to-end positive cone, length <= 2 d_tri, the d_tri mass of the
    apex colour <= d_tri and of the other colour <= delta of the missing one.
    """
    pts = points
    u, v = path[0], path[-1]
    if u == v:
        return []
    k = geo.cone_index(pts[u].x, pts[u].y, pts[v].x, pts[v].y)
    if not IS_POSITIVE[k]:
        u, v = v, u
        path, colors = list(path)[::-1], list(colors)[::-1]
        k = geo.cone_index(pts[u].x, pts[u].y, pts[v].x, pts[v].y)
    c1 = CONE_COLOR[k]
    dv = geo.delta_values(pts[u], pts[v])
    d = dv.d_tri
    slack = tol * max(d, 1e-300)
    out = []
    tag = label or f"path {u}..{v}"

    used = {Color(c) for c in colors}
    tri = geo.smallest_homothet(pts[u], pts[v])
    missing = [c for c in Color if c not in used and c is not c1] or [dv.c2, dv.c3]
    if not any(_projections_ok(pts, path, tri.vertex(c), tol) for c in missing):
        out.append(f"{tag}: projections onto the homothet sides overlap or overhang")

    if len(used) > 2 or (c1 not in used):
        out.append(f"{tag}: colours {sorted(c.value for c in used)} not bi-coloured with {c1.value}")

    for a, b, c in zip(path, path[1:], path[2:]):
        k1 = geo.cone_index(pts[b].x, pts[b].y, pts[a].x, pts[a].y)
        k2 = geo.cone_index(pts[b].x, pts[b].y, pts[c].x, pts[c].y)
        if geo.cones_adjacent(k1, k2):
            out.append(f"{tag}: edges at {b} lie in neighbouring cones {k1}, {k2}")

    length = sum(math.hypot(pts[a].x - pts[b].x, pts[a].y - pts[b].y) for a, b in zip(path, path[1:]))
    if length > 2 * d + slack:
        out.append(f"{tag}: length {length!r} > 2 d_tri {2 * d!r}")

    mass: dict[Color, float] = {}
    for a, b, c in zip(path, path[1:], colors):
        mass[Color(c)] = mass.get(Color(c), 0.0) + geo.tri_dist(pts[a], pts[b])
    for c, total in mass.items():
        if total > d + slack:
            out.append(f"{tag}: {c.value} mass {total!r} > d_tri {d!r}")
    others = [c for c in used if c is not c1]
    if others:
        c2 = others[0]
        c3 = next(c for c in Color if c not in (c1, c2))
        if mass.get(c2, 0.0) > dv.delta(c3) + slack:
            out.append(f"{tag}: {c2.value} mass {mass[c2]!r} > delta_{c3.value} {dv.delta(c3)!r}")
    return out


def _projections_ok(pts: Sequence[Point], path: Sequence[int], z, tol: float) -> bool:
    """Oblique coordinates of the path in the frame (z; u - z, v - z) are monotone in [0, 1].

    This is the non-overlap and containment of the projections onto zu and zv.
    """
    u, v = pts[path[0]], pts[path[-1]]
    ax, ay = u.x - z[0], u.y - z[1]
    bx, by = v.x - z[0], v.y - z[1]
    det = ax * by - ay * bx
    if abs(det) <= 1e-300:
        return True
    prev_a, prev_b = 1.0, 0.0
    for i in path:
        px, py = pts[i].x - z[0], pts[i].y - z[1]
        a = (px * by - py * bx) / det
        b = (ax * py - ay * px) / det
        if not (-tol <= a <= 1 + tol and -tol <= b <= 1 + tol):
            return False
        if a > prev_a + tol or b < prev_b - tol:
            return False
        prev_a, prev_b = a, b
    return True


def _path_colors(g: TdGraph, path: Sequence[int]) -> list[Color]:
    return [g.directed(a, b).color for a, b in zip(path, path[1:])]


def canonical_path_audit(g: TdGraph, max_pairs_per_fan: int | None = None) -> list[str]:
    """Every canonical path between two fan-mates is monotone and short."""
    out = []
    for (w, k), tails in g.canonical.items():
        if len(tails) < 2:
            continue
        colors = _path_colors(g, tails)
        pairs = [(i, j) for i in range(len(tails)) for j in range(i + 1, len(tails))]
        if max_pairs_per_fan is not None and len(pairs) > max_pairs_per_fan:
            step = len(pairs) / max_pairs_per_fan
            pairs = [pairs[int(t * step)] for t in range(max_pairs_per_fan)]
        for i, j in pairs:
            out += path_audit(g.points, tails[i : j + 1], colors[i:j], label=f"fan ({w},{k}) {i}..{j}")
    return out


def monotone_path_audit(g: TdGraph, pairs: Iterable[tuple[int, int]]) -> list[str]:
    out = []
    for p, q in pairs:
        path = extract_monotone_path(g, p, q)
        out += path_audit(g.points, path.points, path.colors, label=f"walk {p}->{q}")
    return out


# --------------------------------------------------------------------------
# Per-class distance bounds
# --------------------------------------------------------------------------

@dataclass
class BoundAudit:
    worst: dict[str, float] = field(default_factory=dict)
    counts: dict[str, int] = field(default_factory=dict)
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def record(self, name: str, actual: float, bound: float, what: str) -> None:
        self.counts[name] = self.counts.get(name, 0) + 1
        ratio = actual / bound if bound > 0 else (0.0 if actual == 0 else math.inf)
        self.worst[name] = max(self.worst.get(name, 0.0), ratio)
        if actual > bound * (1 + REL_TOL):
            self.violations.append(f"{name}: {what}: {actual!r} > {bound!r}")

    def summary(self) -> dict:
        return {
            "worst_ratio": dict(sorted(self.worst.items())),
            "checked": dict(sorted(self.counts.items())),
            "violations": len(self.violations),
        }


def _bound_requests(g: TdGraph, s: SpannerGraph, classes: EdgeClasses):
    """Yield (class name, a, b, bound, description) for every applicable inequality."""
    pts = g.points
    in_s = {key for key, e in s.edges.items() if e.kind in ANCHOR_KINDS}
    for eid in range(g.m):
        u, w = int(g.tail[eid]), int(g.head[eid])
        dv = geo.delta_values(pts[u], pts[w])
        d = dv.d_tri
        what = f"edge {u}->{w}"
        if classes.blue[eid]:
            if classes.crossed[eid]:
                yield CROSSED_BLUE, u, w, 3 * d + 9 * dv.delta_min, what
            else:
                yield UNCROSSED_BLUE, u, w, 3 * d, what
            continue
        if classes.crossed[eid]:
            yield CROSSED_WHITE, u, w, 10 * d + 10 * dv.delta_min, what
            continue
        anchor = int(g.fan_of[eid])
        if anchor == eid:
            yield "white_anchor", u, w, 9 * d, what
            continue
        v = int(g.tail[anchor])
        anchor_in_s = (min(v, w), max(v, w)) in in_s
        k = int(g.neg_cone[eid])
        pe, pa = int(g.fan_pos[eid]), int(g.fan_pos[anchor])
        white_side = pe > pa if k == 4 else pe < pa
        vu = geo.delta_values(pts[v], pts[u])
        if white_side:
            yield "uncrossed_white_white_side", u, w, 9 * d + dv.delta_blue, what
            try:
                yield "white_side_to_anchor_tail", v, u, vu.d_tri + vu.delta_blue, f"pair {v}-{u}"
            except UndefinedDelta:
                pass
            if anchor_in_s:
                yield "white_side_anchor_in_s", u, w, d + dv.delta_blue, what
        else:
            yield "uncrossed_white_blue_side", u, w, 9 * d, what
            yield "blue_side_to_anchor_tail", v, u, 5 * vu.d_tri, f"pair {v}-{u}"
            if anchor_in_s:
                yield "blue_side_anchor_in_s", u, w, 6 * d, what


def audit_edge_bounds(
    g: TdGraph,
    s: SpannerGraph,
    classes: EdgeClasses | None = None,
    dist: np.ndarray | None = None,
) -> BoundAudit:
    """Check the distance bound that applies to every D edge (and fan-mate pair).

    ``dist`` is the full all-pairs distance matrix of S if already computed.
    """
    classes = classify_edges(g, s) if classes is None else classes
    requests = list(_bound_requests(g, s, classes))
    audit = BoundAudit()
    if not requests:
        return audit
    if dist is None and g.n <= DENSE_LIMIT:
        dist = graph_distances(s.points, s.edge_list())
    if dist is not None:
        values = [float(dist[a, b]) for _, a, b, _, _ in requests]
    else:
        pairs = [(a, b) for _, a, b, _, _ in requests]
        cut = [bound * (1 + 2 * REL_TOL) for _, _, _, bound, _ in requests]
        values = pair_distances(s.points, s.edge_list(), pairs, cut).tolist()
    for (name, _, _, bound, what), value in zip(requests, values):
        audit.record(name, value, bound, what)
    return audit


# --------------------------------------------------------------------------
# Report
# --------------------------------------------------------------------------

@dataclass
class VerificationReport:
    n: int
    m: int
    is_plane: bool
    crossing_witness: tuple | None
    max_degree: int
    degree_witness: int | None
    degree_limit: int
    degree_histogram: dict[int, int]
    stretch: StretchResult
    tri_stretch: StretchResult
    td_stretch: StretchResult | None
    convex_position: bool
    bound_audit: BoundAudit | None = None
    charging_ok: bool | None = None
    structural: list[str] = field(default_factory=list)

    def failures(self) -> list[str]:
        """Names of the failed invariants, empty when everything certifies."""
        out = []
        if not self.is_plane:
            out.append(f"planarity: edges {self.crossing_witness[0]} and {self.crossing_witness[1]} cross")
        if self.max_degree > self.degree_limit:
            out.append(f"degree: point {self.degree_witness} has degree {self.max_degree} > {self.degree_limit}")
        if self.tri_stretch.value > 20 * (1 + REL_TOL):
            out.append(f"stretch: d_S/d_tri = {self.tri_stretch.value!r} at {self.tri_stretch.witness}")
        if self.stretch.value > 20 * (1 + REL_TOL):
            out.append(f"stretch: d_S/|pq| = {self.stretch.value!r} at {self.stretch.witness}")
        if self.td_stretch is not None and self.td_stretch.value > 2 * (1 + REL_TOL):
            out.append(f"td-stretch: {self.td_stretch.value!r} at {self.td_stretch.witness}")
        if self.bound_audit is not None and not self.bound_audit.ok:
            out.append(f"bounds: {self.bound_audit.violations[0]}")
        if self.charging_ok is False:
            out.append("charging: sector collision")
        if self.structural:
            out.append(f"structure: {self.structural[0]}")
        return out

    @property
    def ok(self) -> bool:
        return not self.failures()


def verify_spanner(
    s: SpannerGraph,
    g: TdGraph | None = None,
    bounds: bool = False,
    charging: bool = False,
    structure: bool = False,
) -> VerificationReport:
    """Run every certification that applies; ``g`` enables the D-based checks."""
    pts = s.points
    n = len(pts)
    edges = s.edge_list()
    planar = check_planarity(pts, edges)
    convex = check_convex_position(pts)
    deg = check_degree(n, edges, 3 if convex and n >= 3 else 4)

    sources = None if n <= DENSE_LIMIT else sample_sources(n)
    dist = graph_distances(pts, edges, sources) if n else None
    stretch = compute_stretch(pts, edges, "complete", sources, dist)
    tri = compute_stretch(pts, edges, "td", sources, dist)
    td = None
    if g is not None:
        td = compute_stretch(pts, g.undirected_pairs(), "complete", sources)

    report = VerificationReport(
        n=n, m=len(edges), is_plane=planar.is_plane, crossing_witness=planar.witness,
        max_degree=deg.max_degree, degree_witness=deg.witness, degree_limit=deg.limit,
        degree_histogram=deg.histogram, stretch=stretch, tri_stretch=tri, td_stretch=td,
        convex_position=convex,
    )
    if charging:
        report.charging_ok = not charging_audit(s)
    if g is not None and (bounds or structure):
        classes = classify_edges(g, s)
        if bounds:
            report.bound_audit = audit_edge_bounds(
                g, s, classes, dist if sources is None else None
            )
        if structure:
            from .delaunay import lemma1_audit

            report.structural = (
                lemma1_audit(g) + shortcut_cone_audit(s) + uncrossed_audit(g, classes)
            )
    return report
