"""Cones, the triangular distance, robust predicates and general position.

Conventions used throughout the package:

* Cone ``k`` (0..5) at a point spans direction angles ``[60k, 60k+60)``
  degrees, counterclockwise from the positive x-axis.
* Positive cones are 1 (red), 5 (green) and 3 (blue); negative cones are
  4 (red), 2 (green) and 0 (blue).  The negative cone of a colour is the
  antipode of the positive cone of that colour.
* The reference triangle points downward: a horizontal top side with the
  green vertex on the left, the blue vertex on the right, and the red vertex
  at the bottom.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import DegenerateDirection, GeneralPositionFailure, UndefinedDelta

SQRT3 = math.sqrt(3.0)
TWO_OVER_SQRT3 = 2.0 / SQRT3
SIXTY = math.pi / 3.0

BOUNDARY_TOL = 1e-12  # radians, and relative gap for tie detection
REL_TOL = 1e-9

# Outward unit normals of the reference triangle: top side, lower-right side,
# lower-left side.  They sum to zero.
N_TOP = (0.0, 1.0)
N_LR = (SQRT3 / 2.0, -0.5)
N_LL = (-SQRT3 / 2.0, -0.5)


class Color(str, enum.Enum):
    RED = "red"
    GREEN = "green"
    BLUE = "blue"

    def __str__(self) -> str:
        return self.value


class Sign(str, enum.Enum):
    POSITIVE = "positive"
    NEGATIVE = "negative"

    def __str__(self) -> str:
        return self.value


_CONE_TABLE = (
    (Color.BLUE, Sign.NEGATIVE),
    (Color.RED, Sign.POSITIVE),
    (Color.GREEN, Sign.NEGATIVE),
    (Color.BLUE, Sign.POSITIVE),
    (Color.RED, Sign.NEGATIVE),
    (Color.GREEN, Sign.POSITIVE),
)
POSITIVE_CONE = {Color.RED: 1, Color.GREEN: 5, Color.BLUE: 3}
NEGATIVE_CONE = {Color.RED: 4, Color.GREEN: 2, Color.BLUE: 0}
CONE_COLOR = tuple(c for c, _ in _CONE_TABLE)
IS_POSITIVE = tuple(s is Sign.POSITIVE for _, s in _CONE_TABLE)
BLUE_CONES = (0, 3)
WHITE_CONES = (1, 2, 4, 5)

# Bisector of each positive cone; the triangular distance to a point inside
# that cone is 2/sqrt(3) times the projection onto it.
BISECTOR = {1: N_TOP, 5: N_LR, 3: N_LL}

# Vertex colours clockwise from the upper-left vertex.
_CLOCKWISE = (Color.GREEN, Color.BLUE, Color.RED)


class Point(NamedTuple):
    id: int
    x: float
    y: float


class ConeId(NamedTuple):
    color: Color
    sign: Sign

    @property
    def index(self) -> int:
        return _CONE_TABLE.index((self.color, self.sign))

    @classmethod
    def from_index(cls, k: int) -> "ConeId":
        color, sign = _CONE_TABLE[k % 6]
        return cls(color, sign)

    def antipode(self) -> "ConeId":
        return ConeId.from_index(self.index + 3)


def cones_adjacent(k1: int, k2: int) -> bool:
    """True when two cone indices share a boundary ray."""
    return (k1 - k2) % 6 in (1, 5)


def make_points(coords: Iterable[Sequence[float]]) -> list[Point]:
    """Wrap raw ``(x, y)`` pairs into indexed points."""
    pts = []
    for i, (x, y) in enumerate(coords):
        x, y = float(x), float(y)
        if not (math.isfinite(x) and math.isfinite(y)):
            raise ValueError(f"point {i} has non-finite coordinates ({x}, {y})")
        pts.append(Point(i, x, y))
    return pts


# --------------------------------------------------------------------------
# Predicates
# --------------------------------------------------------------------------

_EPS = 2.0 ** -53
# Shewchuk's first-stage bound for orient2d.
ORIENT_ERRBOUND = (3.0 + 16.0 * _EPS) * _EPS


def orient(ax: float, ay: float, bx: float, by: float, cx: float, cy: float) -> int:
    """Sign of (b-a) x (c-a) on raw coordinates.

    The floating-point determinant is trusted when its magnitude exceeds
    ``ORIENT_ERRBOUND * (|detleft| + |detright|)``; otherwise the sign is
    recomputed exactly in rational arithmetic.
    """
    detleft = (ax - cx) * (by - cy)
    detright = (ay - cy) * (bx - cx)
    det = detleft - detright
    # Opposite signs (or a zero product): the rounded difference has the true sign.
    if detleft > 0.0:
        if detright <= 0.0:
            return 1 if det > 0.0 else (-1 if det < 0.0 else 0)
    elif detleft < 0.0:
        if detright >= 0.0:
            return 1 if det > 0.0 else (-1 if det < 0.0 else 0)
    else:
        return 1 if det > 0.0 else (-1 if det < 0.0 else 0)
    errbound = ORIENT_ERRBOUND * (abs(detleft) + abs(detright))
    if det > errbound:
        return 1
    if -det > errbound:
        return -1
    fax, fay, fbx, fby, fcx, fcy = map(Fraction, (ax, ay, bx, by, cx, cy))
    exact = (fbx - fax) * (fcy - fay) - (fby - fay) * (fcx - fax)
    return (exact > 0) - (exact < 0)


def orientation(a, b, c) -> int:
    """Orientation of the triple: +1 counterclockwise, -1 clockwise, 0 collinear."""
    return orient(a[-2], a[-1], b[-2], b[-1], c[-2], c[-1])


def _xy(p) -> tuple[float, float]:
    return p[-2], p[-1]


def _between(a, b, c) -> bool:
    """For collinear a, b, c: is c strictly inside segment ab?"""
    if a[0] != b[0]:
        lo, hi = sorted((a[0], b[0]))
        return lo < c[0] < hi
    lo, hi = sorted((a[1], b[1]))
    return lo < c[1] < hi


def segments_properly_cross(s1, s2) -> bool:
    """True iff the open segments intersect.

    Segments are pairs of points (anything indexable with x, y as the last two
    entries).  Touching at an endpoint, shared or not, is not a crossing;
    collinear overlap of positive length is.
    """
    a, b = _xy(s1[0]), _xy(s1[1])
    c, d = _xy(s2[0]), _xy(s2[1])
    o1 = orient(*a, *b, *c)
    o2 = orient(*a, *b, *d)
    o3 = orient(*c, *d, *a)
    o4 = orient(*c, *d, *b)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and o2 == 0:
        # Collinear: the open segments meet iff the parameter intervals overlap
        # with positive length.
        i = 0 if a[0] != b[0] or c[0] != d[0] else 1
        lo1, hi1 = sorted((a[i], b[i]))
        lo2, hi2 = sorted((c[i], d[i]))
        return min(hi1, hi2) > max(lo1, lo2)
    return False


def segments_conflict(s1, s2) -> bool:
    """True iff two closed segments meet anywhere other than a shared endpoint.

    This is the planarity notion for straight-line drawings: it also catches
    an edge passing through a vertex of another edge.
    """
    a, b = _xy(s1[0]), _xy(s1[1])
    c, d = _xy(s2[0]), _xy(s2[1])
    if segments_properly_cross((a, b), (c, d)):
        return True
    shared = {a, b} & {c, d}
    for p, (q, r) in ((c, (a, b)), (d, (a, b)), (a, (c, d)), (b, (c, d))):
        if p in shared:
            continue
        if p == q or p == r:
            return True
        if orient(*q, *r, *p) == 0 and _between(q, r, p):
            return True
    return False


# --------------------------------------------------------------------------
# Cones and the triangular distance
# --------------------------------------------------------------------------

def direction_angle(dx: float, dy: float) -> float:
    ang = math.atan2(dy, dx)
    if ang < 0.0:
        ang += 2.0 * math.pi
    return ang


def cone_index(ax: float, ay: float, bx: float, by: float) -> int:
    """Cone index of b as seen from apex a."""
    dx, dy = bx - ax, by - ay
    if dx == 0.0 and dy == 0.0:
        raise DegenerateDirection("apex and target coincide")
    ang = direction_angle(dx, dy)
    k = int(ang // SIXTY)
    if k == 6:
        k = 0
    rem = ang - k * SIXTY
    if rem < BOUNDARY_TOL or SIXTY - rem < BOUNDARY_TOL:
        raise DegenerateDirection(
            f"direction {math.degrees(ang):.15g} deg lies on a cone boundary"
        )
    return k


def cone_of(apex, target) -> ConeId:
    """The cone of ``apex`` that contains ``target``."""
    return ConeId.from_index(cone_index(*_xy(apex), *_xy(target)))


def tri_dist_xy(px: float, py: float, qx: float, qy: float) -> float:
    dx, dy = qx - px, qy - py
    s = 0.0
    t = dy  # N_TOP
    if t > 0.0:
        s += t
    t = N_LR[0] * dx + N_LR[1] * dy
    if t > 0.0:
        s += t
    t = N_LL[0] * dx + N_LL[1] * dy
    if t > 0.0:
        s += t
    return TWO_OVER_SQRT3 * s


def tri_dist(p, q) -> float:
    """Side length of the smallest downward equilateral triangle through p and q."""
    return tri_dist_xy(*_xy(p), *_xy(q))


def tri_dist_pairs(px, py, qx, qy) -> np.ndarray:
    """Elementwise d_tri(p_i, q_i) over broadcastable coordinate arrays."""
    dx = np.asarray(qx) - np.asarray(px)
    dy = np.asarray(qy) - np.asarray(py)
    total = np.maximum(dy, 0.0)
    total += np.maximum(N_LR[0] * dx + N_LR[1] * dy, 0.0)
    total += np.maximum(N_LL[0] * dx + N_LL[1] * dy, 0.0)
    return TWO_OVER_SQRT3 * total


def tri_dist_matrix(xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
    """All-pairs triangular distance: entry [i, j] is d_tri(p_i, p_j)."""
    return tri_dist_pairs(xs[:, None], ys[:, None], xs[None, :], ys[None, :])


@dataclass(frozen=True)
class Homothet:
    """A downward equilateral triangle given by its three coloured vertices."""

    green: tuple[float, float]
    blue: tuple[float, float]
    red: tuple[float, float]
    side: float

    def vertex(self, color: Color) -> tuple[float, float]:
        return {Color.GREEN: self.green, Color.BLUE: self.blue, Color.RED: self.red}[
            Color(color)
        ]

    def contains(self, p, tol: float = REL_TOL) -> bool:
        """Closed containment, with slack ``tol * side`` on every side."""
        x, y = _xy(p)
        slack = tol * max(self.side, 1.0)
        if y > self.green[1] + slack:
            return False
        if N_LR[0] * x + N_LR[1] * y > N_LR[0] * self.blue[0] + N_LR[1] * self.blue[1] + slack:
            return False
        if N_LL[0] * x + N_LL[1] * y > N_LL[0] * self.green[0] + N_LL[1] * self.green[1] + slack:
            return False
        return True

    def on_boundary(self, p, tol: float = REL_TOL) -> bool:
        x, y = _xy(p)
        slack = tol * max(self.side, 1.0)
        gaps = (
            self.green[1] - y,
            N_LR[0] * self.blue[0] + N_LR[1] * self.blue[1] - (N_LR[0] * x + N_LR[1] * y),
            N_LL[0] * self.green[0] + N_LL[1] * self.green[1] - (N_LL[0] * x + N_LL[1] * y),
        )
        return min(gaps) >= -slack and min(abs(g) for g in gaps) <= slack


def homothet_at(apex_xy, apex_color: Color, side: float) -> Homothet:
    """The homothet of the given side whose ``apex_color`` vertex is ``apex_xy``."""
    ax, ay = apex_xy
    h = side * SQRT3 / 2.0
    if apex_color is Color.RED:
        return Homothet((ax - side / 2.0, ay + h), (ax + side / 2.0, ay + h), (ax, ay), side)
    if apex_color is Color.GREEN:
        return Homothet((ax, ay), (ax + side, ay), (ax + side / 2.0, ay - h), side)
    return Homothet((ax - side, ay), (ax, ay), (ax - side / 2.0, ay - h), side)


def _apex_split(p, q) -> tuple[tuple[float, float], tuple[float, float], Color]:
    """Return (apex, other, apex colour): the apex has the other point in a positive cone."""
    pxy, qxy = _xy(p), _xy(q)
    k = cone_index(*pxy, *qxy)
    if IS_POSITIVE[k]:
        return pxy, qxy, CONE_COLOR[k]
    return qxy, pxy, CONE_COLOR[k]


def smallest_homothet(p, q) -> Homothet:
    """The triangle realising ``tri_dist(p, q)``, with the apex point at a vertex."""
    apex, _, color = _apex_split(p, q)
    return homothet_at(apex, color, tri_dist(p, q))


@dataclass(frozen=True)
class DeltaValues:
    """Distances from the non-apex vertices of the smallest homothet to the far point."""

    d_tri: float
    apex_color: Color
    c2: Color
    c3: Color
    delta_c2: float
    delta_c3: float

    @property
    def delta_min(self) -> float:
        return min(self.delta_c2, self.delta_c3)

    def delta(self, color) -> float:
        color = Color(color)
        if color is self.apex_color:
            raise UndefinedDelta(color)
        return self.delta_c2 if color is self.c2 else self.delta_c3

    @property
    def delta_blue(self) -> float:
        return self.delta(Color.BLUE)

    @property
    def delta_white(self) -> float:
        return self.d_tri - self.delta_blue


def delta_values(u, v) -> DeltaValues:
    """Vertex distances of the smallest homothet of u and v (symmetric in u, v)."""
    apex, other, color = _apex_split(u, v)
    side = tri_dist(u, v)
    tri = homothet_at(apex, color, side)
    i = _CLOCKWISE.index(color)
    c2, c3 = _CLOCKWISE[(i + 1) % 3], _CLOCKWISE[(i + 2) % 3]
    y, z = tri.vertex(c2), tri.vertex(c3)
    return DeltaValues(
        d_tri=side,
        apex_color=color,
        c2=c2,
        c3=c3,
        delta_c2=math.hypot(y[0] - other[0], y[1] - other[1]),
        delta_c3=math.hypot(z[0] - other[0], z[1] - other[1]),
    )


# --------------------------------------------------------------------------
# General position
# --------------------------------------------------------------------------

ROTATION_STEP = 1e-3 * (math.sqrt(5.0) - 1.0)
MAX_ROTATION_STEPS = 64


def rotate_xy(xs: np.ndarray, ys: np.ndarray, angle: float) -> tuple[np.ndarray, np.ndarray]:
    c, s = math.cos(angle), math.sin(angle)
    return c * xs - s * ys, s * xs + c * ys


def rotate_points(points: Sequence[Point], angle: float) -> list[Point]:
    """Rotate about the origin; ``angle == 0`` returns the points unchanged."""
    if angle == 0.0:
        return list(points)
    c, s = math.cos(angle), math.sin(angle)
    return [Point(p.id, c * p.x - s * p.y, s * p.x + c * p.y) for p in points]


def is_general_position(xs: np.ndarray, ys: np.ndarray, tol: float = BOUNDARY_TOL) -> bool:
    """No two points on a line parallel to a cone boundary (0, 60 or 120 degrees).

    A pair at angle ``a`` from a boundary direction has normal offset
    ``|pq| sin a``, so flagging every sorted-neighbour offset below
    ``tol * diameter`` is conservative for the angular test.  The same lines
    are perpendicular to the positive-cone bisectors, so this also rules out
    ties in triangular distance inside a cone.
    """
    n = len(xs)
    if n < 2:
        return True
    scale = math.hypot(float(np.ptp(xs)), float(np.ptp(ys)))
    if scale == 0.0:
        return False
    limit = tol * scale
    for phi in (0.0, SIXTY, 2.0 * SIXTY):
        proj = -math.sin(phi) * xs + math.cos(phi) * ys
        gaps = np.diff(np.sort(proj))
        if gaps.min() <= limit:
            return False
    return True


def ensure_general_position(points: Sequence[Point]) -> tuple[list[Point], float]:
    """Rotate by the first angle of the schedule ``m * ROTATION_STEP`` that works."""
    points = list(points)
    xs = np.array([p.x for p in points], dtype=float)
    ys = np.array([p.y for p in points], dtype=float)
    for m in range(MAX_ROTATION_STEPS + 1):
        angle = m * ROTATION_STEP
        rx, ry = rotate_xy(xs, ys, angle)
        if is_general_position(rx, ry):
            if m == 0:
                return points, 0.0
            return [Point(p.id, float(x), float(y)) for p, x, y in zip(points, rx, ry)], angle
    raise GeneralPositionFailure(
        f"no rotation among {MAX_ROTATION_STEPS} schedule steps gives general position"
        " (duplicate points?)"
    )
