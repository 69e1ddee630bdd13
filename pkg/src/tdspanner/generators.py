"""Deterministic point-set generators for fuzzing, fixtures and benchmarks.

Every generator draws from its own ``random.Random(seed)`` (Mersenne Twister),
so the same spec yields the same coordinates on every platform.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass

from .errors import InvalidSpec
from .geometry import Point, make_points

KINDS = ("uniform", "convex", "grid", "clustered", "lower_bound_rect")

# Size of the inward bend applied to the two sides of the rectangle fixture.
RECT_PERTURBATION = 1e-6


@dataclass(frozen=True)
class GenSpec:
    """What to generate.

    ``n`` is ignored by ``lower_bound_rect`` (its size follows from ``rho``)
    and by ``grid`` when ``rows`` and ``cols`` are both given.
    """

    kind: str
    n: int = 0
    seed: int = 0
    rho: float | None = None
    rows: int | None = None
    cols: int | None = None
    clusters: int = 5
    sigma: float = 0.03

    def validate(self) -> None:
        if self.kind not in KINDS:
            raise InvalidSpec(f"unknown kind {self.kind!r}; expected one of {', '.join(KINDS)}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise InvalidSpec(f"seed must be an integer in [0, 2^64), got {self.seed!r}")
        if not isinstance(self.n, int) or self.n < 0:
            raise InvalidSpec(f"n must be a non-negative integer, got {self.n!r}")
        if self.kind == "lower_bound_rect":
            if self.rho is None or not math.isfinite(self.rho) or self.rho < 1:
                raise InvalidSpec(f"lower_bound_rect needs a finite rho >= 1, got {self.rho!r}")
        if self.kind == "grid":
            for name in ("rows", "cols"):
                val = getattr(self, name)
                if val is not None and (not isinstance(val, int) or val < 0):
                    raise InvalidSpec(f"{name} must be a non-negative integer, got {val!r}")
        if self.kind == "clustered":
            if self.clusters < 1:
                raise InvalidSpec(f"clusters must be >= 1, got {self.clusters}")
            if not self.sigma > 0:
                raise InvalidSpec(f"sigma must be positive, got {self.sigma}")


def uniform(n: int, rng: random.Random) -> list[tuple[float, float]]:
    return [(rng.random(), rng.random()) for _ in range(n)]


def convex(n: int, rng: random.Random) -> list[tuple[float, float]]:
    """Unit circle, one point per angular slot with jitter under half a slot."""
    out = []
    for i in range(n):
        t = 2.0 * math.pi * (i + rng.uniform(-0.4, 0.4)) / n
        out.append((math.cos(t), math.sin(t)))
    return out


def grid(rows: int, cols: int) -> list[tuple[float, float]]:
    return [(float(c), float(r)) for r in range(rows) for c in range(cols)]


def clustered(n: int, k: int, sigma: float, rng: random.Random) -> list[tuple[float, float]]:
    centres = [(rng.random(), rng.random()) for _ in range(k)]
    out = []
    for _ in range(n):
        cx, cy = centres[rng.randrange(k)]
        out.append((rng.gauss(cx, sigma), rng.gauss(cy, sigma)))
    return out


def rect_parameters(rho: float) -> tuple[int, int]:
    """Width ``b`` and points per side ``N`` for the degree-2 lower-bound rectangle."""
    b = math.floor(rho) + 1
    big_n = 3 * (math.ceil(rho) * b + 1) + 1
    return b, big_n


def lower_bound_rect(rho: float) -> list[tuple[float, float]]:
    """Two vertical columns of N unit-spaced points, ``b`` apart, bent inwards.

    Point i of the left column is pushed right by ``eps * t_i**2`` with
    ``t_i`` running over [-1, 1], and mirrored on the right column.  The bend
    makes each column a strictly convex chain, so the whole set is in convex
    position, while moving no point by more than ``RECT_PERTURBATION``.
    Order: p_1..p_N bottom to top, then q_1..q_N bottom to top.
    """
    b, big_n = rect_parameters(rho)
    half = (big_n - 1) / 2.0
    bend = [RECT_PERTURBATION * ((i - half) / half) ** 2 for i in range(big_n)]
    left = [(bend[i], float(i)) for i in range(big_n)]
    right = [(b - bend[i], float(i)) for i in range(big_n)]
    return left + right


def generate(spec: GenSpec) -> list[Point]:
    spec.validate()
    rng = random.Random(spec.seed)
    if spec.kind == "uniform":
        coords = uniform(spec.n, rng)
    elif spec.kind == "convex":
        coords = convex(spec.n, rng)
    elif spec.kind == "grid":
        if spec.rows is not None and spec.cols is not None:
            coords = grid(spec.rows, spec.cols)
        else:
            side = math.isqrt(spec.n)
            side += side * side < spec.n
            coords = grid(side, side)[: spec.n]
    elif spec.kind == "clustered":
        coords = clustered(spec.n, spec.clusters, spec.sigma, rng)
    else:
        coords = lower_bound_rect(spec.rho)
    return make_points(coords)
