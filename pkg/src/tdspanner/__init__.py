"""Degree-4 plane spanners of the TD-Delaunay (half-theta-six) graph.

Typical use::

    from tdspanner import build_spanner, make_points, verify_spanner
    s, d = build_spanner(make_points([(0, 0), (0, 2), (2, 0.5)]))
    report = verify_spanner(s, d, bounds=True, charging=True)
"""
from .construct import EdgeKind, SpannerEdge, SpannerGraph, build_spanner
from .delaunay import TdGraph, build_td
from .generators import GenSpec, generate
from .geometry import Point, make_points, tri_dist
from .verify import VerificationReport, verify_spanner

__all__ = [
    "EdgeKind",
    "GenSpec",
    "Point",
    "SpannerEdge",
    "SpannerGraph",
    "TdGraph",
    "VerificationReport",
    "build_spanner",
    "build_td",
    "generate",
    "make_points",
    "tri_dist",
    "verify_spanner",
]
__version__ = "0.1.0"
