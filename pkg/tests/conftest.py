import math
import random

import pytest
from hypothesis import HealthCheck, settings, strategies as st

from tdspanner.geometry import make_points

settings.register_profile(
    "default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow]
)
settings.load_profile("default")

# name -> (passed, detail); filled by test_acceptance.py, printed at the end.
ACCEPTANCE: dict[str, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(ACCEPTANCE, key=lambda k: int(k.split(".")[0])):
        ok, detail = ACCEPTANCE[name]
        terminalreporter.write_line(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}")


THREE_POINTS = [(0.0, 0.0), (0.0, 2.0), (2.0, 0.5)]  # p, q, r


@pytest.fixture
def three_points():
    return make_points(THREE_POINTS)


def random_points(n, seed, kind="uniform"):
    rng = random.Random(seed)
    if kind == "uniform":
        coords = [(rng.random(), rng.random()) for _ in range(n)]
    elif kind == "convex":
        coords = []
        for i in range(n):
            t = 2 * math.pi * (i + rng.uniform(-0.4, 0.4)) / n
            coords.append((math.cos(t), math.sin(t)))
    else:
        raise ValueError(kind)
    return make_points(coords)


coordinate = st.floats(min_value=-1e3, max_value=1e3, allow_nan=False, allow_infinity=False)
# Unit-square coordinates on a 1e-6 lattice: near-duplicates far below the
# general-position tolerance cannot be rotated apart and are not interesting.
unit = st.integers(min_value=0, max_value=10**6).map(lambda k: k / 10**6)


@st.composite
def point_sets(draw, min_size=1, max_size=40):
    """Distinct points, mostly uniform, sometimes on a coarse lattice (degenerate)."""
    if draw(st.booleans()):
        coords = draw(st.lists(st.tuples(unit, unit), min_size=min_size, max_size=max_size,
                               unique=True))
    else:
        cell = st.integers(min_value=0, max_value=8)
        coords = draw(st.lists(st.tuples(cell, cell), min_size=min_size, max_size=max_size,
                               unique=True))
    return make_points(coords)
