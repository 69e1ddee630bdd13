"""Optional numba acceleration.

``try_njit`` compiles a function with numba when it is importable and leaves
it as plain Python otherwise.  The undecorated function stays reachable as
``f.py_func`` either way, so tests can exercise the interpreted path.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

HAVE_NUMBA = numba is not None and os.environ.get("TDSPANNER_DISABLE_NUMBA", "") != "1"


def try_njit(*args, **kwargs):
    def decorate(f):
        if not HAVE_NUMBA:
            f.py_func = f
            return f
        return numba.njit(**kwargs)(f)

    if len(args) == 1 and callable(args[0]) and not kwargs:
        return decorate(args[0])
    return decorate
