"""Optional numba acceleration.

Set ``MATHIEU_LATTICE_NUMBA=0`` to force the pure-numpy code paths. When numba
is not installed the numpy paths are used regardless of the flag.
"""

import os

try:
    import numba
except ImportError:  # pragma: no cover - exercised only without numba
    numba = None

_FALSE = {"0", "false", "no", "off"}

HAVE_NUMBA = numba is not None
USE_NUMBA = HAVE_NUMBA and os.environ.get("MATHIEU_LATTICE_NUMBA", "1").strip().lower() not in _FALSE


def njit(func):
    """Compile ``func`` with numba if available, else return it unchanged."""
    if not HAVE_NUMBA:
        return func
    # no fastmath: the QL deflation test relies on exact IEEE comparisons
    return numba.njit(cache=True, nogil=True)(func)


def resolve_backend(backend=None):
    """Map ``None``/"numba"/"numpy" to the backend actually used."""
    if backend is None:
        return "numba" if USE_NUMBA else "numpy"
    if backend not in ("numba", "numpy"):
        raise ValueError(f"unknown backend {backend!r}")
    if backend == "numba" and not HAVE_NUMBA:
        raise RuntimeError("numba backend requested but numba is not installed")
    return backend


def thread_cap():
    """Worker count from ``MATHIEU_LATTICE_THREADS`` (0 or unset means cpu count)."""
    raw = os.environ.get("MATHIEU_LATTICE_THREADS", "").strip()
    try:
        n = int(raw) if raw else 0
    except ValueError:
        from .errors import ConfigurationError

        raise ConfigurationError(f"MATHIEU_LATTICE_THREADS must be an integer, got {raw!r}") from None
    if n <= 0:
        n = os.cpu_count() or 1
    return n
