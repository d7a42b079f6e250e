"""Numba switch for the hot kernels.

Every kernel exists twice: a vectorised numpy version and a scalar-loop
version compiled with ``numba.njit``. ``USE_NUMBA`` picks which one the
public dispatchers call; set ``COSHLIBOR_DISABLE_NUMBA=1`` before import to
force the numpy path.
"""

from __future__ import annotations

import os

try:
    import numba

    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover
    numba = None
    NUMBA_AVAILABLE = False


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = NUMBA_AVAILABLE and not _env_flag("COSHLIBOR_DISABLE_NUMBA")


def compile_kernel(func):
    """Return the ``njit``-compiled twin of ``func`` or ``None`` without numba.

    Compilation happens lazily on first call and is cached on disk.
    """
    if not NUMBA_AVAILABLE:
        return None
    return numba.njit(cache=True, nogil=True)(func)
