"""Hot kernels with a numba path and a pure-numpy fallback.

The numba path is used when numba imports cleanly and the environment
variable ``CPGRAPH_DISABLE_NUMBA`` is unset (or ``0``). Both backends stay
importable as ``numba_backend`` / ``numpy_backend`` for benchmarking.
"""
import os

from . import _numpy as numpy_backend

try:
    from . import _numba as numba_backend
except ImportError:  # pragma: no cover - numba missing
    numba_backend = None

_disabled = os.environ.get("CPGRAPH_DISABLE_NUMBA", "0").strip().lower() not in ("", "0", "false", "no")

USE_NUMBA = numba_backend is not None and not _disabled
backend = numba_backend if USE_NUMBA else numpy_backend
BACKEND_NAME = "numba" if USE_NUMBA else "numpy"

bisect_shift = backend.bisect_shift
quic_direction = backend.quic_direction
core_numbers = backend.core_numbers

__all__ = [
    "BACKEND_NAME",
    "USE_NUMBA",
    "bisect_shift",
    "core_numbers",
    "numba_backend",
    "numpy_backend",
    "quic_direction",
]
