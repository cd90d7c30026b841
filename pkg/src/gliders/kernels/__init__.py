"""Kernel dispatch.

The numba path is used when numba imports cleanly and the environment
variable ``GLIDERS_DISABLE_NUMBA`` is unset (or set to ``0``/``false``).
Both backends stay importable so they can be compared directly::

    from gliders.kernels import numpy_backend, numba_backend
"""
import os

import numpy as np

from . import _numpy as numpy_backend

_DISABLE = os.environ.get("GLIDERS_DISABLE_NUMBA", "").strip().lower() not in ("", "0", "false", "no")

try:
    from . import _numba as numba_backend
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba_backend = None
    NUMBA_AVAILABLE = False

USE_NUMBA = NUMBA_AVAILABLE and not _DISABLE
backend = numba_backend if USE_NUMBA else numpy_backend
BACKEND_NAME = "numba" if USE_NUMBA else "numpy"

KIND_BERNOULLI = numpy_backend.KIND_BERNOULLI
KIND_MARKOV = numpy_backend.KIND_MARKOV
KIND_PERIODIC = numpy_backend.KIND_PERIODIC
KIND_PERIODIC_PHASE = numpy_backend.KIND_PERIODIC_PHASE


def get_backend(name=None):
    """Return a backend module by name (``"numba"``/``"numpy"``), or the active one."""
    if name is None:
        return backend
    if name == "numpy":
        return numpy_backend
    if name == "numba":
        if numba_backend is None:
            raise RuntimeError("numba backend requested but numba is not importable")
        return numba_backend
    raise ValueError(f"unknown backend {name!r}")


def as_seed(seed):
    return np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF)


__all__ = [
    "backend", "numpy_backend", "numba_backend", "get_backend", "as_seed",
    "USE_NUMBA", "NUMBA_AVAILABLE", "BACKEND_NAME",
]
