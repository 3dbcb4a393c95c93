"""Backend selection for the hot packet-simulation kernel.

The env flag BONDSIM_BACKEND picks the implementation:

    numba   JIT kernel (error if numba is not importable)
    numpy   vectorized pure-NumPy fallback
    auto    numba when importable, else numpy (default)

Both backends produce identical outputs for the same inputs.
"""

from __future__ import annotations

import os

from .errors import ConfigurationError

BACKEND_ENV = "BONDSIM_BACKEND"


def get_backend(name: str):
    """Import and return the backend module for an explicit name."""
    key = name.strip().lower()
    if key == "numpy":
        from . import _engine_numpy

        return _engine_numpy
    if key == "numba":
        from . import _engine_numba

        return _engine_numba
    raise ConfigurationError(f"unknown backend {name!r}; valid backends: numba, numpy")


def _resolve(requested: str):
    key = (requested or "auto").strip().lower()
    if key in ("", "auto"):
        try:
            return get_backend("numba"), "numba"
        except ImportError:
            return get_backend("numpy"), "numpy"
    return get_backend(key), key


_impl, BACKEND = _resolve(os.environ.get(BACKEND_ENV, "auto"))

simulate_packets = _impl.simulate_packets


def backend_name() -> str:
    return BACKEND
