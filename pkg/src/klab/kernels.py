"""Backend selection for the grid kernels.

The compiled extension is used when it imports; otherwise the numpy fallback.
Set ``KLAB_PURE_PYTHON=1`` to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

import numpy as np

from . import _kernels_py

_compiled: ModuleType | None
try:
    from . import _kernels as _compiled  # type: ignore[attr-defined]
except ImportError:  # pragma: no cover - depends on build
    _compiled = None

if _compiled is not None and not os.environ.get("KLAB_PURE_PYTHON"):
    _impl: ModuleType = _compiled
    BACKEND = "cython"
else:
    _impl = _kernels_py
    BACKEND = "python"

_INT_LIMIT = 1 << 31


def get_backend(name: str) -> ModuleType:
    """Return a kernel module by name (``"cython"`` or ``"python"``)."""
    if name == "python":
        return _kernels_py
    if name == "cython":
        if _compiled is None:
            raise ImportError("compiled kernels are not built")
        return _compiled
    raise ValueError(f"unknown backend {name!r}")


def compiled_available() -> bool:
    return _compiled is not None


def interp(samples: np.ndarray, periodic: bool, x) -> np.ndarray:
    return _impl.interp(np.ascontiguousarray(samples, dtype=np.float64), bool(periodic), x)


def orbit_sum(samples: np.ndarray, order: int, start: int, stop: int, stride: int = 1):
    """Sum of a periodic grid function over ``(stride*j mod order)/order``, ``start <= j < stop``.

    ``samples`` may be 1-D (returns a float) or 2-D (returns one sum per row).
    """
    if order >= _INT_LIMIT:
        raise OverflowError("orbit order too large for 64-bit index arithmetic")
    s = np.ascontiguousarray(samples, dtype=np.float64)
    single = s.ndim == 1
    if single:
        s = s[None, :]
    out = _impl.orbit_sum(s, int(order), int(start), int(stop), int(stride) % int(order))
    return float(out[0]) if single else np.asarray(out)


def winding_gather(samples: np.ndarray, w: int, n_out: int, n_nodes: int) -> np.ndarray:
    """Node values ``f((w*k mod n_out)/n_out)`` for ``k < n_nodes`` of a periodic ``f``."""
    s = np.ascontiguousarray(samples, dtype=np.float64)
    return np.asarray(_impl.winding_gather(s, int(w) % int(n_out), int(n_out), int(n_nodes)))
