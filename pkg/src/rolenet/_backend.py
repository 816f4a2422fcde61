"""Kernel backend selection.

The compiled extension is used when available; set ``ROLENET_BACKEND=python``
to force the pure-numpy fallback (used by the backend-equivalence tests and
the benchmark).
"""

from __future__ import annotations

import os

from . import _kernels_py


def _select():
    if os.environ.get("ROLENET_BACKEND", "").lower() == "python":
        return _kernels_py
    try:
        from . import _speedups
        return _speedups
    except ImportError:
        return _kernels_py


kernels = _select()

BACKEND_NAME = kernels.BACKEND_NAME


def get_backend(name: str | None = None):
    """Return a kernel module by name ('cython', 'python', or None=current)."""
    if name is None:
        return kernels
    if name == "python":
        return _kernels_py
    if name == "cython":
        from . import _speedups
        return _speedups
    raise ValueError(f"unknown backend {name!r}")
