"""Kernel backend selection.

Two interchangeable implementations of the hot decoder loops exist:
``numba`` (jitted, default when importable) and ``numpy`` (pure vectorized
fallback).  Select with the ``PACLAB_BACKEND`` environment variable or at
runtime with :func:`use_backend`.
"""

from __future__ import annotations

import os
import warnings

from . import numpy_backend

_BACKENDS = {"numpy": numpy_backend}

try:
    from . import numba_backend
    _BACKENDS["numba"] = numba_backend
    _DEFAULT = "numba"
except ImportError:  # numba not installed; numpy path still works
    _DEFAULT = "numpy"

_requested = os.environ.get("PACLAB_BACKEND", "").strip().lower()
if _requested:
    if _requested in _BACKENDS:
        _DEFAULT = _requested
    else:
        warnings.warn(
            f"PACLAB_BACKEND={_requested!r} unavailable, using {_DEFAULT}",
            RuntimeWarning,
        )

_active = _BACKENDS[_DEFAULT]


def available_backends() -> tuple:
    return tuple(sorted(_BACKENDS))


def use_backend(name: str):
    """Switch the active kernel backend; returns the backend module."""
    global _active
    key = name.strip().lower()
    if key not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; have {available_backends()}")
    _active = _BACKENDS[key]
    return _active


def active_backend():
    return _active
