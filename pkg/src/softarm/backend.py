"""Kernel backend selection.

The hot numerical kernels exist twice: a compiled extension
(``softarm._core``, built from Cython) and a pure-Python twin
(``softarm._kernels_py``). The compiled one is picked at import when
available; ``SOFTARM_BACKEND=pure|compiled`` overrides, and tests or
benchmarks can switch explicitly with :func:`use`.
"""

import os

from . import _kernels_py

_KERNEL_SURFACE = (
    "segment_rotation",
    "segment_translation",
    "chain_frames",
    "tip_position",
    "tendon_lengths",
    "tendon_jacobian",
    "quat_from_matrix",
    "arc_from_quat",
    "quat_multiply",
    "position_jacobian",
)

_BACKENDS = {"pure": _kernels_py}

try:
    from . import _core
except ImportError:
    _core = None
else:
    if all(hasattr(_core, name) for name in _KERNEL_SURFACE):
        _BACKENDS["compiled"] = _core

_active_name = None
_active = None


def available():
    """Names of the backends importable in this environment."""
    return sorted(_BACKENDS)


def use(name):
    """Select a backend by name ('pure', 'compiled' or 'auto')."""
    global _active_name, _active
    if name == "auto":
        name = "compiled" if "compiled" in _BACKENDS else "pure"
    if name not in _BACKENDS:
        raise ValueError(f"unknown backend {name!r}; available: {available()}")
    _active_name = name
    _active = _BACKENDS[name]
    return _active


def kernels():
    """The active kernel module."""
    return _active


def active_name():
    return _active_name


use(os.environ.get("SOFTARM_BACKEND", "auto"))
