"""Kernel backend selection.

The compiled Cython module is used when it imports; otherwise the numpy
fallback. ``ENCODED_GATES_BACKEND=python`` forces the fallback.
"""

from __future__ import annotations

import importlib
import os
from types import ModuleType

_NAMES = {"cython": "encoded_gates._ckernels", "python": "encoded_gates._pykernels"}


def load(name: str) -> ModuleType:
    if name not in _NAMES:
        raise ValueError(f"unknown kernel backend {name!r}")
    return importlib.import_module(_NAMES[name])


def available() -> list[str]:
    found = []
    for name in _NAMES:
        try:
            load(name)
        except ImportError:
            continue
        found.append(name)
    return found


def _select() -> tuple[str, ModuleType]:
    wanted = os.environ.get("ENCODED_GATES_BACKEND", "").strip().lower()
    if wanted:
        return wanted, load(wanted)
    try:
        return "cython", load("cython")
    except ImportError:
        return "python", load("python")


BACKEND, impl = _select()


def set_backend(name: str) -> None:
    """Switch the process-wide backend (benchmarks and cross-checks)."""
    global BACKEND, impl
    impl = load(name)
    BACKEND = name
