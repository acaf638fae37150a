"""Kernel backend selection.

The compiled extension is used when importable; set ``RISAMBC_PURE=1`` to
force the pure-Python fallback.
"""
import os

from . import _pycore

try:
    from . import _core as _compiled
except ImportError:  # extension not built
    _compiled = None

if _compiled is not None and not os.environ.get("RISAMBC_PURE"):
    core = _compiled
    NAME = "compiled"
else:
    core = _pycore
    NAME = "python"


def available():
    """Mapping of backend name to kernel module for every importable backend."""
    out = {"python": _pycore}
    if _compiled is not None:
        out["compiled"] = _compiled
    return out
