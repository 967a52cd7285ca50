"""Kernel backend selection.

The compiled extension is used when importable; ``HLINEQ_PURE=1`` forces
the numpy fallback.  ``BACKEND`` names the active one.
"""

import os

from hlineq import _pure

BACKEND = "python"
collapse = _pure.collapse
sign_enum = _pure.sign_enum

if os.environ.get("HLINEQ_PURE", "") not in ("1", "true", "yes"):
    try:
        from hlineq import _core
    except ImportError:  # extension not built
        _core = None
    if _core is not None:
        BACKEND = "cython"
        collapse = _core.collapse
        sign_enum = _core.sign_enum


def backends():
    """Mapping of every importable backend name to its ``(collapse, sign_enum)``."""
    out = {"python": (_pure.collapse, _pure.sign_enum)}
    try:
        from hlineq import _core as core
    except ImportError:
        return out
    out["cython"] = (core.collapse, core.sign_enum)
    return out
