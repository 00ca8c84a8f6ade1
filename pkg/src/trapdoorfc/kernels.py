"""Backend selection for the hot search loops.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` fallback. Set ``TRAPDOORFC_PURE=1`` to force the
fallback.
"""
from __future__ import annotations

import os
from types import ModuleType

from . import _pykernels

try:
    from . import _ckernels
except ImportError:  # extension not built
    _ckernels = None

OPTIMAL, INFEASIBLE, BUDGET = _pykernels.OPTIMAL, _pykernels.INFEASIBLE, _pykernels.BUDGET


def available() -> dict[str, ModuleType]:
    out = {"python": _pykernels}
    if _ckernels is not None:
        out["cython"] = _ckernels
    return out


_active: ModuleType = _pykernels if (_ckernels is None or os.environ.get("TRAPDOORFC_PURE")) else _ckernels


def backend() -> ModuleType:
    return _active


def use(name: str) -> ModuleType:
    """Switch backend by name (``"python"`` or ``"cython"``); returns the old one."""
    global _active
    mods = available()
    if name not in mods:
        raise ValueError(f"kernel backend {name!r} is not available (have {sorted(mods)})")
    old, _active = _active, mods[name]
    return old
