"""Compute-backend selection.

The package ships two implementations of its numeric kernels: a numba-compiled
one and a pure-numpy one. Selection happens once at import:

* ``ICESIM_NUMBA=0`` (or ``false``/``off``/``no``) forces the numpy backend;
* anything else (including unset) uses numba when it imports cleanly and
  falls back to numpy otherwise.

``kernels`` is the selected module; ``backend_name()`` reports which one won
(recorded in CSV headers, since backends may differ in the last float ulp).
"""
from __future__ import annotations

import os

_flag = os.environ.get("ICESIM_NUMBA", "auto").strip().lower()

USING_NUMBA = False
if _flag not in ("0", "false", "off", "no"):
    try:
        from . import _kernels_numba as kernels  # noqa: F401
        USING_NUMBA = True
    except Exception:  # numba missing or failed to compile
        from . import _kernels_numpy as kernels  # noqa: F401
else:
    from . import _kernels_numpy as kernels  # noqa: F401


def backend_name() -> str:
    return "numba" if USING_NUMBA else "numpy"
