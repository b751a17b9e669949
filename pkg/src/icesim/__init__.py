"""icesim: modal simulator for an acoustic cavity coupling two damped membranes.

A cylindrical air cavity of length L is closed at both ends by damped
sectorial membranes. The package evaluates the first-order interaction of the
interior sound field with the membranes: eigenbases on the stationary
geometry, quasi-stationary response amplitudes, a fixed-point (iterated
convolution) time-domain solver, a spinning-mode/piston reduction of the
pressure field, and the startup-transient analysis that yields the system's
relaxation time.
"""
from __future__ import annotations

from ._backend import USING_NUMBA, backend_name

__version__ = "0.1.0"

__all__ = ["USING_NUMBA", "backend_name", "__version__"]
