"""Exception types shared across the package.

The CLI maps ConfigError to exit code 2 and NumericsError (including its
subclasses) to exit code 3.
"""
from __future__ import annotations


class ConfigError(ValueError):
    """Malformed, unknown, or out-of-range configuration input."""


class NumericsError(RuntimeError):
    """A numerical procedure failed to meet its contract."""


class RootFindError(NumericsError):
    """Root bracketing or refinement failed."""


class DegenerateSpectrumError(NumericsError):
    """Two spectral values coincide within the resolvable tolerance."""


class UndersampledError(NumericsError):
    """A time grid is too coarse for the fastest retained mode."""
