"""Shared fixtures: warm the compiled backend once per session.

The acceptance tests assert wall-clock budgets.  When the compiled backend
is active, its first kernel invocations pay a one-time compilation cost
that says nothing about algorithmic speed, so trigger it here before any
timed test runs.  With the pure-numpy backend this is a no-op cost-wise.
"""
from __future__ import annotations

import numpy as np
import pytest

from icesim import _backend


@pytest.fixture(scope="session", autouse=True)
def warm_backend():
    k = _backend.kernels
    t = np.linspace(0.0, 1.0, 16)
    dt = t[1] - t[0]
    f_c = np.ones((2, 16), dtype=np.complex128)
    f_r = np.ones((2, 16), dtype=np.float64)
    omegas = np.array([0.0, 3.0])
    k.bessel_j_array(0.5, t + 0.5)
    k.cumtrapz_batch(f_c, dt)
    k.sin_conv_batch(omegas, f_c, t, dt)
    k.sin_conv_batch(omegas, f_r, t, dt)
    k.damped_conv_batch(1.0, np.array([4.0, -4.0]), f_c, t, dt)
    k.damped_conv_batch(1.0, np.array([0.0]), f_c[:1], t, dt)
    yield
