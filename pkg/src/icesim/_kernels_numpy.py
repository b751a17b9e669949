"""Pure-numpy compute kernels.

This module and `_kernels_numba` implement the same numerical surface; the
active one is chosen in `_backend`. Keep the two in sync: the test suite
cross-checks them (to 1e-10 relative for the cylinder functions, whose series
cancellation amplifies libm-vs-SIMD ulp differences; 1e-12 elsewhere).

Kernel surface
--------------
bessel_j_array(q, x)          cylinder function J_q on a 1-D grid, q >= 0
cumtrapz_batch(F, dt)         running trapezoid integral along axis 1
sin_conv_batch(omegas, F, t, dt)
    rows of int_0^{t_i} sin(omega (t_i - tau)) / omega * F(tau) dtau
    (omega = 0 degenerates to the (t_i - tau) kernel); each step integrates
    the piecewise-linear interpolant of F against the oscillatory kernel
    exactly, so the error is set by how well the grid resolves F itself,
    not by omega * dt
damped_conv_batch(alpha, wr2s, F, t, dt)
    rows of int_0^{t_i} exp(-alpha (t_i - tau)) s(t_i - tau) F(tau) dtau where
    s is sin(w_r .)/w_r, sinh(kappa .)/kappa, or (.) as wr2 >,<,= 0
"""
from __future__ import annotations

import math

import numpy as np

_SERIES_FLOOR = 12.0  # series/asymptotic crossover is max(12, 2q)


def _series_vec(q: float, x: np.ndarray) -> np.ndarray:
    """Ascending power series; adequate below the crossover."""
    z = 0.5 * x
    if q == 0.0:
        term = np.ones_like(x)
    else:
        term = np.zeros_like(x)
        pos = x > 0.0
        if pos.any():
            term[pos] = np.exp(q * np.log(z[pos]) - math.lgamma(q + 1.0))
    total = term.copy()
    scale = np.abs(term)
    z2 = z * z
    for m in range(1, 400):
        term = term * (-z2) / (m * (m + q))
        total += term
        a = np.abs(term)
        np.maximum(scale, a, out=scale)
        if np.all(a <= 1e-17 * scale):
            break
    return total


def _hankel_vec(nu: float, x: np.ndarray) -> np.ndarray:
    """Large-argument expansion at order nu <= 2, optimally truncated per point."""
    mu4 = 4.0 * nu * nu
    chi = x - (0.5 * nu + 0.25) * math.pi
    p = np.ones_like(x)
    q = np.zeros_like(x)
    ak = 1.0
    xpow = np.ones_like(x)
    last = np.full_like(x, np.inf)
    active = np.ones(x.shape, dtype=bool)
    for k in range(1, 80):
        ak *= (mu4 - (2 * k - 1) ** 2) / (8.0 * k)
        xpow = xpow / x
        term = ak * xpow
        mag = np.abs(term)
        if k > 4:
            active &= mag < last
        if not active.any():
            break
        r = k % 4
        if r == 0:
            p[active] += term[active]
        elif r == 1:
            q[active] += term[active]
        elif r == 2:
            p[active] -= term[active]
        else:
            q[active] -= term[active]
        last = np.where(active, mag, last)
        active &= mag >= 1e-18
        if not active.any():
            break
    return np.sqrt(2.0 / (math.pi * x)) * (p * np.cos(chi) - q * np.sin(chi))


def _asym_vec(q: float, x: np.ndarray) -> np.ndarray:
    if q <= 2.0:
        return _hankel_vec(q, x)
    # reduce to base orders in [0, 2), then recurse upward (stable for x >= 2q)
    q0 = q - math.floor(q)
    ja = _hankel_vec(q0, x)
    jb = _hankel_vec(q0 + 1.0, x)
    steps = int(round(q - q0 - 1.0))
    nu = q0 + 1.0
    for _ in range(steps):
        ja, jb = jb, (2.0 * nu / x) * jb - ja
        nu += 1.0
    return jb


def bessel_j_array(q: float, x: np.ndarray) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    xc = max(_SERIES_FLOOR, 2.0 * q)
    small = x < xc
    if small.any():
        out[small] = _series_vec(q, x[small])
    large = ~small
    if large.any():
        out[large] = _asym_vec(q, x[large])
    return out


def _cumtrapz_row(f: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty_like(f)
    out[0] = 0.0
    np.cumsum(0.5 * dt * (f[1:] + f[:-1]), out=out[1:])
    return out


def cumtrapz_batch(F: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty_like(F)
    for i in range(F.shape[0]):
        out[i] = _cumtrapz_row(F[i], dt)
    return out


def _filon_ab(theta: float) -> tuple[complex, complex]:
    """Endpoint weights of int_0^1 {1-u, u} e^{i theta u} du.

    The closed forms lose ~theta^-2 digits to cancellation, so small angles
    switch to the ascending series.
    """
    if abs(theta) < 0.5:
        a = 0.0 + 0.0j
        b = 0.0 + 0.0j
        term = 1.0 + 0.0j  # (i theta)^k / k!
        for k in range(24):
            a += term / ((k + 1) * (k + 2))
            b += term / (k + 2)
            term *= 1j * theta / (k + 1)
            if abs(term) < 1e-20:
                break
        return a, b
    e = np.exp(1j * theta)
    b = (e * (1.0 - 1j * theta) - 1.0) / (theta * theta)
    a = -1j * (e - 1.0) / theta - b
    return a, b


def _ramp_moments_row(f: np.ndarray, t: np.ndarray, dt: float) -> np.ndarray:
    """t_i * int_0^{t_i} f - int_0^{t_i} tau f, exact for piecewise-linear f."""
    m0 = np.empty_like(f)
    m1 = np.empty_like(f)
    m0[0] = 0.0
    m1[0] = 0.0
    np.cumsum(0.5 * dt * (f[:-1] + f[1:]), out=m0[1:])
    np.cumsum(dt * (t[:-1] * 0.5 * (f[:-1] + f[1:])
                    + dt * (f[:-1] / 6.0 + f[1:] / 3.0)), out=m1[1:])
    return t * m0 - m1


def _osc_moment_row(f: np.ndarray, w: float, t: np.ndarray,
                    dt: float, sign: float) -> np.ndarray:
    """Running int_0^{t_i} f(tau) e^{i sign w tau} dtau for piecewise-linear f."""
    a, b = _filon_ab(sign * w * dt)
    phase = np.exp(1j * sign * w * t[:-1])
    seg = dt * phase * (a * f[:-1] + b * f[1:])
    m = np.empty(f.shape[0], dtype=np.complex128)
    m[0] = 0.0
    np.cumsum(seg, out=m[1:])
    return m


def sin_conv_batch(omegas: np.ndarray, F: np.ndarray, t: np.ndarray,
                   dt: float) -> np.ndarray:
    out = np.empty_like(F)
    is_complex = np.iscomplexobj(F)
    for i in range(F.shape[0]):
        w = omegas[i]
        f = F[i]
        if w == 0.0:
            out[i] = _ramp_moments_row(f, t, dt)
        else:
            # sin(w(t-tau)) = sin(wt)cos(w tau) - cos(wt)sin(w tau); the
            # cos/sin moments of a complex f need both rotation directions
            mp = _osc_moment_row(f, w, t, dt, 1.0)
            if is_complex:
                mm = _osc_moment_row(f, w, t, dt, -1.0)
                c = 0.5 * (mp + mm)
                s = -0.5j * (mp - mm)
            else:
                c = mp.real
                s = mp.imag
            out[i] = (np.sin(w * t) * c - np.cos(w * t) * s) / w
    return out


def damped_conv_batch(alpha: float, wr2s: np.ndarray, F: np.ndarray,
                      t: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty_like(F)
    for i in range(F.shape[0]):
        wr2 = wr2s[i]
        f = F[i]
        if wr2 > 0.0:
            wr = math.sqrt(wr2)
            grow = np.exp(alpha * t)
            decay = np.exp(-alpha * t)
            cw = np.cos(wr * t)
            sw = np.sin(wr * t)
            c = _cumtrapz_row(grow * cw * f, dt)
            s = _cumtrapz_row(grow * sw * f, dt)
            out[i] = decay * (sw * c - cw * s) / wr
        elif wr2 < 0.0:
            kappa = math.sqrt(-wr2)
            ep = np.exp((alpha - kappa) * t)   # integrand factor for the slow pole
            em = np.exp((alpha + kappa) * t)
            cp = _cumtrapz_row(ep * f, dt)
            cm = _cumtrapz_row(em * f, dt)
            out[i] = (cp / ep - cm / em) / (2.0 * kappa)
        else:
            grow = np.exp(alpha * t)
            decay = np.exp(-alpha * t)
            c0 = _cumtrapz_row(grow * f, dt)
            c1 = _cumtrapz_row(t * grow * f, dt)
            out[i] = decay * (t * c0 - c1)
    return out
