"""Numba-compiled compute kernels; same surface as `_kernels_numpy`.

Scalar inner loops compiled with cache=True so the compilation cost is paid
once per environment. No fastmath: results must track the numpy backend to
1e-12 (cross-checked in the test suite).
"""
from __future__ import annotations

import math

import numpy as np
from numba import njit

_SERIES_FLOOR = 12.0


@njit(cache=True)
def _series_scalar(q: float, x: float) -> float:
    if x == 0.0:
        return 1.0 if q == 0.0 else 0.0
    z = 0.5 * x
    if q == 0.0:
        term = 1.0
    else:
        term = math.exp(q * math.log(z) - math.lgamma(q + 1.0))
    total = term
    scale = abs(term)
    z2 = z * z
    for m in range(1, 400):
        term = -term * z2 / (m * (m + q))
        total += term
        a = abs(term)
        if a > scale:
            scale = a
        if a <= 1e-17 * scale:
            break
    return total


@njit(cache=True)
def _hankel_scalar(nu: float, x: float) -> float:
    mu4 = 4.0 * nu * nu
    chi = x - (0.5 * nu + 0.25) * math.pi
    p = 1.0
    q = 0.0
    ak = 1.0
    xpow = 1.0
    last = 1e308
    for k in range(1, 80):
        ak *= (mu4 - (2 * k - 1) ** 2) / (8.0 * k)
        xpow /= x
        term = ak * xpow
        mag = abs(term)
        if k > 4 and mag >= last:
            break
        r = k % 4
        if r == 0:
            p += term
        elif r == 1:
            q += term
        elif r == 2:
            p -= term
        else:
            q -= term
        last = mag
        if mag < 1e-18:
            break
    return math.sqrt(2.0 / (math.pi * x)) * (p * math.cos(chi) - q * math.sin(chi))


@njit(cache=True)
def _bessel_scalar(q: float, x: float) -> float:
    xc = max(_SERIES_FLOOR, 2.0 * q)
    if x < xc:
        return _series_scalar(q, x)
    if q <= 2.0:
        return _hankel_scalar(q, x)
    q0 = q - math.floor(q)
    ja = _hankel_scalar(q0, x)
    jb = _hankel_scalar(q0 + 1.0, x)
    steps = int(round(q - q0 - 1.0))
    nu = q0 + 1.0
    for _ in range(steps):
        ja, jb = jb, (2.0 * nu / x) * jb - ja
        nu += 1.0
    return jb


@njit(cache=True)
def bessel_j_array(q: float, x: np.ndarray) -> np.ndarray:
    out = np.empty(x.shape[0], dtype=np.float64)
    for i in range(x.shape[0]):
        out[i] = _bessel_scalar(q, x[i])
    return out


@njit(cache=True)
def _cumtrapz_row(f: np.ndarray, dt: float) -> np.ndarray:
    n = f.shape[0]
    out = np.empty(n, dtype=np.complex128)
    out[0] = 0.0
    acc = 0.0 + 0.0j
    for j in range(1, n):
        acc += 0.5 * dt * (f[j] + f[j - 1])
        out[j] = acc
    return out


@njit(cache=True)
def cumtrapz_batch(F: np.ndarray, dt: float) -> np.ndarray:
    out = np.empty_like(F)
    for i in range(F.shape[0]):
        out[i] = _cumtrapz_row(F[i], dt)
    return out


@njit(cache=True)
def _filon_ab(theta: float):
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


@njit(cache=True)
def _ramp_moments_row(f: np.ndarray, t: np.ndarray, dt: float) -> np.ndarray:
    """t_i * int_0^{t_i} f - int_0^{t_i} tau f, exact for piecewise-linear f."""
    n = f.shape[0]
    out = np.empty(n, dtype=np.complex128)
    out[0] = 0.0
    acc0 = 0.0 + 0.0j
    acc1 = 0.0 + 0.0j
    for j in range(1, n):
        acc0 += 0.5 * dt * (f[j - 1] + f[j])
        acc1 += dt * (t[j - 1] * 0.5 * (f[j - 1] + f[j])
                      + dt * (f[j - 1] / 6.0 + f[j] / 3.0))
        out[j] = t[j] * acc0 - acc1
    return out


@njit(cache=True)
def _osc_moment_row(f: np.ndarray, w: float, t: np.ndarray,
                    dt: float, sign: float) -> np.ndarray:
    """Running int_0^{t_i} f(tau) e^{i sign w tau} dtau for piecewise-linear f."""
    a, b = _filon_ab(sign * w * dt)
    n = f.shape[0]
    m = np.empty(n, dtype=np.complex128)
    m[0] = 0.0
    acc = 0.0 + 0.0j
    for j in range(1, n):
        phase = np.exp(1j * (sign * w * t[j - 1]))
        acc += dt * phase * (a * f[j - 1] + b * f[j])
        m[j] = acc
    return m


@njit(cache=True)
def sin_conv_batch(omegas: np.ndarray, F: np.ndarray, t: np.ndarray,
                   dt: float) -> np.ndarray:
    m, n = F.shape
    out = np.empty((m, n), dtype=np.complex128)
    for i in range(m):
        w = omegas[i]
        if w == 0.0:
            row = _ramp_moments_row(F[i], t, dt)
            for j in range(n):
                out[i, j] = row[j]
        else:
            # sin(w(t-tau)) = sin(wt)cos(w tau) - cos(wt)sin(w tau); the
            # cos/sin moments of a complex f need both rotation directions
            mp = _osc_moment_row(F[i], w, t, dt, 1.0)
            mm = _osc_moment_row(F[i], w, t, dt, -1.0)
            for j in range(n):
                c = 0.5 * (mp[j] + mm[j])
                s = -0.5j * (mp[j] - mm[j])
                out[i, j] = (np.sin(w * t[j]) * c - np.cos(w * t[j]) * s) / w
    return out


@njit(cache=True)
def damped_conv_batch(alpha: float, wr2s: np.ndarray, F: np.ndarray,
                      t: np.ndarray, dt: float) -> np.ndarray:
    m, n = F.shape
    out = np.empty((m, n), dtype=np.complex128)
    for i in range(m):
        wr2 = wr2s[i]
        if wr2 > 0.0:
            wr = math.sqrt(wr2)
            grow = np.exp(alpha * t)
            decay = np.exp(-alpha * t)
            cw = np.cos(wr * t)
            sw = np.sin(wr * t)
            c = _cumtrapz_row(grow * cw * F[i], dt)
            s = _cumtrapz_row(grow * sw * F[i], dt)
            for j in range(n):
                out[i, j] = decay[j] * (sw[j] * c[j] - cw[j] * s[j]) / wr
        elif wr2 < 0.0:
            kappa = math.sqrt(-wr2)
            ep = np.exp((alpha - kappa) * t)
            em = np.exp((alpha + kappa) * t)
            cp = _cumtrapz_row(ep * F[i], dt)
            cm = _cumtrapz_row(em * F[i], dt)
            for j in range(n):
                out[i, j] = (cp[j] / ep[j] - cm[j] / em[j]) / (2.0 * kappa)
        else:
            grow = np.exp(alpha * t)
            decay = np.exp(-alpha * t)
            c0 = _cumtrapz_row(grow * F[i], dt)
            c1 = _cumtrapz_row(t * grow * F[i], dt)
            for j in range(n):
                out[i, j] = decay[j] * (t[j] * c0[j] - c1[j])
    return out
