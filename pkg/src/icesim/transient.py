"""Relaxation from silence to the quasi-stationary state.

Switching the external drive on at t = 0 with the cavity and membranes at
rest excites, besides the harmonic response, a decaying startup transient.
Each membrane mode carries the factor

    exp(-alpha t) t_k(t),   t_k(t) = cos(w_r t) + ((alpha + i w)/w_r) sin(w_r t)

with w_r the damped resonance of mode k, so the per-mode displacement is
amp_k (e^{i w t} - e^{-alpha t} t_k(t)), exactly zero at t = 0.  The
effective fluid-structure coupling of the startup motion therefore decays
as h(t) = g e^{-alpha t}; once h drops below g^2 (at T_eq = -ln(g)/alpha)
the transient sits beneath the leading-order accuracy floor and the state
is quasi-stationary for every practical purpose.

The decaying membrane motion also forces each cavity mode.  Writing
e^{-alpha t} t_k(t) = a+ e^{s+ t} + a- e^{s- t} with s+- = -alpha +- i w_r,
the pressure picks up the pure decaying particular solution

    P_n(t) = -rho0 c^2 sum_k W_nk sum_+- a s^2 e^{s t} / (s^2 + w_n^2),

where W_nk weights mode k's end-cap amplitudes by the cap overlaps.  The
form stays valid for overdamped membranes (both rates real); it becomes
singular only when a rate collides with a cavity resonance, which is
reported rather than regularized.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateSpectrumError
from .geometry import (
    CavityGeometry,
    CavityMode,
    MaterialParams,
    MembraneMode,
    Stimulus,
    Truncation,
    membrane_eigenfunction,
    membrane_modes,
    overlap_full,
)
from . import perturbation as _pert
from .perturbation import evaluate_membrane, membrane_qs

__all__ = [
    "TransientProfile",
    "relaxation_function",
    "relaxation_time",
    "total_membrane",
    "transient_coupling",
    "transient_pressure",
    "transient_profile",
]

_DEFAULT_TRUNCATION = Truncation()


def transient_coupling(mats: MaterialParams, t):
    """Decaying coupling strength h(t) = g exp(-alpha t) of the startup
    transient."""
    t_a = np.asarray(t, dtype=np.float64)
    if np.any(t_a < 0):
        raise ValueError("t must be >= 0")
    out = mats.coupling * np.exp(-mats.alpha * t_a)
    if np.ndim(t) == 0:
        return float(out)
    return out


def relaxation_function(mats: MaterialParams, mem: MembraneMode,
                        stim: Stimulus, t):
    """t_k(t) for one membrane mode: cos(w_r t) + ((alpha+i w)/w_r) sin(w_r t),
    continued through critical and overdamped regimes."""
    omega0_sq = -(mats.c_m ** 2) * mem.gamma
    return _pert.relaxation_function(mats.alpha, omega0_sq, stim.omega, t)


def relaxation_time(mats: MaterialParams) -> float:
    """T_eq = -ln(g)/alpha: when the transient coupling falls to g^2."""
    g = mats.coupling
    if g >= 1.0:
        raise ValueError("density ratio must be < 1 for a relaxation time")
    if mats.alpha <= 0.0:
        raise ValueError("membrane damping must be positive")
    return -math.log(g) / mats.alpha


def total_membrane(geom: CavityGeometry, mats: MaterialParams, stim: Stimulus,
                   end, point, t, trunc: Truncation = _DEFAULT_TRUNCATION):
    """Membrane displacement at (r, phi') on the given cap, harmonic part and
    startup transient together; identically zero at t = 0."""
    r, phi = point
    t_a = np.asarray(t, dtype=np.float64)
    mems, traj = evaluate_membrane(geom, mats, stim, trunc, t_a, end)
    out = np.zeros(t_a.size, dtype=complex)
    for i, mem in enumerate(mems):
        out += traj[i] * membrane_eigenfunction(geom, mem, r, phi)
    if np.ndim(t) == 0:
        return complex(out[0])
    return out.reshape(t_a.shape)


def _decay_rates(mats: MaterialParams, stim: Stimulus, mem: MembraneMode):
    """Rates and weights of e^{-alpha t} t_k(t) = a+ e^{s+ t} + a- e^{s- t}."""
    alpha = mats.alpha
    omega0_sq = -(mats.c_m ** 2) * mem.gamma
    disc = omega0_sq - alpha ** 2
    if abs(disc) < 1e-12 * max(alpha ** 2 + omega0_sq, 1.0):
        raise DegenerateSpectrumError(
            f"membrane mode ({mem.k1},{mem.k2}) is critically damped; the "
            "two-rate transient decomposition is singular")
    drive = alpha + 1j * stim.omega
    if disc > 0.0:
        omega_r = math.sqrt(disc)
        s_p = complex(-alpha, omega_r)
        s_m = complex(-alpha, -omega_r)
        a_p = 0.5 * (1.0 - 1j * drive / omega_r)
        a_m = 0.5 * (1.0 + 1j * drive / omega_r)
    else:  # overdamped: w_r = i kappa, both rates real
        kappa = math.sqrt(-disc)
        s_p = complex(-alpha - kappa)
        s_m = complex(-alpha + kappa)
        a_p = 0.5 * (1.0 - drive / kappa)
        a_m = 0.5 * (1.0 + drive / kappa)
    return abs(disc), ((s_p, a_p), (s_m, a_m))


def transient_pressure(geom: CavityGeometry, mats: MaterialParams,
                       stim: Stimulus, cav: CavityMode, t,
                       trunc: Truncation = _DEFAULT_TRUNCATION,
                       with_ringing: bool = False,
                       derivative: bool = False):
    """Pressure correction of cavity mode `cav` sourced by the startup
    transients of every retained membrane mode.

    By default this is the purely decaying particular solution.  With
    ``with_ringing=True`` each term also carries the free modal oscillation
    required by rest initial data, making the result the full zero-initial-
    data response to the decaying part of the membrane acceleration; added
    to the quasi-steady-drive pressure this completes the leading-order
    pressure of a system started from rest.  ``derivative=True`` returns the
    analytic time derivative instead; with ringing both it and the value
    vanish identically at t = 0.
    """
    t_a = np.asarray(t, dtype=np.float64)
    qs = membrane_qs(geom, mats, stim, trunc)
    omega_n_sq = -(mats.c ** 2) * cav.lam
    omega_n = math.sqrt(omega_n_sq)
    prefactor = -mats.rho0 * mats.c ** 2
    t_flat = t_a.ravel()
    out = np.zeros(t_a.size, dtype=complex)
    for j, mem in enumerate(qs.modes):
        o0 = overlap_full(geom, cav, mem, end=0)
        if o0 == 0.0:  # angular selection rule, shared by both caps
            continue
        weight = o0 * qs.amp0[j] \
            + overlap_full(geom, cav, mem, end="L") * qs.ampL[j]
        if weight == 0.0:
            continue
        wr_sq, rates = _decay_rates(mats, stim, mem)
        scale = mats.alpha ** 2 + wr_sq + omega_n_sq
        for s, a in rates:
            den = s * s + omega_n_sq
            if abs(den) < 1e-9 * scale:
                raise DegenerateSpectrumError(
                    f"transient rate of membrane mode ({mem.k1},{mem.k2}) "
                    f"coincides with the resonance of cavity mode "
                    f"({cav.n1},{cav.n2},{cav.n3})")
            if derivative:
                term = s * np.exp(s * t_flat)
                if with_ringing:
                    if omega_n > 0.0:
                        term = term + omega_n * np.sin(omega_n * t_flat) \
                            - s * np.cos(omega_n * t_flat)
                    else:
                        term = term - s
            else:
                term = np.exp(s * t_flat)
                if with_ringing:
                    if omega_n > 0.0:
                        term = term - np.cos(omega_n * t_flat) \
                            - (s / omega_n) * np.sin(omega_n * t_flat)
                    else:
                        term = term - 1.0 - s * t_flat
            out += (prefactor * weight * a * s * s / den) * term
    if np.ndim(t) == 0:
        return complex(out[0])
    return out.reshape(t_a.shape)


@dataclass(frozen=True, eq=False)
class TransientProfile:
    """Per-mode decomposition total = harmonic - transient on a time grid.

    ``harmonic`` is the shared drive factor e^{i w t}; row k of ``transient``
    is e^{-alpha t} t_k(t); ``T_eq`` is the relaxation-time estimate and
    ``coupling`` the density ratio used as the default settling threshold.
    """

    t: np.ndarray
    modes: tuple[MembraneMode, ...]
    harmonic: np.ndarray
    transient: np.ndarray
    total: np.ndarray
    T_eq: float
    coupling: float

    def settling_time(self, threshold: float | None = None) -> float:
        """First grid time from which every mode's transient stays at or
        below the threshold (default: the coupling strength); inf when the
        grid ends before that happens."""
        thr = self.coupling if threshold is None else threshold
        envelope = np.max(np.abs(self.transient), axis=0)
        above = np.nonzero(envelope > thr)[0]
        if above.size == 0:
            return float(self.t[0])
        if above[-1] == self.t.size - 1:
            return math.inf
        return float(self.t[above[-1] + 1])


def transient_profile(geom: CavityGeometry, mats: MaterialParams,
                      stim: Stimulus, trunc: Truncation,
                      t) -> TransientProfile:
    """Tabulate harmonic/transient/total factors for every retained membrane
    mode on the given time grid."""
    t_a = np.atleast_1d(np.asarray(t, dtype=np.float64))
    mems = tuple(membrane_modes(geom, trunc))
    harmonic = np.exp(1j * stim.omega * t_a)
    decay = np.exp(-mats.alpha * t_a)
    transient = np.empty((len(mems), t_a.size), dtype=complex)
    for i, mem in enumerate(mems):
        transient[i] = decay * relaxation_function(mats, mem, stim, t_a)
    return TransientProfile(
        t=t_a, modes=mems, harmonic=harmonic, transient=transient,
        total=harmonic[None, :] - transient,
        T_eq=relaxation_time(mats), coupling=mats.coupling)
