"""First-order coupled response of the cavity-membrane system.

The air/membrane density ratio is small, so the coupled system is solved
perturbatively: at leading order each membrane is a bank of damped modal
oscillators driven by the external sound alone, and the cavity pressure is
driven by the resulting membrane acceleration.  Higher orders feed the
interior pressure back onto the membranes (`picard_iterate`).

Closed forms used throughout (all for zero initial data, drive e^{i w t}):

* cavity mode, kernel G(u) = sin(w_n u)/w_n:
      int_0^t G(t-u) e^{i w u} du = (e^{i w t} - R_n(t)) / (w_n^2 - w^2),
  with the ringing term R_n(t) = cos(w_n t) + i (w/w_n) sin(w_n t)
  (`resonance_function`; R = 1 + i w t when w_n = 0).

* membrane mode, kernel H(u) = e^{-a u} sin(w_r u)/w_r, w_r^2 = w0^2 - a^2:
      U(t) = A (e^{i w t} - e^{-a t} T(t)),   A = F / D,
      D = w0^2 - w^2 + 2 i a w,
      T(t) = cos(w_r t) + ((a + i w)/w_r) sin(w_r t)
  (`relaxation_function`; hyperbolic/polynomial forms in the overdamped and
  critically damped regimes).

Near cavity resonance (w ~ w_n) the ratio (e^{i w t} - R_n)/(w_n^2 - w^2)
is evaluated by a third-order expansion in (w - w_n) to avoid cancellation
(`drive_ratio`).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ._backend import kernels
from .errors import UndersampledError
from .geometry import (
    CavityGeometry,
    CavityMode,
    MaterialParams,
    MembraneMode,
    Stimulus,
    Truncation,
    cavity_modes,
    membrane_mean_projection,
    membrane_modes,
    overlap_full,
    preset,  # noqa: F401  (re-exported for convenience)
)

__all__ = [
    "GreensKernelCavity",
    "GreensKernelMembrane",
    "MembraneQS",
    "PicardHistory",
    "PressureQS",
    "drive_ratio",
    "evaluate_membrane",
    "evaluate_pressure",
    "max_retained_omega",
    "membrane_amplitude_qs",
    "membrane_qs",
    "nyquist_grid",
    "picard_iterate",
    "pressure_qs",
    "relaxation_function",
    "resonance_function",
]

_GUARD_REL = 1e-6   # |w_n^2 - w^2| below this fraction of w^2 -> expansion
_NYQUIST_MIN = 2.0  # hard floor: grids may never undersample the spectrum


def _maybe_scalar(value, *inputs):
    if all(np.ndim(x) == 0 for x in inputs):
        return value[()] if isinstance(value, np.ndarray) else value
    return value


@dataclass(frozen=True)
class GreensKernelCavity:
    """Undamped oscillator kernel sin(omega u)/omega (a ramp when omega=0)."""

    omega: float

    def __call__(self, u):
        u_a = np.asarray(u, dtype=np.float64)
        if self.omega == 0.0:
            return _maybe_scalar(u_a.copy(), u)
        return _maybe_scalar(np.sin(self.omega * u_a) / self.omega, u)


@dataclass(frozen=True)
class GreensKernelMembrane:
    """Damped oscillator kernel: e^{-alpha u} sin(w_r u)/w_r, with hyperbolic
    and polynomial continuations in the overdamped / critical regimes."""

    alpha: float
    omega0_sq: float

    @property
    def omega_r_sq(self) -> float:
        return self.omega0_sq - self.alpha ** 2

    def __call__(self, u):
        u_a = np.asarray(u, dtype=np.float64)
        wr2 = self.omega_r_sq
        tol = 1e-12 * max(self.alpha ** 2 + abs(self.omega0_sq), 1.0)
        decay = np.exp(-self.alpha * u_a)
        if wr2 > tol:
            wr = math.sqrt(wr2)
            out = decay * np.sin(wr * u_a) / wr
        elif wr2 < -tol:
            kappa = math.sqrt(-wr2)
            out = decay * np.sinh(kappa * u_a) / kappa
        else:
            out = decay * u_a
        return _maybe_scalar(out, u)


def resonance_function(omega_n: float, omega: float, t):
    """Ringing term R_n(t) left behind by a harmonic drive switched on at t=0."""
    t_a = np.asarray(t, dtype=np.float64)
    if omega_n == 0.0:
        out = 1.0 + 1j * omega * t_a
    else:
        out = np.cos(omega_n * t_a) + 1j * (omega / omega_n) * np.sin(omega_n * t_a)
    return _maybe_scalar(out.astype(complex), t)


def relaxation_function(alpha: float, omega0_sq: float, omega: float, t):
    """Decaying factor T(t) in U(t) = A (e^{i w t} - e^{-alpha t} T(t))."""
    t_a = np.asarray(t, dtype=np.float64)
    wr2 = omega0_sq - alpha ** 2
    tol = 1e-12 * max(alpha ** 2 + abs(omega0_sq), 1.0)
    s = alpha + 1j * omega
    if wr2 > tol:
        wr = math.sqrt(wr2)
        out = np.cos(wr * t_a) + (s / wr) * np.sin(wr * t_a)
    elif wr2 < -tol:
        kappa = math.sqrt(-wr2)
        out = np.cosh(kappa * t_a) + (s / kappa) * np.sinh(kappa * t_a)
    else:
        out = 1.0 + s * t_a
    return _maybe_scalar(np.asarray(out, dtype=complex), t)


def drive_ratio(omega_n: float, omega: float, t, derivative: bool = False):
    """(e^{i w t} - R_n(t)) / (w_n^2 - w^2), stable through resonance.

    This is the zero-initial-data response of the cavity-mode oscillator to
    a unit harmonic drive.  With ``derivative=True`` the analytic time
    derivative is returned; both vanish identically at t = 0.
    """
    t_a = np.asarray(t, dtype=np.float64)
    if abs(omega_n ** 2 - omega ** 2) < _GUARD_REL * omega ** 2:
        # third-order expansion of the vanishing numerator in d = w - w_n
        d = omega - omega_n
        cis = np.exp(1j * omega_n * t_a)
        if derivative:
            n1 = 1j * cis * (1.0 + 1j * omega_n * t_a) - 1j * np.cos(omega_n * t_a)
            n2 = -(2.0 * t_a + 1j * omega_n * t_a ** 2) * cis
            n3 = -1j * (3.0 * t_a ** 2 + 1j * omega_n * t_a ** 3) * cis
        else:
            n1 = 1j * t_a * cis - 1j * np.sin(omega_n * t_a) / omega_n
            n2 = -(t_a ** 2) * cis
            n3 = -1j * t_a ** 3 * cis
        out = -(n1 + 0.5 * d * n2 + (d * d / 6.0) * n3) / (2.0 * omega_n + d)
        return _maybe_scalar(out, t)
    denom = omega_n ** 2 - omega ** 2
    if derivative:
        if omega_n == 0.0:
            rdot = 1j * omega * np.ones_like(t_a)
        else:
            rdot = (1j * omega * np.cos(omega_n * t_a)
                    - omega_n * np.sin(omega_n * t_a))
        out = (1j * omega * np.exp(1j * omega * t_a) - rdot) / denom
    else:
        out = (np.exp(1j * omega * t_a)
               - resonance_function(omega_n, omega, t_a)) / denom
    return _maybe_scalar(np.asarray(out, dtype=complex), t)


def _external_pressure(geom: CavityGeometry, stim: Stimulus, end) -> complex:
    """Complex amplitude of the incident sound at an end cap (x=0 or x=L)."""
    from .geometry import _end_parity
    half = 0.5 if _end_parity(geom, end) == 0 else -0.5
    return stim.p0 * np.exp(1j * stim.k_axial * geom.length * half)


def _drive_denominator(mats: MaterialParams, mem: MembraneMode,
                       omega: float) -> complex:
    omega0_sq = -(mats.c_m ** 2) * mem.gamma
    return omega0_sq - omega ** 2 + 2j * mats.alpha * omega


def membrane_amplitude_qs(geom: CavityGeometry, mats: MaterialParams,
                          stim: Stimulus, mem: MembraneMode, end) -> complex:
    """Quasi-steady modal amplitude of a membrane driven by the external
    sound alone (the leading perturbative order)."""
    mbar = membrane_mean_projection(geom, mem)
    if mbar == 0.0:
        return 0.0 + 0.0j
    forcing = -(mats.coupling / (mats.rho0 * mats.d)) \
        * _external_pressure(geom, stim, end) * mbar
    return complex(forcing / _drive_denominator(mats, mem, stim.omega))


@dataclass(frozen=True, eq=False)
class MembraneQS:
    """Quasi-steady membrane amplitudes for every retained mode, both caps."""

    modes: tuple[MembraneMode, ...]
    amp0: np.ndarray
    ampL: np.ndarray


def membrane_qs(geom: CavityGeometry, mats: MaterialParams, stim: Stimulus,
                trunc: Truncation) -> MembraneQS:
    mems = tuple(membrane_modes(geom, trunc))
    amp0 = np.array([membrane_amplitude_qs(geom, mats, stim, k, end=0)
                     for k in mems])
    ampL = np.array([membrane_amplitude_qs(geom, mats, stim, k, end="L")
                     for k in mems])
    return MembraneQS(modes=mems, amp0=amp0, ampL=ampL)


@dataclass(frozen=True, eq=False)
class PressureQS:
    """Per-cavity-mode harmonic source strengths rho0 (w c)^2 S_n, where S_n
    sums the end-cap overlaps weighted by the membrane amplitudes."""

    modes: tuple[CavityMode, ...]
    source: np.ndarray
    omega: float
    c: float

    @cached_property
    def steady_amplitude(self) -> np.ndarray:
        lam = np.array([mode.lam for mode in self.modes])
        return self.source / (self.omega ** 2 + self.c ** 2 * lam)


def pressure_qs(geom: CavityGeometry, mats: MaterialParams, stim: Stimulus,
                trunc: Truncation) -> PressureQS:
    cavs = tuple(cavity_modes(geom, trunc))
    mqs = membrane_qs(geom, mats, stim, trunc)
    source = np.zeros(len(cavs), dtype=complex)
    for i, cav in enumerate(cavs):
        acc = 0.0 + 0.0j
        for j, mem in enumerate(mqs.modes):
            o0 = overlap_full(geom, cav, mem, end=0)
            if o0 != 0.0:
                acc += o0 * mqs.amp0[j]
                acc += overlap_full(geom, cav, mem, end="L") * mqs.ampL[j]
        source[i] = mats.rho0 * (stim.omega * mats.c) ** 2 * acc
    return PressureQS(modes=cavs, source=source, omega=stim.omega, c=mats.c)


def evaluate_membrane(geom: CavityGeometry, mats: MaterialParams,
                      stim: Stimulus, trunc: Truncation, t, end):
    """Leading-order membrane modal trajectories U_k(t) on the given grid."""
    t_a = np.asarray(t, dtype=np.float64)
    mems = tuple(membrane_modes(geom, trunc))
    out = np.zeros((len(mems), t_a.size), dtype=complex)
    drive = np.exp(1j * stim.omega * t_a)
    decay = np.exp(-mats.alpha * t_a)
    for i, mem in enumerate(mems):
        amp = membrane_amplitude_qs(geom, mats, stim, mem, end)
        if amp == 0.0:
            continue
        omega0_sq = -(mats.c_m ** 2) * mem.gamma
        relax = relaxation_function(mats.alpha, omega0_sq, stim.omega, t_a)
        out[i] = amp * (drive - decay * relax)
    return mems, out


def evaluate_pressure(geom: CavityGeometry, mats: MaterialParams,
                      stim: Stimulus, trunc: Truncation, t,
                      derivative: bool = False):
    """Quasi-steady-drive part of the leading-order cavity pressure.

    Each mode evolves as -source_n * drive_ratio(w_n, w, t): the response to
    the harmonic component of the membrane acceleration, including the modal
    ringing required by zero initial data.  (The membranes' own decaying
    transient drives an additional pressure component; see the transient
    module.)
    """
    t_a = np.asarray(t, dtype=np.float64)
    qs = pressure_qs(geom, mats, stim, trunc)
    out = np.zeros((len(qs.modes), t_a.size), dtype=complex)
    for i, cav in enumerate(qs.modes):
        if qs.source[i] == 0.0:
            continue
        omega_n = mats.c * math.sqrt(-cav.lam)
        out[i] = -qs.source[i] * drive_ratio(omega_n, stim.omega, t_a,
                                             derivative=derivative)
    return qs.modes, out


def max_retained_omega(geom: CavityGeometry, mats: MaterialParams,
                       stim: Stimulus, trunc: Truncation) -> float:
    """Fastest angular rate present in the truncated model (drive, cavity
    eigenfrequencies, membrane natural frequencies, damping rate)."""
    wmax = max(stim.omega, mats.alpha)
    for cav in cavity_modes(geom, trunc):
        wmax = max(wmax, mats.c * math.sqrt(-cav.lam))
    for mem in membrane_modes(geom, trunc):
        wmax = max(wmax, mats.c_m * math.sqrt(-mem.gamma))
    return wmax


def nyquist_grid(window: float, max_omega: float, factor: float = 20.0) -> np.ndarray:
    """Uniform grid over [0, window] resolving max_omega with the given
    points-per-period factor."""
    if window <= 0 or max_omega <= 0 or factor < _NYQUIST_MIN:
        raise ValueError("window and max_omega must be positive, factor >= 2")
    n = max(32, math.ceil(window * max_omega * factor / (2.0 * math.pi)))
    return np.linspace(0.0, window, n + 1)


def _check_grid(t: np.ndarray, max_omega: float) -> float:
    if t.ndim != 1 or t.size < 2:
        raise ValueError("time grid must be 1-D with at least two samples")
    dt = float(t[1] - t[0])
    if dt <= 0 or not np.allclose(np.diff(t), dt, rtol=1e-9, atol=0.0):
        raise ValueError("time grid must be uniform and increasing")
    limit = math.pi / max_omega  # two samples per period of the fastest mode
    if dt > limit:
        raise UndersampledError(
            f"grid step {dt:.3e} s undersamples the retained spectrum "
            f"(fastest mode needs dt <= {limit:.3e} s); refine the grid or "
            f"reduce the truncation")
    return dt


@dataclass(frozen=True, eq=False)
class PicardHistory:
    """Per-iteration modal trajectories of the fixed-point solve.

    Index ``[l]`` of each tuple holds the order-(l+1) approximation on the
    common grid ``t``: membranes first (updated from the previous pressure),
    then the pressure rebuilt from those membranes.
    """

    t: np.ndarray
    cavity_modes: tuple[CavityMode, ...]
    membrane_modes: tuple[MembraneMode, ...]
    membrane0: tuple[np.ndarray, ...]
    membraneL: tuple[np.ndarray, ...]
    pressure: tuple[np.ndarray, ...]

    @property
    def pressure_increments(self) -> tuple[float, ...]:
        """Relative Frobenius-norm change of the pressure per iteration."""
        out = []
        for a, b in zip(self.pressure, self.pressure[1:]):
            base = np.linalg.norm(a)
            out.append(float(np.linalg.norm(b - a) / max(base, 1e-300)))
        return tuple(out)


def picard_iterate(geom: CavityGeometry, mats: MaterialParams, stim: Stimulus,
                   trunc: Truncation, t, orders: int = 2) -> PicardHistory:
    """Fixed-point iteration of the coupled system in the time domain.

    Sweep l: membranes respond (via their damped kernels) to the external
    drive plus the order-(l-1) interior pressure; the pressure then responds
    to the updated membrane motion.  Order 1 reproduces the closed forms of
    `evaluate_membrane`; the convolutions use the backend kernels on a
    uniform grid that must resolve every retained mode.
    """
    if orders < 1:
        raise ValueError("orders must be >= 1")
    t_a = np.ascontiguousarray(t, dtype=np.float64)
    dt = _check_grid(t_a, max_retained_omega(geom, mats, stim, trunc))

    cavs = tuple(cavity_modes(geom, trunc))
    mems = tuple(membrane_modes(geom, trunc))
    N, K = len(cavs), len(mems)
    O0 = np.array([[overlap_full(geom, c, k, end=0) for k in mems]
                   for c in cavs])
    OL = np.array([[overlap_full(geom, c, k, end="L") for k in mems]
                   for c in cavs])
    omega_n = np.array([mats.c * math.sqrt(-c.lam) for c in cavs])
    wnsq = omega_n ** 2
    w0sq = np.array([-(mats.c_m ** 2) * k.gamma for k in mems])
    wr2 = w0sq - mats.alpha ** 2
    gain = mats.coupling / (mats.rho0 * mats.d)
    drive = np.exp(1j * stim.omega * t_a)
    ext0 = np.array([-gain * _external_pressure(geom, stim, 0)
                     * membrane_mean_projection(geom, k) for k in mems])
    extL = np.array([-gain * _external_pressure(geom, stim, "L")
                     * membrane_mean_projection(geom, k) for k in mems])

    hist_u0, hist_uL, hist_p = [], [], []
    pressure = None
    for _ in range(orders):
        F0 = ext0[:, None] * drive[None, :]
        FL = extL[:, None] * drive[None, :]
        if pressure is not None:
            F0 = F0 + gain * (O0.conj().T @ pressure)
            FL = FL + gain * (OL.conj().T @ pressure)
        u0 = kernels.damped_conv_batch(mats.alpha, wr2,
                                       np.ascontiguousarray(F0), t_a, dt)
        uL = kernels.damped_conv_batch(mats.alpha, wr2,
                                       np.ascontiguousarray(FL), t_a, dt)
        w = O0 @ u0 + OL @ uL
        conv = kernels.sin_conv_batch(omega_n, np.ascontiguousarray(w), t_a, dt)
        pressure = mats.rho0 * mats.c ** 2 * (w - wnsq[:, None] * conv)
        hist_u0.append(u0)
        hist_uL.append(uL)
        hist_p.append(pressure)

    return PicardHistory(t=t_a, cavity_modes=cavs, membrane_modes=mems,
                         membrane0=tuple(hist_u0), membraneL=tuple(hist_uL),
                         pressure=tuple(hist_p))
