"""Geometry, materials, stimulus, and the two modal eigenbases.

The configuration is a finite cylinder of radius `radius_cavity` and length
`length`, closed at x = 0 and x = L by damped sectorial membranes of radius
`radius_membrane` whose sector spans the angles [beta, 2*pi - beta] (the gap
of width 2*beta models the stiff rim segment where the drum is attached).

Cavity modes (rigid-wall interior basis) are

    Psi_n(r, phi, x) = J_{|n2|}(mu r / a) e^{i n2 phi} cos(n3 pi x / L) / Lambda_n,

with mu the n1-th non-negative extremum of J_{|n2|} (so the radial derivative
vanishes at the wall; the n2 = 0, n1 = 1 representative is mu = 0 and the
mode is transversally constant) and eigenvalue

    lam_n = -[(mu/a)^2 + (n3 pi / L)^2]   (Laplacian eigenvalue, <= 0).

Membrane modes (clamped-edge sector basis), in the sector-local angle
phi' = phi - beta with span S = 2*pi - 2*beta:

    Phi_k(r, phi') = J_q(nu r / a_t) sin(k2 pi phi' / S) / Lambda_k,
    q = k2 pi / S,  nu = k1-th positive zero of J_q,
    gamma_k = -(nu / a_t)^2.

Both bases are L2-normalized on their domains. Overlap integrals between the
traces of cavity modes on an end cap and the membrane basis are radial
quadratures times closed-form angular factors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .special import bessel_j, find_extrema, find_zeros, gauss_legendre

__all__ = [
    "CavityGeometry",
    "CavityMode",
    "MaterialParams",
    "MembraneMode",
    "PresetBundle",
    "Stimulus",
    "Truncation",
    "cavity_eigenfunction",
    "cavity_mode",
    "cavity_modes",
    "membrane_eigenfunction",
    "membrane_mean_projection",
    "membrane_mode",
    "membrane_modes",
    "overlap_full",
    "overlap_radial",
    "preset",
]

_NORM_NODES = 128


@dataclass(frozen=True)
class CavityGeometry:
    """Cylinder dimensions and the membrane sector half-gap angle [rad]."""

    length: float
    radius_cavity: float
    radius_membrane: float
    beta: float

    def __post_init__(self) -> None:
        if self.length <= 0 or self.radius_cavity <= 0 or self.radius_membrane <= 0:
            raise ValueError("all dimensions must be positive")
        if self.radius_membrane > self.radius_cavity:
            raise ValueError("membrane radius cannot exceed the cavity radius")
        if not 0.0 <= self.beta < math.pi / 2:
            raise ValueError("half-gap angle must satisfy 0 <= beta < pi/2")

    @property
    def sector_span(self) -> float:
        """Angular width S = 2*pi - 2*beta of the membrane sector."""
        return 2.0 * math.pi - 2.0 * self.beta


@dataclass(frozen=True)
class MaterialParams:
    """Air and membrane material constants (SI)."""

    c: float        # sound speed in the cavity [m/s]
    c_m: float      # transverse wave speed in the membrane [m/s]
    rho0: float     # air density [kg/m^3]
    rho_m: float    # membrane density [kg/m^3]
    d: float        # membrane thickness [m]
    alpha: float    # membrane damping rate [1/s]

    def __post_init__(self) -> None:
        if min(self.c, self.c_m, self.rho0, self.rho_m, self.d) <= 0:
            raise ValueError("material constants must be positive")
        if self.alpha < 0:
            raise ValueError("damping rate must be >= 0")

    @property
    def coupling(self) -> float:
        """Air-to-membrane density ratio, the perturbation parameter."""
        return self.rho0 / self.rho_m


@dataclass(frozen=True)
class Stimulus:
    """External harmonic drive: amplitude [Pa], angular frequency [rad/s],
    and the axial wavenumber of the incident sound [1/m]."""

    p0: float
    omega: float
    k_axial: float

    def __post_init__(self) -> None:
        if self.omega < 0:
            raise ValueError("angular frequency must be >= 0 (0 = static load)")
        if self.p0 < 0:
            raise ValueError("amplitude must be >= 0")

    @classmethod
    def from_frequency(cls, p0: float, frequency_hz: float, c: float) -> "Stimulus":
        omega = 2.0 * math.pi * frequency_hz
        return cls(p0=p0, omega=omega, k_axial=omega / c)


@dataclass(frozen=True)
class CavityMode:
    """Cavity mode indices with cached radial root and eigenvalue."""

    n1: int
    n2: int
    n3: int
    mu: float
    lam: float


@dataclass(frozen=True)
class MembraneMode:
    """Membrane mode indices with cached order, root, and eigenvalue."""

    k1: int
    k2: int
    q: float
    nu: float
    gamma: float


@dataclass(frozen=True)
class Truncation:
    """Retained index ranges: n1 <= n1_max, |n2| <= n2_max, 0 <= n3 <= n3_max
    for the cavity; 1 <= k1 <= k1_max, 1 <= k2 <= k2_max for the membranes."""

    n1_max: int = 5
    n2_max: int = 5
    n3_max: int = 8
    k1_max: int = 5
    k2_max: int = 5

    def __post_init__(self) -> None:
        if self.n1_max < 1 or self.k1_max < 1 or self.k2_max < 1:
            raise ValueError("radial/angular counts must be >= 1")
        if self.n2_max < 0 or self.n3_max < 0:
            raise ValueError("n2_max and n3_max must be >= 0")


@lru_cache(maxsize=None)
def _radial_extremum(order: int, index: int) -> float:
    return float(find_extrema(float(order), index)[index - 1])


@lru_cache(maxsize=None)
def _radial_zero(q: float, index: int) -> float:
    return float(find_zeros(q, index)[index - 1])


@lru_cache(maxsize=None)
def cavity_mode(geom: CavityGeometry, n1: int, n2: int, n3: int) -> CavityMode:
    if n1 < 1:
        raise ValueError("n1 must be >= 1")
    if n3 < 0:
        raise ValueError("n3 must be >= 0")
    mu = _radial_extremum(abs(n2), n1)
    lam = -((mu / geom.radius_cavity) ** 2 + (n3 * math.pi / geom.length) ** 2)
    return CavityMode(n1=n1, n2=n2, n3=n3, mu=mu, lam=lam)


@lru_cache(maxsize=None)
def membrane_mode(geom: CavityGeometry, k1: int, k2: int) -> MembraneMode:
    if k1 < 1 or k2 < 1:
        raise ValueError("k1 and k2 must be >= 1")
    q = k2 * math.pi / geom.sector_span
    nu = _radial_zero(q, k1)
    gamma = -((nu / geom.radius_membrane) ** 2)
    return MembraneMode(k1=k1, k2=k2, q=q, nu=nu, gamma=gamma)


@lru_cache(maxsize=None)
def _cavity_radial_norm_sq(geom: CavityGeometry, order: int, n1: int) -> float:
    """int_0^a r J_order(mu r / a)^2 dr."""
    mu = _radial_extremum(order, n1)
    a = geom.radius_cavity
    x, w = gauss_legendre(_NORM_NODES).map_to(0.0, a)
    j = bessel_j(float(order), mu * x / a)
    return float(np.sum(w * x * j * j))


@lru_cache(maxsize=None)
def _cavity_norm(geom: CavityGeometry, n1: int, n2: int, n3: int) -> float:
    axial = geom.length if n3 == 0 else 0.5 * geom.length
    return math.sqrt(2.0 * math.pi * axial
                     * _cavity_radial_norm_sq(geom, abs(n2), n1))


def _membrane_radial_grid(a: float, nodes: int):
    """Nodes/weights for int_0^a f(r) r dr with f ~ r^q near 0 (fractional q).

    The substitution r = a u^2 turns the weak algebraic endpoint singularity
    into a high-order zero, so Gauss-Legendre converges to machine precision
    at moderate node counts.  Returns (r_i, w_i) with sum_i w_i f(r_i) the
    quadrature value.
    """
    u, w = gauss_legendre(nodes).map_to(0.0, 1.0)
    return a * u * u, 2.0 * a * a * u ** 3 * w


@lru_cache(maxsize=None)
def _membrane_radial_norm_sq(geom: CavityGeometry, k1: int, k2: int) -> float:
    mode_q = k2 * math.pi / geom.sector_span
    nu = _radial_zero(mode_q, k1)
    a = geom.radius_membrane
    r, w = _membrane_radial_grid(a, _NORM_NODES)
    j = bessel_j(mode_q, nu * r / a)
    return float(np.sum(w * j * j))


@lru_cache(maxsize=None)
def _membrane_norm(geom: CavityGeometry, k1: int, k2: int) -> float:
    return math.sqrt(0.5 * geom.sector_span
                     * _membrane_radial_norm_sq(geom, k1, k2))


def cavity_eigenfunction(geom: CavityGeometry, mode: CavityMode, r, phi, x):
    """Normalized cavity mode sampled at (r, phi, x); broadcasts its inputs."""
    r_a, phi_a, x_a = np.broadcast_arrays(
        np.asarray(r, dtype=np.float64),
        np.asarray(phi, dtype=np.float64),
        np.asarray(x, dtype=np.float64))
    if np.any(r_a < 0) or np.any(r_a > geom.radius_cavity):
        raise ValueError("r out of cavity domain")
    if np.any(x_a < 0) or np.any(x_a > geom.length):
        raise ValueError("x out of cavity domain")
    radial = bessel_j(float(abs(mode.n2)), mode.mu * r_a / geom.radius_cavity)
    val = (radial
           * np.exp(1j * mode.n2 * phi_a)
           * np.cos(mode.n3 * math.pi * x_a / geom.length)
           / _cavity_norm(geom, mode.n1, mode.n2, mode.n3))
    if np.ndim(r) == 0 and np.ndim(phi) == 0 and np.ndim(x) == 0:
        return complex(val)
    return val


def membrane_eigenfunction(geom: CavityGeometry, mode: MembraneMode, r, phi_local):
    """Normalized membrane mode at (r, phi') with the sector-local angle phi'."""
    r_a, p_a = np.broadcast_arrays(np.asarray(r, dtype=np.float64),
                                   np.asarray(phi_local, dtype=np.float64))
    span = geom.sector_span
    if np.any(r_a < 0) or np.any(r_a > geom.radius_membrane):
        raise ValueError("r out of membrane domain")
    if np.any(p_a < 0) or np.any(p_a > span):
        raise ValueError("phi' out of sector [0, S]")
    val = (bessel_j(mode.q, mode.nu * r_a / geom.radius_membrane)
           * np.sin(mode.k2 * math.pi * p_a / span)
           / _membrane_norm(geom, mode.k1, mode.k2))
    if np.ndim(r) == 0 and np.ndim(phi_local) == 0:
        return float(val)
    return val


@lru_cache(maxsize=None)
def _overlap_radial_cached(geom: CavityGeometry, order: int, n1: int,
                           k1: int, k2: int, nodes: int) -> float:
    mu = _radial_extremum(order, n1)
    mem = membrane_mode(geom, k1, k2)
    r, w = _membrane_radial_grid(geom.radius_membrane, nodes)
    ja = bessel_j(float(order), mu * r / geom.radius_cavity)
    jb = bessel_j(mem.q, mem.nu * r / geom.radius_membrane)
    return float(np.sum(w * ja * jb))


def overlap_radial(geom: CavityGeometry, cav: CavityMode, mem: MembraneMode,
                   nodes: int = _NORM_NODES) -> float:
    """int_0^{a_t} r J_{|n2|}(mu r / a) J_q(nu r / a_t) dr (unnormalized)."""
    return _overlap_radial_cached(geom, abs(cav.n2), cav.n1, mem.k1, mem.k2, nodes)


@lru_cache(maxsize=None)
def _angular_overlap(geom: CavityGeometry, n2: int, k2: int) -> complex:
    """int_0^S exp(-i n2 (phi' + beta)) sin(k2 pi phi' / S) dphi' in closed form."""
    span = geom.sector_span
    b = k2 * math.pi / span
    if n2 == 0:
        if k2 % 2 == 0:
            return 0.0 + 0.0j
        return complex(2.0 * span / (k2 * math.pi))
    denom = b * b - float(n2 * n2)
    if abs(denom) < 1e-9 * b * b:  # angular resonance: integrate numerically
        p, w = gauss_legendre(256).map_to(0.0, span)
        return complex(np.sum(
            w * np.exp(-1j * n2 * (p + geom.beta)) * np.sin(b * p)))
    parity = -1.0 if k2 % 2 else 1.0  # (-1)^{k2}
    val = b * (1.0 - parity * np.exp(-1j * n2 * span)) / denom
    return complex(np.exp(-1j * n2 * geom.beta) * val)


def _end_parity(geom: CavityGeometry, end) -> int:
    if end in (0, 0.0, "0"):
        return 0
    if end == "L" or (isinstance(end, float) and end == geom.length):
        return 1
    raise ValueError(f"end must identify x=0 or x=L, got {end!r}")


def overlap_full(geom: CavityGeometry, cav: CavityMode, mem: MembraneMode,
                 end) -> complex:
    """<Psi_n | Phi_k> on an end cap: conj(cavity trace) times membrane mode."""
    ang = _angular_overlap(geom, cav.n2, mem.k2)
    if ang == 0.0:
        return 0.0 + 0.0j
    rad = overlap_radial(geom, cav, mem)
    norm = (_cavity_norm(geom, cav.n1, cav.n2, cav.n3)
            * _membrane_norm(geom, mem.k1, mem.k2))
    base = rad * ang / norm
    if _end_parity(geom, end) and cav.n3 % 2:
        return -base
    return base


@lru_cache(maxsize=None)
def membrane_mean_projection(geom: CavityGeometry, mem: MembraneMode) -> float:
    """<Phi_k | 1> over the sector: response weight of a uniform load."""
    if mem.k2 % 2 == 0:
        return 0.0
    r, w = _membrane_radial_grid(geom.radius_membrane, _NORM_NODES)
    rad = float(np.sum(w * bessel_j(mem.q, mem.nu * r / geom.radius_membrane)))
    ang = 2.0 * geom.sector_span / (mem.k2 * math.pi)
    return rad * ang / _membrane_norm(geom, mem.k1, mem.k2)


def cavity_modes(geom: CavityGeometry, trunc: Truncation) -> list[CavityMode]:
    """Deterministically ordered retained cavity modes (n3-major)."""
    out = []
    for n3 in range(0, trunc.n3_max + 1):
        for n2 in range(-trunc.n2_max, trunc.n2_max + 1):
            for n1 in range(1, trunc.n1_max + 1):
                out.append(cavity_mode(geom, n1, n2, n3))
    return out


def membrane_modes(geom: CavityGeometry, trunc: Truncation) -> list[MembraneMode]:
    """Deterministically ordered retained membrane modes (k2-major)."""
    return [membrane_mode(geom, k1, k2)
            for k2 in range(1, trunc.k2_max + 1)
            for k1 in range(1, trunc.k1_max + 1)]


@dataclass(frozen=True)
class PresetBundle:
    """A named, ready-to-run configuration."""

    name: str
    geometry: CavityGeometry
    materials: MaterialParams
    stimulus: Stimulus


def _materials_for(geom: CavityGeometry, fundamental_hz: float,
                   alpha: float) -> MaterialParams:
    # membrane wave speed chosen so the undamped fundamental drum frequency
    # c_m sqrt(-gamma_11) / (2 pi) hits the given value
    q = math.pi / geom.sector_span
    nu11 = _radial_zero(q, 1)
    c_m = 2.0 * math.pi * fundamental_hz * geom.radius_membrane / nu11
    return MaterialParams(c=343.0, c_m=c_m, rho0=1.2, rho_m=1200.0, d=1e-5,
                          alpha=alpha)


def preset(name: str) -> PresetBundle:
    """Named desk-scale configurations: 'gecko' and 'varanus'."""
    key = name.strip().lower()
    if key == "gecko":
        geom = CavityGeometry(length=22e-3, radius_cavity=6.6e-3,
                              radius_membrane=2.6e-3, beta=math.pi / 30)
        mats = _materials_for(geom, fundamental_hz=1050.0, alpha=2611.0)
        stim = Stimulus.from_frequency(p0=1.0, frequency_hz=750.0, c=mats.c)
    elif key == "varanus":
        geom = CavityGeometry(length=15.5e-3, radius_cavity=6e-3,
                              radius_membrane=2.6e-3, beta=math.pi / 30)
        mats = _materials_for(geom, fundamental_hz=550.0, alpha=347.0)
        stim = Stimulus.from_frequency(p0=1.0, frequency_hz=200.0, c=mats.c)
    else:
        raise KeyError(f"unknown preset {name!r}; available: gecko, varanus")
    return PresetBundle(name=key, geometry=geom, materials=mats, stimulus=stim)
