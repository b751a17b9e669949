"""Spinning-parameter analysis and the piston reduction.

For a drive below the transverse cut-on frequencies, non-axisymmetric
("spinning") cavity modes respond much more weakly than the axial family.
The spinning parameter

    spin(n) = (-w^2 - c^2 lam_axial(n3)) / (-w^2 - c^2 lam_n)

is the ratio of the axial mode's frequency-domain propagator to mode n's;
it equals 1 exactly on the axial family and decreases monotonically with
the radial root.  The coupling census ranks the first radial roots of both
bases and tabulates a_cyl^-2 * spin(n) * (radial overlap), the quantity
that decides which cross-couplings matter.

The piston approximation keeps only the axial family (spin = 1): each
membrane acts through its disc-averaged displacement, and the pressure
becomes a plane wave in x.  `piston_pressure` implements that closed form;
it agrees with the full synthesis restricted to the axial truncation set.
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
    Stimulus,
    cavity_mode,
    membrane_mean_projection,
    membrane_mode,
    overlap_radial,
)
from .perturbation import MembraneQS, drive_ratio

__all__ = [
    "SpinningReport",
    "coupling_matrix",
    "mode_ordering",
    "piston_pressure",
    "spinning_parameter",
]

_CENSUS_RADIAL = 5   # n1 (or k1) = 1..5
_CENSUS_ANGULAR = 5  # n2 = 0..5 for the cavity, k2 = 1..5 for the membrane


def spinning_parameter(geom: CavityGeometry, mats: MaterialParams,
                       stim: Stimulus, n: CavityMode) -> float:
    """Propagator ratio of the axial mode with the same n3 to mode n."""
    if n.mu == 0.0:
        return 1.0
    lam_axial = -((n.n3 * math.pi / geom.length) ** 2)
    num = -stim.omega ** 2 - mats.c ** 2 * lam_axial
    den = -stim.omega ** 2 - mats.c ** 2 * n.lam
    eps = 1e-6 * stim.omega ** 2
    if abs(den) < eps or abs(num) < eps:
        raise DegenerateSpectrumError(
            f"drive frequency {stim.omega:.6g} rad/s is resonant with the "
            f"mode propagator (|denominator| < {eps:.3g})")
    return num / den


def _census(geom: CavityGeometry, family: str) -> dict[tuple[int, int], float]:
    if family == "cavity":
        return {(n1, n2): cavity_mode(geom, n1, n2, 0).mu
                for n2 in range(0, _CENSUS_ANGULAR + 1)
                for n1 in range(1, _CENSUS_RADIAL + 1)}
    if family == "membrane":
        return {(k1, k2): membrane_mode(geom, k1, k2).nu
                for k2 in range(1, _CENSUS_ANGULAR + 1)
                for k1 in range(1, _CENSUS_RADIAL + 1)}
    raise ValueError(f"family must be 'cavity' or 'membrane', got {family!r}")


def _ranked(geom: CavityGeometry, family: str,
            gap_tol: float) -> list[tuple[tuple[int, int], float]]:
    items = sorted(_census(geom, family).items(), key=lambda kv: kv[1])
    for (ia, va), (ib, vb) in zip(items, items[1:]):
        if vb - va < gap_tol:
            raise DegenerateSpectrumError(
                f"census roots for {ia} and {ib} coincide within {gap_tol:g} "
                f"({va:.12g} vs {vb:.12g}); ranking is ill-defined")
    return items


def mode_ordering(geom: CavityGeometry, family: str = "cavity",
                  gap_tol: float = 1e-9) -> dict[tuple[int, int], int]:
    """Rank map index -> count of strictly smaller census roots (0-based)."""
    return {idx: rank for rank, (idx, _) in
            enumerate(_ranked(geom, family, gap_tol))}


@dataclass(frozen=True, eq=False)
class SpinningReport:
    """Rank-ordered coupling census for one axial index n3.

    ``value[r, c] = spin[r] * overlap[r, c] / radius_cavity**2`` with rows
    the ranked cavity radial roots and columns the ranked membrane roots.
    """

    n3: int
    omega: float
    row_indices: tuple[tuple[int, int], ...]
    col_indices: tuple[tuple[int, int], ...]
    row_roots: np.ndarray
    col_roots: np.ndarray
    spin: np.ndarray
    overlap: np.ndarray
    value: np.ndarray

    @property
    def argmax(self) -> tuple[int, int]:
        """(row rank, column rank) of the largest |value|."""
        r, c = np.unravel_index(int(np.argmax(np.abs(self.value))),
                                self.value.shape)
        return int(r), int(c)

    @property
    def axial_dominates(self) -> bool:
        return self.argmax[0] == 0


def coupling_matrix(geom: CavityGeometry, mats: MaterialParams,
                    stim: Stimulus, n3: int,
                    gap_tol: float = 1e-9) -> SpinningReport:
    """Census matrix of a_cyl^-2 * spin * (radial overlap) at axial index n3."""
    if n3 < 0:
        raise ValueError("n3 must be >= 0")
    rows = _ranked(geom, "cavity", gap_tol)
    cols = _ranked(geom, "membrane", gap_tol)
    spin = np.empty(len(rows))
    overlap = np.empty((len(rows), len(cols)))
    for r, ((n1, n2), _) in enumerate(rows):
        cav = cavity_mode(geom, n1, n2, n3)
        spin[r] = spinning_parameter(geom, mats, stim, cav)
        for c, ((k1, k2), _) in enumerate(cols):
            overlap[r, c] = overlap_radial(geom, cav, membrane_mode(geom, k1, k2))
    value = spin[:, None] * overlap / geom.radius_cavity ** 2
    if not np.all(np.isfinite(value)):
        raise DegenerateSpectrumError("non-finite census entry")
    return SpinningReport(
        n3=n3, omega=stim.omega,
        row_indices=tuple(idx for idx, _ in rows),
        col_indices=tuple(idx for idx, _ in cols),
        row_roots=np.array([v for _, v in rows]),
        col_roots=np.array([v for _, v in cols]),
        spin=spin, overlap=overlap, value=value)


def piston_pressure(geom: CavityGeometry, mats: MaterialParams, stim: Stimulus,
                    qs: MembraneQS, t, x, n3_max: int = 8):
    """Axial-family pressure with membranes reduced to mean-displacement
    pistons.  Output shape is np.shape(x) + np.shape(t)."""
    t_a = np.asarray(t, dtype=np.float64)
    x_a = np.asarray(x, dtype=np.float64)
    if np.any(x_a < 0) or np.any(x_a > geom.length):
        raise ValueError("x out of cavity domain")
    mbar = np.array([membrane_mean_projection(geom, mem) for mem in qs.modes])
    mean0 = complex(np.sum(mbar * qs.amp0))
    meanL = complex(np.sum(mbar * qs.ampL))
    area_cyl = math.pi * geom.radius_cavity ** 2
    base = mats.rho0 * (stim.omega * mats.c) ** 2 / (area_cyl * geom.length)
    out = np.zeros(x_a.shape + t_a.shape, dtype=complex)
    for n in range(0, n3_max + 1):
        eps = 1.0 if n == 0 else 2.0
        omega_n = mats.c * n * math.pi / geom.length
        weight = base * eps * (mean0 + (-1.0) ** n * meanL)
        profile = np.cos(n * math.pi * x_a / geom.length)
        ratio = drive_ratio(omega_n, stim.omega, t_a)
        out += -weight * np.multiply.outer(profile, ratio)
    if x_a.ndim == 0 and t_a.ndim == 0:
        return complex(out[()])
    return out
