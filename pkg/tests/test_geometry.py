"""Tests for geometry, eigenbases, normalization, and overlap integrals.

Frozen values (mpmath, dps=30): the fundamental sectorial-membrane root
nu_{1,1} = j_{q,1} with q = 15/29, the preset membrane wave speeds derived
from it, and the first axial cavity eigenvalue.
"""
from __future__ import annotations

import math

import numpy as np
import pytest

from icesim.geometry import (
    CavityGeometry,
    MaterialParams,
    Stimulus,
    Truncation,
    cavity_eigenfunction,
    cavity_mode,
    cavity_modes,
    membrane_eigenfunction,
    membrane_mean_projection,
    membrane_mode,
    membrane_modes,
    overlap_full,
    overlap_radial,
    preset,
)
from icesim.special import bessel_j, bessel_j_prime, gauss_legendre

NU_11 = 3.1660171409756327          # first zero of J_{15/29}
CM_GECKO = 5.4178784020463047       # 2*pi*1050*a_tymp / NU_11
CM_VARANUS = 2.8379363058337787     # 2*pi*550*a_tymp / NU_11
LAM_GECKO_101 = -20391.744630349915  # -(pi/0.022)^2


@pytest.fixture(scope="module")
def gecko():
    return preset("gecko")


@pytest.fixture(scope="module")
def varanus():
    return preset("varanus")


class TestPresets:
    def test_gecko_numbers(self, gecko):
        g = gecko.geometry
        assert (g.length, g.radius_cavity, g.radius_membrane) == (22e-3, 6.6e-3, 2.6e-3)
        assert g.beta == math.pi / 30
        m = gecko.materials
        assert (m.c, m.rho0, m.rho_m, m.d, m.alpha) == (343.0, 1.2, 1200.0, 1e-5, 2611.0)
        assert abs(m.coupling - 1e-3) <= 1e-18
        assert abs(m.c_m - CM_GECKO) <= 1e-12 * CM_GECKO
        s = gecko.stimulus
        assert s.p0 == 1.0
        assert abs(s.omega - 2 * math.pi * 750.0) <= 1e-9
        assert abs(s.k_axial - s.omega / m.c) <= 1e-18

    def test_varanus_numbers(self, varanus):
        g = varanus.geometry
        assert (g.length, g.radius_cavity, g.radius_membrane) == (15.5e-3, 6e-3, 2.6e-3)
        m = varanus.materials
        assert m.alpha == 347.0
        assert abs(m.c_m - CM_VARANUS) <= 1e-12 * CM_VARANUS
        assert abs(varanus.stimulus.omega - 2 * math.pi * 200.0) <= 1e-9

    def test_unknown_preset(self):
        with pytest.raises(KeyError):
            preset("iguana")

    def test_validation(self):
        with pytest.raises(ValueError):
            CavityGeometry(length=-1.0, radius_cavity=6e-3, radius_membrane=2e-3,
                           beta=0.1)
        with pytest.raises(ValueError):
            CavityGeometry(length=1.0, radius_cavity=2e-3, radius_membrane=6e-3,
                           beta=0.1)  # membrane larger than cavity
        with pytest.raises(ValueError):
            CavityGeometry(length=1.0, radius_cavity=6e-3, radius_membrane=2e-3,
                           beta=2.0)  # sector collapses
        with pytest.raises(ValueError):
            MaterialParams(c=343.0, c_m=5.0, rho0=-1.2, rho_m=1200.0, d=1e-5,
                           alpha=2611.0)


class TestEigenvalues:
    def test_first_axial_mode(self, gecko):
        mode = cavity_mode(gecko.geometry, 1, 0, 1)
        assert mode.mu == 0.0
        assert abs(mode.lam - LAM_GECKO_101) <= 1e-12 * abs(LAM_GECKO_101)

    def test_angular_index_sign(self, gecko):
        a = cavity_mode(gecko.geometry, 2, 3, 1)
        b = cavity_mode(gecko.geometry, 2, -3, 1)
        assert a.mu == b.mu and a.lam == b.lam

    def test_membrane_fundamental(self, gecko):
        k = membrane_mode(gecko.geometry, 1, 1)
        assert abs(k.q - 15.0 / 29.0) <= 1e-14
        assert abs(k.nu - NU_11) <= 1e-12
        assert abs(k.gamma + (k.nu / gecko.geometry.radius_membrane) ** 2) <= 1e-6

    def test_membrane_fundamental_frequency_closes_loop(self, gecko, varanus):
        for bundle, f11 in ((gecko, 1050.0), (varanus, 550.0)):
            k = membrane_mode(bundle.geometry, 1, 1)
            f = bundle.materials.c_m * math.sqrt(-k.gamma) / (2 * math.pi)
            assert abs(f - f11) <= 1e-9 * f11

    def test_eigenvalue_monotonicity(self, gecko):
        g = gecko.geometry
        for n2 in (0, 1, 3):
            lams = [cavity_mode(g, n1, n2, 1).lam for n1 in range(1, 6)]
            assert all(a > b for a, b in zip(lams, lams[1:]))
        lams = [cavity_mode(g, 2, 1, n3).lam for n3 in range(0, 5)]
        assert all(a > b for a, b in zip(lams, lams[1:]))
        gams = [membrane_mode(g, k1, 2).gamma for k1 in range(1, 6)]
        assert all(a > b for a, b in zip(gams, gams[1:]))

    def test_index_validation(self, gecko):
        with pytest.raises(ValueError):
            cavity_mode(gecko.geometry, 0, 0, 1)
        with pytest.raises(ValueError):
            cavity_mode(gecko.geometry, 1, 0, -1)
        with pytest.raises(ValueError):
            membrane_mode(gecko.geometry, 0, 1)
        with pytest.raises(ValueError):
            membrane_mode(gecko.geometry, 1, 0)


class TestEigenfunctions:
    def test_constant_mode_value(self, gecko):
        g = gecko.geometry
        mode = cavity_mode(g, 1, 0, 0)
        expect = 1.0 / math.sqrt(math.pi * g.radius_cavity ** 2 * g.length)
        got = cavity_eigenfunction(g, mode, 1e-3, 0.7, 5e-3)
        assert abs(got - expect) <= 1e-12 * expect

    def test_axial_modes_transversally_constant(self, gecko):
        g = gecko.geometry
        mode = cavity_mode(g, 1, 0, 2)
        v1 = cavity_eigenfunction(g, mode, 1e-4, 0.3, 3e-3)
        v2 = cavity_eigenfunction(g, mode, 6e-3, 2.9, 3e-3)
        assert abs(v1 - v2) <= 1e-14 * abs(v1)

    def test_end_cap_parity(self, gecko):
        g = gecko.geometry
        for (n1, n2, n3) in [(1, 0, 1), (2, 1, 2), (1, -2, 3)]:
            mode = cavity_mode(g, n1, n2, n3)
            at0 = cavity_eigenfunction(g, mode, 2e-3, 1.1, 0.0)
            atL = cavity_eigenfunction(g, mode, 2e-3, 1.1, g.length)
            assert abs(atL - (-1.0) ** n3 * at0) <= 1e-13 * max(1e-30, abs(at0))

    def test_neumann_wall_condition(self, gecko):
        # radial derivative at the wall, analytic chain rule; scale = interior max
        g = gecko.geometry
        for (n1, n2) in [(2, 0), (1, 1), (3, 2), (2, 5)]:
            mode = cavity_mode(g, n1, n2, 1)
            wall = (mode.mu / g.radius_cavity) * bessel_j_prime(abs(n2), mode.mu)
            rr = np.linspace(1e-4, g.radius_cavity, 200)
            interior = np.max(np.abs(
                (mode.mu / g.radius_cavity)
                * bessel_j_prime(abs(n2), mode.mu * rr / g.radius_cavity)))
            assert abs(wall) <= 1e-8 * interior

    def test_dirichlet_membrane_edge(self, gecko):
        g = gecko.geometry
        span = 2 * math.pi - 2 * g.beta
        for (k1, k2) in [(1, 1), (2, 3), (5, 5)]:
            mode = membrane_mode(g, k1, k2)
            rim = membrane_eigenfunction(g, mode, g.radius_membrane, 0.4 * span)
            lip0 = membrane_eigenfunction(g, mode, 1.3e-3, 0.0)
            lipS = membrane_eigenfunction(g, mode, 1.3e-3, span)
            rr = np.linspace(0, g.radius_membrane, 101)
            pp = np.linspace(0, span, 101)
            interior = np.max(np.abs(membrane_eigenfunction(
                g, mode, rr[:, None], pp[None, :])))
            assert abs(rim) <= 1e-12 * interior
            assert abs(lip0) <= 1e-12 * interior
            assert abs(lipS) <= 1e-12 * interior

    def test_domain_validation(self, gecko):
        g = gecko.geometry
        mode = membrane_mode(g, 1, 1)
        with pytest.raises(ValueError):
            membrane_eigenfunction(g, mode, g.radius_membrane * 1.01, 0.1)
        with pytest.raises(ValueError):
            membrane_eigenfunction(g, mode, 1e-3, -0.2)
        cmode = cavity_mode(g, 1, 1, 1)
        with pytest.raises(ValueError):
            cavity_eigenfunction(g, cmode, 1e-3, 0.0, g.length * 1.5)


class TestOrthonormality:
    def test_cavity_gram_identity(self, gecko):
        g = gecko.geometry
        specs = [(1, 0), (2, 0), (1, 1), (1, -1), (1, 2), (2, 1)]
        modes = [cavity_mode(g, n1, n2, 1) for n1, n2 in specs]
        r, wr = gauss_legendre(64).map_to(0.0, g.radius_cavity)
        p, wp = gauss_legendre(64).map_to(0.0, 2 * math.pi)
        vals = np.array([
            cavity_eigenfunction(g, m, r[:, None], p[None, :], 0.0) for m in modes
        ])  # (6, 64, 64) cross-section samples at x = 0
        wgt = (wr * r)[:, None] * wp[None, :]
        gram = np.einsum("aij,bij,ij->ab", np.conj(vals), vals, wgt) * (g.length / 2.0)
        assert np.max(np.abs(gram - np.eye(6))) <= 1e-8

    def test_membrane_gram_identity(self, gecko):
        g = gecko.geometry
        span = 2 * math.pi - 2 * g.beta
        specs = [(1, 1), (2, 1), (1, 2), (2, 2), (1, 3), (3, 1)]
        modes = [membrane_mode(g, k1, k2) for k1, k2 in specs]
        r, wr = gauss_legendre(64).map_to(0.0, g.radius_membrane)
        p, wp = gauss_legendre(64).map_to(0.0, span)
        vals = np.array([
            membrane_eigenfunction(g, m, r[:, None], p[None, :]) for m in modes
        ])
        wgt = (wr * r)[:, None] * wp[None, :]
        gram = np.einsum("aij,bij,ij->ab", vals, vals, wgt)
        assert np.max(np.abs(gram - np.eye(6))) <= 1e-8

    def test_axial_norm_factor_halves_for_positive_n3(self, gecko):
        # |Psi| of (1,0,0) vs (1,0,1) at an antinode differ by sqrt(2)
        g = gecko.geometry
        flat = cavity_eigenfunction(g, cavity_mode(g, 1, 0, 0), 1e-3, 0.0, 0.0)
        wave = cavity_eigenfunction(g, cavity_mode(g, 1, 0, 1), 1e-3, 0.0, 0.0)
        assert abs(abs(wave) - math.sqrt(2.0) * abs(flat)) <= 1e-12


class TestOverlaps:
    def test_radial_overlap_node_doubling(self, gecko):
        g = gecko.geometry
        for (n1, n2, k1, k2) in [(1, 0, 1, 1), (2, 1, 2, 2), (5, 5, 5, 5)]:
            cav = cavity_mode(g, n1, n2, 1)
            mem = membrane_mode(g, k1, k2)
            a = overlap_radial(g, cav, mem, nodes=64)
            b = overlap_radial(g, cav, mem, nodes=128)
            assert abs(a - b) <= 1e-10 * max(1.0, abs(a))

    def test_radial_overlap_axial_row_closed_form(self, gecko):
        # mu = 0 row: integral of r J_q(nu r / a_t) dr over the membrane radius.
        # The plain-grid reference converges only algebraically (the integrand
        # behaves like r^{1+q} with fractional q at the origin), so the
        # comparison tolerance reflects the reference's error, not the
        # implementation's.
        g = gecko.geometry
        cav = cavity_mode(g, 1, 0, 1)
        mem = membrane_mode(g, 1, 1)
        x, w = gauss_legendre(96).map_to(0.0, g.radius_membrane)
        ref = float(np.sum(w * x * bessel_j(mem.q, mem.nu * x / g.radius_membrane)))
        assert abs(overlap_radial(g, cav, mem) - ref) <= 1e-9 * abs(ref)

    def test_full_overlap_against_2d_quadrature(self, gecko):
        g = gecko.geometry
        span = 2 * math.pi - 2 * g.beta
        cases = [(1, 0, 1, 1, 1), (1, 1, 1, 1, 1), (2, -2, 2, 2, 3), (1, 3, 1, 2, 2)]
        for (n1, n2, n3, k1, k2) in cases:
            cav = cavity_mode(g, n1, n2, n3)
            mem = membrane_mode(g, k1, k2)
            r, wr = gauss_legendre(96).map_to(0.0, g.radius_membrane)
            p, wp = gauss_legendre(96).map_to(0.0, span)
            # cavity eigenfunction on the x=0 cap uses the global angle phi'+beta
            psi = cavity_eigenfunction(g, cav, r[:, None], g.beta + p[None, :], 0.0)
            phi = membrane_eigenfunction(g, mem, r[:, None], p[None, :])
            ref = np.einsum("ij,ij,ij->", np.conj(psi), phi,
                            (wr * r)[:, None] * wp[None, :])
            got = overlap_full(g, cav, mem, end=0)
            assert abs(got - ref) <= 1e-10 * max(1e-6, abs(ref))

    def test_angular_selection_rule(self, gecko):
        g = gecko.geometry
        for k2 in (2, 4):
            got = overlap_full(g, cavity_mode(g, 2, 0, 1),
                               membrane_mode(g, 1, k2), end=0)
            assert got == 0.0

    def test_end_cap_factor(self, gecko):
        g = gecko.geometry
        for n3 in (0, 1, 2, 3):
            cav = cavity_mode(g, 1, 1, n3)
            mem = membrane_mode(g, 1, 1)
            at0 = overlap_full(g, cav, mem, end=0)
            atL = overlap_full(g, cav, mem, end="L")
            assert atL == (-1.0) ** n3 * at0

    def test_conjugate_symmetry_in_angular_index(self, gecko):
        g = gecko.geometry
        mem = membrane_mode(g, 2, 3)
        a = overlap_full(g, cavity_mode(g, 2, 2, 1), mem, end=0)
        b = overlap_full(g, cavity_mode(g, 2, -2, 1), mem, end=0)
        assert abs(b - np.conj(a)) <= 1e-14 * max(1e-30, abs(a))

    def test_mean_projection(self, gecko):
        g = gecko.geometry
        span = 2 * math.pi - 2 * g.beta
        for (k1, k2) in [(1, 1), (2, 1), (1, 3)]:
            mem = membrane_mode(g, k1, k2)
            r, wr = gauss_legendre(96).map_to(0.0, g.radius_membrane)
            p, wp = gauss_legendre(96).map_to(0.0, span)
            ref = np.einsum("ij,ij->", membrane_eigenfunction(
                g, mem, r[:, None], p[None, :]), (wr * r)[:, None] * wp[None, :])
            # plain-grid reference converges only algebraically in r
            # (integrand ~ r^{1+q}, fractional q), hence the modest tolerance
            assert abs(membrane_mean_projection(g, mem) - ref) <= 2e-9 * abs(ref)
        for k2 in (2, 4):
            assert membrane_mean_projection(g, membrane_mode(g, 1, k2)) == 0.0


class TestModeSets:
    def test_default_counts_and_order(self, gecko):
        g = gecko.geometry
        trunc = Truncation()
        cavs = cavity_modes(g, trunc)
        mems = membrane_modes(g, trunc)
        assert len(cavs) == 5 * 11 * 9  # n1 <= 5, |n2| <= 5, 0 <= n3 <= 8
        assert len(mems) == 25
        # deterministic ordering: n3-major, then n2, then n1
        keys = [(m.n3, m.n2, m.n1) for m in cavs]
        assert keys == sorted(keys)
        mkeys = [(m.k2, m.k1) for m in mems]
        assert mkeys == sorted(mkeys)

    def test_truncation_validation(self):
        with pytest.raises(ValueError):
            Truncation(n1_max=0)
        with pytest.raises(ValueError):
            Truncation(n3_max=-1)
        with pytest.raises(ValueError):
            Truncation(k2_max=0)

    def test_small_truncation(self, gecko):
        trunc = Truncation(n1_max=2, n2_max=1, n3_max=2, k1_max=2, k2_max=2)
        assert len(cavity_modes(gecko.geometry, trunc)) == 2 * 3 * 3
        assert len(membrane_modes(gecko.geometry, trunc)) == 4


class TestStimulus:
    def test_from_frequency(self):
        s = Stimulus.from_frequency(p0=2.0, frequency_hz=750.0, c=343.0)
        assert abs(s.omega - 2 * math.pi * 750.0) <= 1e-9
        assert abs(s.k_axial - s.omega / 343.0) <= 1e-18
        assert s.p0 == 2.0

    def test_validation(self):
        with pytest.raises(ValueError):
            Stimulus(p0=1.0, omega=-5.0, k_axial=1.0)
