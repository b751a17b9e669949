"""Dual-method agreement on the unit-speed 1-D wave segment.

The same driven-end problem is solved two structurally different ways: a
per-mode RK4 integration of the boundary-forced oscillator equations, and a
Duhamel convolution against the surface-source (delta at each end)
reformulation.  Closed-form solutions pin each solver individually; the
equivalence check then demands the two agree far beyond either form's
modeling assumptions.
"""
import math

import numpy as np
import pytest

from icesim.errors import UndersampledError
from icesim.oned import (
    OneDProblem,
    equivalence_report,
    solve_delta_source,
    solve_modal,
)

INTERIOR = np.linspace(0.05, math.pi - 0.05, 64)


def _zero_t(t):
    return np.zeros_like(np.asarray(t, dtype=float))


def _zero_f(t, x):
    return np.zeros_like(np.asarray(x, dtype=float))


def _problem(b0=_zero_t, bpi=_zero_t, f=_zero_f, n_modes=8,
             window=10.0, t_samples=101, x_grid=INTERIOR):
    return OneDProblem(b0=b0, bpi=bpi, f=f, n_modes=n_modes,
                       t_grid=np.linspace(0.0, window, t_samples),
                       x_grid=x_grid)


class TestProblemValidation:
    def test_rejects_empty_truncation(self):
        with pytest.raises(ValueError):
            _problem(n_modes=0)

    def test_rejects_time_grid_not_from_zero(self):
        with pytest.raises(ValueError):
            OneDProblem(b0=_zero_t, bpi=_zero_t, f=_zero_f, n_modes=4,
                        t_grid=np.linspace(1.0, 2.0, 11), x_grid=INTERIOR)

    def test_rejects_decreasing_time_grid(self):
        with pytest.raises(ValueError):
            OneDProblem(b0=_zero_t, bpi=_zero_t, f=_zero_f, n_modes=4,
                        t_grid=np.array([0.0, 0.5, 0.4]), x_grid=INTERIOR)

    def test_rejects_positions_outside_segment(self):
        with pytest.raises(ValueError):
            _problem(x_grid=np.array([0.1, 3.2]))
        with pytest.raises(ValueError):
            _problem(x_grid=np.array([-0.1, 0.5]))


class TestZeroData:
    def test_both_solvers_stay_silent(self):
        prob = _problem()
        assert np.all(solve_modal(prob) == 0.0)
        assert np.all(solve_delta_source(prob) == 0.0)


class TestResonantInteriorSource:
    # f(t,x) = cos(x) sin(t) resonates with mode 1:
    # w(t,x) = (sin t - t cos t)/2 * cos(x), every other mode silent.
    def _prob(self):
        def f(t, x):
            return np.cos(x) * math.sin(t)
        return _problem(f=f, n_modes=4, t_samples=201)

    def _closed(self, prob):
        t = prob.t_grid[:, None]
        x = prob.x_grid[None, :]
        return 0.5 * (np.sin(t) - t * np.cos(t)) * np.cos(x)

    def test_modal_solver(self):
        prob = self._prob()
        want = self._closed(prob)
        got = solve_modal(prob)
        assert got.shape == (prob.t_grid.size, prob.x_grid.size)
        assert np.max(np.abs(got - want)) <= 1e-7 * np.max(np.abs(want))

    def test_delta_source_solver(self):
        prob = self._prob()
        want = self._closed(prob)
        got = solve_delta_source(prob)
        assert np.max(np.abs(got - want)) <= 2e-6 * np.max(np.abs(want))


class TestBoundaryDrive:
    # b0(t) = sin t through the surface-source translation:
    # w = (t - sin t)/pi + (2/pi) (sin t - t cos t)/2 cos(x)
    #     + (2/pi) sum_{n>=2} [n sin t - sin(nt)] / (n (n^2-1)) cos(nx).
    def _prob(self, n_modes=32):
        return _problem(b0=lambda t: np.sin(t), n_modes=n_modes,
                        t_samples=201)

    def _closed(self, prob):
        t = prob.t_grid[:, None]
        x = prob.x_grid[None, :]
        w = (t - np.sin(t)) / math.pi * np.ones_like(x)
        w = w + (2.0 / math.pi) * 0.5 * (np.sin(t) - t * np.cos(t)) * np.cos(x)
        for n in range(2, prob.n_modes + 1):
            w = w + (2.0 / math.pi) \
                * (n * np.sin(t) - np.sin(n * t)) / (n * (n * n - 1)) \
                * np.cos(n * x)
        return w

    def test_modal_solver(self):
        prob = self._prob()
        want = self._closed(prob)
        got = solve_modal(prob)
        err = np.linalg.norm(got - want) / np.linalg.norm(want)
        assert err <= 1e-5

    def test_delta_source_solver(self):
        prob = self._prob()
        want = self._closed(prob)
        got = solve_delta_source(prob)
        err = np.linalg.norm(got - want) / np.linalg.norm(want)
        assert err <= 1e-5

    def test_every_mode_responds(self):
        # The end source feeds all cosine modes; check a high one is alive.
        prob = self._prob(n_modes=12)
        got = solve_modal(prob)
        basis = np.cos(12 * prob.x_grid)
        coeff = (got * basis).sum(axis=1)
        assert np.max(np.abs(coeff)) > 0.0


class TestMethodEquivalence:
    def test_hand_built_mixed_data(self):
        def b0(t):
            return np.sin(1.3 * t) + 0.4 * np.cos(2.7 * t + 0.3)

        def bpi(t):
            return 0.7 * np.sin(0.8 * t + 1.1)

        def f(t, x):
            return (math.sin(2.2 * t) * np.cos(2.0 * x)
                    + 0.5 * math.cos(0.9 * t) * np.cos(5.0 * x))

        prob = _problem(b0=b0, bpi=bpi, f=f, n_modes=32, t_samples=201,
                        x_grid=np.linspace(0.05, math.pi - 0.05, 128))
        wa = solve_modal(prob)
        wb = solve_delta_source(prob)
        rel = np.linalg.norm(wa - wb) / np.linalg.norm(wa)
        assert rel <= 1e-6

    @pytest.mark.parametrize("seed", [2026, 7])
    def test_seeded_report(self, seed):
        report = equivalence_report(seed=seed)
        assert report.n_modes == 32
        assert report.threshold == 1e-6
        assert report.rel_l2 <= report.threshold
        assert report.passed

    def test_report_is_deterministic(self):
        a = equivalence_report(seed=11, n_modes=8, window=4.0,
                               t_samples=81, x_samples=32)
        b = equivalence_report(seed=11, n_modes=8, window=4.0,
                               t_samples=81, x_samples=32)
        assert a.rel_l2 == b.rel_l2


class TestStabilityGuard:
    def test_oversized_step_rejected(self):
        prob = _problem(n_modes=32)
        with pytest.raises(UndersampledError):
            solve_modal(prob, dt=0.2)
        with pytest.raises(UndersampledError):
            solve_delta_source(prob, dt=0.2)

    def test_default_step_is_stable(self):
        # The built-in step rule keeps n*dt far inside the RK4 stability
        # interval for any truncation.
        prob = _problem(n_modes=500, window=0.5, t_samples=11)
        out = solve_modal(prob)
        assert np.all(np.isfinite(out))
