"""Tests for boundary-trace pairings, diagnostics, and ladder experiments."""

import math

import numpy as np
import pytest

from cartanlab.errors import ContractError, ParameterError
from cartanlab.trace import (
    CurveSpec,
    PowerSeriesFunction,
    TraceDiagnostic,
    bandlimited_test_function,
    default_c_ladder,
    edge_profile_function,
    l1_boundary_check,
    radial_trace_pairing,
    sphere_coordinate_circle,
    sphere_helix,
    sphere_real_circle,
    timelike_margin,
    torus_winding_curve,
    trace_convergence_experiment,
    transversality_margin,
)


def _monomial(shape, index):
    coeff = np.zeros(shape, dtype=complex)
    coeff[index] = 1.0
    return PowerSeriesFunction(coeff, growth_exponent=0.0, growth_constant=1.0)


class TestPowerSeriesFunction:
    def test_growth_budget_accepts_exact_profile(self):
        k = np.arange(6, dtype=float)
        coeff = np.outer((1.0 + k) ** 1.5, (1.0 + k) ** 1.5)
        f = PowerSeriesFunction(coeff, growth_exponent=1.5, growth_constant=1.0)
        assert f.degree_caps == (5, 5)

    def test_growth_budget_violation_polydisc(self):
        coeff = np.zeros((4, 4), dtype=complex)
        coeff[3, 3] = 50.0
        with pytest.raises(ContractError):
            PowerSeriesFunction(coeff, growth_exponent=1.0, growth_constant=1.0)

    def test_ball_budget_tighter_than_polydisc(self):
        coeff = np.zeros((4, 4), dtype=complex)
        coeff[3, 3] = 10.0
        PowerSeriesFunction(coeff, growth_exponent=1.0, growth_constant=1.0)
        with pytest.raises(ContractError):
            PowerSeriesFunction(coeff, growth_exponent=1.0, growth_constant=1.0, domain_kind="ball")

    def test_rejects_bad_parameters(self):
        good = np.ones((2, 2))
        with pytest.raises(ParameterError):
            PowerSeriesFunction(np.ones(0), growth_exponent=0.0, growth_constant=1.0)
        with pytest.raises(ParameterError):
            PowerSeriesFunction(good, growth_exponent=np.nan, growth_constant=1.0)
        with pytest.raises(ParameterError):
            PowerSeriesFunction(good, growth_exponent=0.0, growth_constant=0.0)
        with pytest.raises(ParameterError):
            PowerSeriesFunction(good, growth_exponent=0.0, growth_constant=1.0, domain_kind="cube")
        with pytest.raises(ContractError):
            PowerSeriesFunction(np.array([[1.0, np.inf]]), growth_exponent=0.0, growth_constant=1.0)

    def test_coefficients_read_only(self):
        f = _monomial((3, 3), (1, 1))
        with pytest.raises(ValueError):
            f.coefficients[0, 0] = 2.0

    def test_evaluate_matches_direct_sum(self):
        rng = np.random.default_rng(401)
        coeff = rng.standard_normal((4, 3)) + 1j * rng.standard_normal((4, 3))
        const = float(np.abs(coeff).max()) * 1.01
        f = PowerSeriesFunction(coeff, growth_exponent=0.0, growth_constant=const)
        pts = 0.7 * (rng.standard_normal((5, 2)) + 1j * rng.standard_normal((5, 2)))
        vals = f.evaluate(pts)
        for row, point in zip(vals, pts):
            direct = sum(
                coeff[k, l] * point[0] ** k * point[1] ** l
                for k in range(4)
                for l in range(3)
            )
            assert abs(row - direct) <= 1e-12 * max(1.0, abs(direct))

    def test_evaluate_rejects_bad_points(self):
        f = _monomial((2, 2), (1, 1))
        with pytest.raises(ContractError):
            f.evaluate(np.zeros((4, 3)))
        with pytest.raises(ContractError):
            f.evaluate(np.array([[np.nan, 0.0]]))

    def test_tail_bound_matches_geometric_remainder(self):
        f = PowerSeriesFunction(np.ones((9, 9)), growth_exponent=0.0, growth_constant=1.0)
        for c in (0.3, 0.6, 0.9):
            actual = 1.0 / (1.0 - c) ** 2 - ((1.0 - c ** 9) / (1.0 - c)) ** 2
            assert abs(f.tail_bound(c) - actual) <= 1e-10 * actual

    def test_tail_bound_one_variable_kinds_agree(self):
        poly = PowerSeriesFunction(np.ones(6), growth_exponent=0.5, growth_constant=2.0)
        ball = PowerSeriesFunction(
            np.ones(6), growth_exponent=0.5, growth_constant=2.0, domain_kind="ball"
        )
        assert abs(poly.tail_bound(0.7) - ball.tail_bound(0.7)) <= 1e-12 * poly.tail_bound(0.7)

    def test_tail_bound_rejects_bad_radius(self):
        f = _monomial((2, 2), (0, 0))
        for c in (0.0, 1.0, -0.5, 1.5):
            with pytest.raises(ParameterError):
                f.tail_bound(c)


class TestEdgeProfile:
    def test_moduli_follow_declared_profile(self):
        f = edge_profile_function(0.9, 0.6, 16, seed=7)
        expo = (0.9 - 1.0) / 2.0
        k = np.arange(17, dtype=float)
        expected = np.outer((1.0 + k) ** expo, (1.0 + k) ** expo)
        assert np.max(np.abs(np.abs(f.coefficients) - expected)) <= 1e-12

    def test_deterministic_in_seed(self):
        a = edge_profile_function(0.5, 0.5, 12, seed=3)
        b = edge_profile_function(0.5, 0.5, 12, seed=3)
        assert np.array_equal(a.coefficients, b.coefficients)
        c = edge_profile_function(0.5, 0.5, 12, seed=4)
        assert not np.array_equal(a.coefficients, c.coefficients)

    def test_rejects_bad_arguments(self):
        with pytest.raises(ParameterError):
            edge_profile_function(0.0, 0.5, 8, seed=1)
        with pytest.raises(ParameterError):
            edge_profile_function(0.5, 0.5, -1, seed=1)
        with pytest.raises(ParameterError):
            edge_profile_function(0.5, 0.5, 2.5, seed=1)


class TestCurveSpec:
    def test_torus_membership_enforced(self):
        t = 2.0 * np.pi * np.arange(16) / 16
        samples = np.stack([1.01 * np.exp(1j * t), np.exp(2j * t)], axis=1)
        derivs = np.stack([1j * samples[:, 0], 2j * samples[:, 1]], axis=1)
        with pytest.raises(ContractError):
            CurveSpec("torus", samples, derivs)

    def test_sphere_membership_enforced(self):
        t = 2.0 * np.pi * np.arange(16) / 16
        samples = np.stack([np.exp(1j * t), 0.1 * np.exp(1j * t)], axis=1)
        derivs = 1j * samples
        with pytest.raises(ContractError):
            CurveSpec("sphere", samples, derivs)

    def test_shape_and_kind_validation(self):
        t = 2.0 * np.pi * np.arange(16) / 16
        col = np.exp(1j * t)[:, None]
        with pytest.raises(ParameterError):
            CurveSpec("cylinder", col, 1j * col)
        with pytest.raises(ParameterError):
            CurveSpec("torus", col, 1j * col[:8])
        with pytest.raises(ParameterError):
            CurveSpec("torus", col[:2], 1j * col[:2])

    def test_factory_curves_valid_and_consistent(self):
        curve = torus_winding_curve((1, -1), 64)
        assert curve.grid_size == 64
        assert curve.n_variables == 2
        assert np.max(np.abs(np.abs(curve.samples) - 1.0)) <= 1e-14
        helix = sphere_helix((1, 2), (math.sqrt(0.5), math.sqrt(0.5)), 64)
        assert np.max(np.abs(np.linalg.norm(helix.samples, axis=1) - 1.0)) <= 1e-12

    def test_base_phase_validation(self):
        with pytest.raises(ParameterError):
            torus_winding_curve((1, 2), 32, base_phases=np.array([1.0, 0.5]))
        with pytest.raises(ParameterError):
            torus_winding_curve((1, 1.5), 32)


class TestMargins:
    def test_transversality_examples(self):
        assert abs(transversality_margin(sphere_coordinate_circle(2, 128)) - 1.0) <= 1e-12
        assert transversality_margin(sphere_real_circle(128)) <= 1e-12
        helix = sphere_helix((1, 2), (math.sqrt(0.5), math.sqrt(0.5)), 128)
        assert abs(transversality_margin(helix) - 1.5) <= 1e-12

    def test_timelike_examples(self):
        assert abs(timelike_margin(torus_winding_curve((1, 2), 128)) - 1.0) <= 1e-12
        assert abs(timelike_margin(torus_winding_curve((1, 0), 128))) <= 1e-12
        assert abs(timelike_margin(torus_winding_curve((1, -1), 128)) + 1.0) <= 1e-12

    def test_timelike_requires_torus(self):
        with pytest.raises(ParameterError):
            timelike_margin(sphere_coordinate_circle(2, 64))


class TestBandlimitedTestFunction:
    def test_flat_spectrum(self):
        G, M = 512, 9
        psi = bandlimited_test_function(G, M)
        assert np.isrealobj(psi)
        Q = np.fft.ifft(psi)
        flat = 1.0 / (2.0 * np.pi * (2 * M + 1))
        inside = np.concatenate([Q[: M + 1], Q[G - M :]])
        assert np.max(np.abs(inside - flat)) <= 1e-15
        outside = Q[M + 1 : G - M]
        assert np.max(np.abs(outside)) <= 1e-15

    def test_peak_and_mean(self):
        G, M = 256, 12
        psi = bandlimited_test_function(G, M)
        assert abs(psi[0] - 1.0 / (2.0 * np.pi)) <= 1e-14
        assert abs(psi.mean() * 2.0 * np.pi - 1.0 / (2 * M + 1)) <= 1e-14

    def test_aliasing_guard(self):
        with pytest.raises(ParameterError):
            bandlimited_test_function(16, 8)
        with pytest.raises(ParameterError):
            bandlimited_test_function(64, -1)


class TestRadialTracePairing:
    def test_constant_function_gives_trapezoid_mass(self):
        G = 256
        curve = torus_winding_curve((1, 2), G)
        psi = bandlimited_test_function(G, 5)
        f = _monomial((1, 1), (0, 0))
        value = radial_trace_pairing(f, curve, psi, 0.5)
        assert abs(value - psi.sum() * 2.0 * np.pi / G) <= 1e-15

    def test_monomial_against_single_mode(self):
        G = 256
        curve = torus_winding_curve((1, 2), G)
        psi = np.exp(-3j * curve.angles) / (2.0 * np.pi)
        f = _monomial((2, 2), (1, 1))
        for c in (0.25, 0.5, 0.9):
            assert abs(radial_trace_pairing(f, curve, psi, c) - c * c) <= 1e-13

    def test_base_phases_fold_into_pairing(self):
        G = 256
        zeta = np.exp(1j * np.array([0.7, -1.3]))
        curve = torus_winding_curve((1, 2), G, base_phases=zeta)
        psi = np.exp(-3j * curve.angles) / (2.0 * np.pi)
        f = _monomial((2, 2), (1, 1))
        expected = zeta[0] * zeta[1] * 0.36
        assert abs(radial_trace_pairing(f, curve, psi, 0.6) - expected) <= 1e-13

    def test_one_variable_monomial(self):
        G = 128
        curve = torus_winding_curve((3,), G)
        psi = np.exp(-6j * curve.angles) / (2.0 * np.pi)
        f = _monomial((4,), (2,))
        assert abs(radial_trace_pairing(f, curve, psi, 0.8) - 0.64) <= 1e-13

    def test_fast_path_matches_direct_evaluation(self):
        rng = np.random.default_rng(402)
        coeff = rng.standard_normal((25, 17)) + 1j * rng.standard_normal((25, 17))
        const = float(np.abs(coeff).max()) * 1.01
        f = PowerSeriesFunction(coeff, growth_exponent=0.0, growth_constant=const)
        G = 1024
        curve = torus_winding_curve((2, -3), G)
        psi = rng.standard_normal(G) + 1j * rng.standard_normal(G)
        fast = radial_trace_pairing(f, curve, psi, 0.77)
        direct = complex((f.evaluate(0.77 * curve.samples) * psi).sum() * 2.0 * np.pi / G)
        assert abs(fast - direct) <= 1e-12 * abs(direct)

    def test_linearity_in_the_function(self):
        rng = np.random.default_rng(403)
        G = 512
        curve = torus_winding_curve((1, -1), G)
        psi = rng.standard_normal(G) + 1j * rng.standard_normal(G)
        a = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        b = rng.standard_normal((9, 9)) + 1j * rng.standard_normal((9, 9))
        alpha, beta = 1.7 - 0.3j, -0.8 + 2.1j
        make = lambda arr: PowerSeriesFunction(
            arr, growth_exponent=0.0, growth_constant=float(np.abs(arr).max()) * 1.01
        )
        combo = radial_trace_pairing(make(alpha * a + beta * b), curve, psi, 0.6)
        split = alpha * radial_trace_pairing(make(a), curve, psi, 0.6) + beta * radial_trace_pairing(
            make(b), curve, psi, 0.6
        )
        assert abs(combo - split) <= 1e-13 * max(1.0, abs(split))

    def test_sphere_curve_uses_direct_path(self):
        G = 256
        curve = sphere_coordinate_circle(2, G)
        psi = np.exp(-1j * curve.angles) / (2.0 * np.pi)
        f = _monomial((2, 1), (1, 0))
        assert abs(radial_trace_pairing(f, curve, psi, 0.4) - 0.4) <= 1e-13

    def test_nyquist_guard(self):
        curve = torus_winding_curve((5, 7), 256)
        f = PowerSeriesFunction(np.ones((33, 33)), growth_exponent=0.0, growth_constant=1.0)
        with pytest.raises(ContractError):
            radial_trace_pairing(f, curve, np.ones(256), 0.5)
        fine = torus_winding_curve((5, 7), 1024)
        radial_trace_pairing(f, fine, np.ones(1024), 0.5)

    def test_input_validation(self):
        G = 128
        curve = torus_winding_curve((1, 2), G)
        f = _monomial((2, 2), (1, 1))
        psi = np.ones(G)
        for c in (0.0, 1.0, -0.3, np.nan):
            with pytest.raises(ParameterError):
                radial_trace_pairing(f, curve, psi, c)
        with pytest.raises(ContractError):
            radial_trace_pairing(f, curve, np.ones(G - 1), 0.5)
        with pytest.raises(ContractError):
            radial_trace_pairing(_monomial((2,), (1,)), curve, psi, 0.5)


class TestTraceDiagnostic:
    def _ladder(self, n):
        return tuple(1.0 - 2.0 ** (-k) for k in range(2, 2 + n))

    def test_verdict_convergent(self):
        pairings = [1.0, 1.0 + 0.04, 1.0 + 0.06, 1.0 + 0.07, 1.0 + 0.071]
        diag = TraceDiagnostic.from_pairings(self._ladder(5), pairings, 5e-3)
        assert diag.verdict == "CONVERGENT"

    def test_verdict_divergent(self):
        pairings = [1.0, 1.1, 1.3, 1.7, 2.5]
        diag = TraceDiagnostic.from_pairings(self._ladder(5), pairings, 5e-3)
        assert diag.verdict == "DIVERGENT"

    def test_verdict_inconclusive_on_mixed_pattern(self):
        pairings = [1.0, 1.2, 1.25, 1.5, 1.55]
        diag = TraceDiagnostic.from_pairings(self._ladder(5), pairings, 5e-3)
        assert diag.verdict == "INCONCLUSIVE"

    def test_constant_pairings_read_convergent(self):
        pairings = [2.0 + 1.0j] * 5
        diag = TraceDiagnostic.from_pairings(self._ladder(5), pairings, 5e-3)
        assert diag.verdict == "CONVERGENT"
        assert all(g == 0.0 for g in diag.cauchy_gaps)

    def test_short_ladder_is_inconclusive(self):
        diag = TraceDiagnostic.from_pairings(self._ladder(3), [1.0, 1.5, 3.0], 5e-3)
        assert diag.verdict == "INCONCLUSIVE"

    def test_rejects_inconsistent_records(self):
        ladder = self._ladder(5)
        pairings = tuple(complex(v) for v in (1.0, 1.1, 1.3, 1.7, 2.5))
        gaps = tuple(float(g) for g in np.abs(np.diff(np.asarray(pairings))))
        with pytest.raises(ContractError):
            TraceDiagnostic(ladder, pairings, gaps[:-1] + (0.123,), 5e-3, "DIVERGENT")
        with pytest.raises(ContractError):
            TraceDiagnostic(ladder, pairings, gaps, 5e-3, "CONVERGENT")

    def test_rejects_bad_structure(self):
        with pytest.raises(ParameterError):
            TraceDiagnostic.from_pairings((0.5, 0.4, 0.6, 0.7), [1, 2, 3, 4], 5e-3)
        with pytest.raises(ParameterError):
            TraceDiagnostic.from_pairings((0.5, 1.2, 1.5, 1.7), [1, 2, 3, 4], 5e-3)
        with pytest.raises(ParameterError):
            TraceDiagnostic.from_pairings((0.5,), [1.0], 5e-3)
        with pytest.raises(ParameterError):
            TraceDiagnostic.from_pairings(self._ladder(4), [1, 2, 3, 4], 0.0)

    def test_default_ladder(self):
        ladder = default_c_ladder()
        assert len(ladder) == 13
        assert ladder[0] == 0.75
        assert abs(ladder[-1] - (1.0 - 2.0 ** (-14))) <= 1e-16
        assert all(b > a for a, b in zip(ladder, ladder[1:]))


class TestConvergenceExperiment:
    def _setup(self):
        G, M = 4096, 16
        return G, bandlimited_test_function(G, M)

    def test_time_like_exponents_converge(self):
        G, psi = self._setup()
        report = trace_convergence_experiment(
            torus_winding_curve((1, 2), G), psi, (0.2, 0.2), n_trials=6, seed=3, degree_cap=256
        )
        assert report.verdict_counts["CONVERGENT"] == 6
        assert report.windings == (1, 2)
        assert report.timelike_margin > 0.0
        assert all(d.cauchy_gaps[-1] < report.tolerance for d in report.diagnostics)

    def test_anti_time_like_exponents_diverge(self):
        G, psi = self._setup()
        report = trace_convergence_experiment(
            torus_winding_curve((1, -1), G), psi, (0.9, 0.6), n_trials=6, seed=3, degree_cap=256
        )
        assert report.verdict_counts["DIVERGENT"] == 6
        assert report.timelike_margin < 0.0
        assert all(d.cauchy_gaps[-1] > 10.0 * report.tolerance for d in report.diagnostics)

    def test_polynomials_always_converge_with_vanishing_gaps(self):
        G, psi = self._setup()
        for win, s_pair in (((1, 2), (0.2, 0.2)), ((1, -1), (0.9, 0.6))):
            report = trace_convergence_experiment(
                torus_winding_curve(win, G), psi, s_pair, n_trials=6, seed=5, family="polynomial"
            )
            assert report.verdict_counts["CONVERGENT"] == 6
            assert all(d.cauchy_gaps[-1] < report.tolerance for d in report.diagnostics)

    def test_deterministic_in_seed(self):
        G, psi = self._setup()
        args = dict(n_trials=3, seed=9, degree_cap=128)
        a = trace_convergence_experiment(torus_winding_curve((1, -1), G), psi, (0.9, 0.6), **args)
        b = trace_convergence_experiment(torus_winding_curve((1, -1), G), psi, (0.9, 0.6), **args)
        for da, db in zip(a.diagnostics, b.diagnostics):
            assert da.pairings == db.pairings
            assert da.verdict == db.verdict

    def test_verdicts_stable_under_ladder_extension(self):
        G, psi = self._setup()
        full = default_c_ladder()
        curve = torus_winding_curve((1, 2), G)
        for seed in range(4):
            short = trace_convergence_experiment(
                curve, psi, (0.2, 0.2), n_trials=1, seed=seed, family="polynomial",
                c_ladder=full[:8],
            )
            extended = trace_convergence_experiment(
                curve, psi, (0.2, 0.2), n_trials=1, seed=seed, family="polynomial",
                c_ladder=full[:10],
            )
            assert short.diagnostics[0].verdict == "CONVERGENT"
            assert extended.diagnostics[0].verdict == "CONVERGENT"

    def test_tail_bounds_reported_per_trial(self):
        G, psi = self._setup()
        report = trace_convergence_experiment(
            torus_winding_curve((1, -1), G), psi, (0.9, 0.6), n_trials=4, seed=3, degree_cap=256
        )
        assert len(report.tail_bounds) == 4
        assert all(math.isfinite(t) and t > 0.0 for t in report.tail_bounds)

    def test_near_threshold_window_runs_and_counts(self):
        G, psi = self._setup()
        report = trace_convergence_experiment(
            torus_winding_curve((1, -1), G), psi, (0.5, 0.5), n_trials=4, seed=2, degree_cap=256
        )
        assert sum(report.verdict_counts.values()) == 4

    def test_requires_linear_torus_curve(self):
        G, psi = self._setup()
        with pytest.raises(ParameterError):
            trace_convergence_experiment(sphere_coordinate_circle(2, G), psi, (0.5, 0.5))
        t = 2.0 * np.pi * np.arange(G) / G
        wobble = np.exp(1j * (t + 0.2 * np.sin(t)))
        samples = np.stack([wobble, np.exp(1j * t)], axis=1)
        derivs = np.stack([1j * (1.0 + 0.2 * np.cos(t)) * wobble, 1j * np.exp(1j * t)], axis=1)
        bent = CurveSpec("torus", samples, derivs)
        with pytest.raises(ParameterError):
            trace_convergence_experiment(bent, psi, (0.5, 0.5))

    def test_parameter_validation(self):
        G, psi = self._setup()
        curve = torus_winding_curve((1, 2), G)
        with pytest.raises(ParameterError):
            trace_convergence_experiment(curve, psi, (0.2, 0.2), n_trials=0)
        with pytest.raises(ParameterError):
            trace_convergence_experiment(curve, psi, (-0.2, 0.2))
        with pytest.raises(ParameterError):
            trace_convergence_experiment(curve, psi, (0.2, 0.2), family="fourier")
        with pytest.raises(ParameterError):
            trace_convergence_experiment(curve, psi, (0.2, 0.2), burn_in_rungs=2)
        with pytest.raises(ParameterError):
            trace_convergence_experiment(curve, psi, (0.2, 0.2), c_ladder=(0.3, 0.2, 0.5, 0.6))
        with pytest.raises(ContractError):
            trace_convergence_experiment(curve, psi[:-1], (0.2, 0.2))


class TestL1BoundaryCheck:
    def test_integrable_exponent_settles_to_exact_constant(self):
        report = l1_boundary_check(0.5, n_trials=4, seed=11, grid_size=2048)
        assert report.kernel_integrable
        assert report.hypothesis_satisfied
        assert abs(report.exact_constant - 1.180340599016096) <= 1e-12
        assert report.refinement_change <= 0.01
        assert abs(report.kernel_fine - report.exact_constant) <= 0.01 * report.exact_constant
        assert report.bounded_fraction == 1.0

    def test_exact_constant_near_threshold(self):
        report = l1_boundary_check(0.9, n_trials=2, seed=11, grid_size=2048)
        assert report.kernel_integrable
        assert abs(report.exact_constant - 3.642429629126853) <= 1e-12

    def test_non_integrable_exponent_grows_under_refinement(self):
        report = l1_boundary_check(1.2, n_trials=3, seed=11, grid_size=2048)
        assert not report.kernel_integrable
        assert report.exact_constant is None
        assert not report.hypothesis_satisfied
        assert report.refinement_change >= 0.10

    def test_trace_ladders_bounded_for_kernel_expansions(self):
        report = l1_boundary_check(0.5, n_trials=5, seed=23, grid_size=1024)
        for diag in report.trace_diagnostics:
            assert diag.verdict == "CONVERGENT"
            values = np.asarray(diag.pairings)
            assert np.max(np.abs(values.imag)) <= 1e-15
            assert np.all(values.real > 0.0)

    def test_deterministic_in_seed(self):
        a = l1_boundary_check(0.5, n_trials=2, seed=7, grid_size=512)
        b = l1_boundary_check(0.5, n_trials=2, seed=7, grid_size=512)
        assert a.kernel_coarse == b.kernel_coarse
        for da, db in zip(a.trace_diagnostics, b.trace_diagnostics):
            assert da.pairings == db.pairings

    def test_parameter_validation(self):
        with pytest.raises(ParameterError):
            l1_boundary_check(-0.5)
        with pytest.raises(ParameterError):
            l1_boundary_check(0.5, grid_size=32)
        with pytest.raises(ParameterError):
            l1_boundary_check(0.5, n_trials=0)
