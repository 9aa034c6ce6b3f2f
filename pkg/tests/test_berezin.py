"""Tests for the disc quadrature grid, the Berezin pairing, and the limit experiment."""

import math

import numpy as np
import pytest

from cartanlab.berezin import (
    BerezinLimitReport,
    DiscGrid,
    berezin_limit_experiment,
    berezin_pairing,
    calibration_function,
    l2_reference,
    overlapping_bump_pair,
    smooth_bump,
    smooth_step,
)
from cartanlab.errors import ContractError, DomainError, ParameterError
from cartanlab.linalg import ComplexMatrix, hermitian_eigen
from cartanlab.seeding import derive_seed


def test_grid_shapes_and_weights():
    grid = DiscGrid(32)
    assert grid.radii.shape == (32,)
    assert grid.angles.shape == (32,)
    assert grid.points.shape == (32, 32)
    assert np.all(grid.radial_weights > 0.0)
    assert np.all((grid.radii > 0.0) & (grid.radii < 1.0))
    assert math.isclose(grid.angular_weight, 2.0 * math.pi / 32.0, rel_tol=1e-15)
    # radial weights include the Jacobian r: their sum is int_0^1 r dr = 1/2
    assert abs(grid.radial_weights.sum() - 0.5) <= 1e-14


def test_grid_integrates_disc_area():
    grid = DiscGrid(24)
    ones = grid.sample(lambda z: np.ones_like(z, dtype=float))
    assert abs(grid.integrate(ones) - math.pi) <= 1e-12


def test_grid_integrates_smooth_radial_profile():
    # int (1 - |z|^2) dA = 2 pi (1/2 - 1/4) = pi/2, exact for Gauss-Legendre
    grid = DiscGrid(16)
    samples = grid.sample(lambda z: 1.0 - np.abs(z) ** 2)
    assert abs(grid.integrate(samples) - math.pi / 2.0) <= 1e-13


@pytest.mark.parametrize("bad", [3, 0, -8, 2.5, True])
def test_grid_rejects_bad_node_count(bad):
    with pytest.raises(ParameterError):
        DiscGrid(bad)


def test_grid_sample_rejects_complex_and_nonfinite():
    grid = DiscGrid(8)
    with pytest.raises(ContractError):
        grid.sample(lambda z: z)
    with pytest.raises(ContractError):
        grid.sample(lambda z: np.where(np.abs(z) < 0.5, np.inf, 1.0))
    with pytest.raises(ContractError):
        grid.sample(lambda z: np.ones(3))


def test_grid_sample_broadcasts_constants():
    grid = DiscGrid(8)
    samples = grid.sample(lambda z: 1.0)
    assert samples.shape == (8, 8)
    assert np.all(samples == 1.0)


def test_smooth_step_endpoints_and_monotonicity():
    assert smooth_step(0.0) == 0.0
    assert smooth_step(-2.0) == 0.0
    assert smooth_step(1.0) == 1.0
    assert smooth_step(3.0) == 1.0
    xs = np.linspace(0.0, 1.0, 201)
    values = smooth_step(xs)
    assert np.all(np.diff(values) >= 0.0)
    assert np.all((values >= 0.0) & (values <= 1.0))


def test_smooth_step_symmetry():
    xs = np.linspace(0.0, 1.0, 57)
    total = smooth_step(xs) + smooth_step(1.0 - xs)
    assert np.max(np.abs(total - 1.0)) <= 1e-15


def test_smooth_bump_profile():
    bump = smooth_bump(0.25, 0.3, core=0.5)
    assert bump(0.25) == 1.0
    # flat on the whole core disc |z - c| <= 0.15
    assert bump(0.25 + 0.15j) == 1.0
    assert bump(0.25 + 0.149) == 1.0
    # vanishes outside the support radius
    assert bump(0.25 + 0.31j) == 0.0
    assert bump(-0.9) == 0.0
    # strictly between 0 and 1 on the shoulder
    mid = bump(0.25 + 0.22j)
    assert 0.0 < mid < 1.0


def test_smooth_bump_validation():
    with pytest.raises(ParameterError):
        smooth_bump(0.0, 0.0)
    with pytest.raises(ParameterError):
        smooth_bump(0.0, -0.3)
    with pytest.raises(ParameterError):
        smooth_bump(0.0, 0.3, core=0.0)
    with pytest.raises(ParameterError):
        smooth_bump(0.0, 0.3, core=1.0)
    with pytest.raises(DomainError):
        smooth_bump(0.8, 0.3)
    with pytest.raises(DomainError):
        smooth_bump(0.0, 1.0)


def test_frozen_test_functions_are_supported_and_overlap():
    grid = DiscGrid(64)
    phi1_fn, phi2_fn = overlapping_bump_pair()
    phi1 = grid.sample(phi1_fn)
    phi2 = grid.sample(phi2_fn)
    chi = grid.sample(calibration_function())
    for samples in (phi1, phi2, chi):
        assert np.all((samples >= 0.0) & (samples <= 1.0))
        assert samples.max() == 1.0
    # the pair overlaps on a region where both are identically 1
    assert np.any((phi1 == 1.0) & (phi2 == 1.0))
    assert not np.array_equal(phi1, phi2)


def test_pairing_zero_function():
    grid = DiscGrid(16)
    phi = grid.sample(smooth_bump(0.2, 0.3))
    zero = np.zeros((16, 16))
    assert berezin_pairing(phi, zero, 2.0, 16) == 0.0
    assert berezin_pairing(zero, phi, 2.0, 16) == 0.0


def test_pairing_symmetry_is_bit_exact():
    grid = DiscGrid(32)
    phi1 = grid.sample(smooth_bump(0.2, 0.3))
    phi2 = grid.sample(smooth_bump(0.1 + 0.25j, 0.35))
    forward = berezin_pairing(phi1, phi2, 3.5, 32)
    backward = berezin_pairing(phi2, phi1, 3.5, 32)
    assert forward == backward
    assert forward > 0.0


def test_pairing_positivity_of_self_pair():
    grid = DiscGrid(32)
    phi = grid.sample(smooth_bump(0.25, 0.3))
    assert berezin_pairing(phi, phi, 5.0, 32) > 0.0


@pytest.mark.parametrize("bad_s", [0.0, -1.0, -0.5, math.inf, math.nan])
def test_pairing_rejects_nonpositive_exponent(bad_s):
    grid = DiscGrid(8)
    phi = grid.sample(smooth_bump(0.2, 0.3))
    with pytest.raises(ParameterError):
        berezin_pairing(phi, phi, bad_s, 8)


def test_pairing_rejects_bad_samples():
    grid = DiscGrid(16)
    phi = grid.sample(smooth_bump(0.2, 0.3))
    with pytest.raises(ContractError):
        berezin_pairing(phi, np.zeros((8, 8)), 1.0, 16)
    with pytest.raises(ContractError):
        berezin_pairing(phi, phi.astype(complex), 1.0, 16)
    bad = phi.copy()
    bad[3, 4] = np.nan
    with pytest.raises(ContractError):
        berezin_pairing(phi, bad, 1.0, 16)


def test_pairing_is_positive_semidefinite_quadratic_form():
    """Gram of pairings over random test functions is PSD; the pairing is an
    inner product restricted to a finite family."""
    quadN = 64
    grid = DiscGrid(quadN)
    rng = np.random.default_rng(derive_seed(20260815, "berezin-psd"))
    family = []
    for _ in range(5):
        center = 0.45 * (rng.uniform(-1.0, 1.0) + 1j * rng.uniform(-1.0, 1.0))
        radius = rng.uniform(0.15, 0.35)
        core = rng.uniform(0.2, 0.7)
        family.append(grid.sample(smooth_bump(center, radius, core)))
    gram = np.array(
        [[berezin_pairing(a, b, 7.5, quadN) for b in family] for a in family]
    )
    assert np.array_equal(gram, gram.T)
    eig = hermitian_eigen(ComplexMatrix.from_rows(gram.tolist()))
    scale = max(1.0, abs(eig.eigenvalues[-1]))
    assert eig.eigenvalues[0] >= -1e-8 * scale


def test_pairing_of_disjoint_bumps_concentrates_away():
    """The kernel concentrates on the diagonal: disjoint supports give a
    pairing that collapses with s."""
    quadN = 128
    grid = DiscGrid(quadN)
    phi1 = grid.sample(smooth_bump(-0.55, 0.2))
    phi2 = grid.sample(smooth_bump(0.55, 0.2))
    scale = berezin_pairing(phi1, phi1, 25.0, quadN)
    small = berezin_pairing(phi1, phi2, 25.0, quadN)
    tiny = berezin_pairing(phi1, phi2, 100.0, quadN)
    assert abs(small) <= 1e-8 * scale
    assert abs(tiny) <= 1e-15
    assert abs(tiny) < abs(small)


def test_l2_reference_of_ones_is_weighted_disc_mass():
    # int (1 - r^2)^2 dA = 2 pi /6 = pi/3
    quadN = 24
    ones = np.ones((quadN, quadN))
    assert abs(l2_reference(ones, ones, quadN) - math.pi / 3.0) <= 1e-13


def test_l2_reference_disjoint_supports_vanish():
    quadN = 64
    grid = DiscGrid(quadN)
    phi1 = grid.sample(smooth_bump(-0.55, 0.2))
    phi2 = grid.sample(smooth_bump(0.55, 0.2))
    assert l2_reference(phi1, phi2, quadN) == 0.0
    assert l2_reference(phi1, phi1, quadN) > 0.0


def test_limit_report_invariant():
    report = BerezinLimitReport(
        s=10.0, omega=2.0, pairing=3.0, l2_reference=5.0, relative_gap=0.2
    )
    assert report.relative_gap == 0.2
    with pytest.raises(ContractError):
        BerezinLimitReport(
            s=10.0, omega=2.0, pairing=3.0, l2_reference=5.0, relative_gap=0.3
        )
    with pytest.raises(ContractError):
        BerezinLimitReport(
            s=10.0, omega=2.0, pairing=3.0, l2_reference=0.0, relative_gap=0.0
        )
    with pytest.raises(ContractError):
        BerezinLimitReport(
            s=math.nan, omega=2.0, pairing=3.0, l2_reference=5.0, relative_gap=0.2
        )


def test_experiment_calibration_function_has_zero_gap():
    quadN = 48
    grid = DiscGrid(quadN)
    chi = grid.sample(calibration_function())
    reports = berezin_limit_experiment([5.0, 20.0], chi, chi, quadN)
    assert len(reports) == 2
    assert all(r.relative_gap <= 1e-13 for r in reports)
    assert all(r.omega > 0.0 for r in reports)


def test_experiment_gap_decreases_for_overlapping_pair():
    quadN = 128
    grid = DiscGrid(quadN)
    phi1_fn, phi2_fn = overlapping_bump_pair()
    phi1 = grid.sample(phi1_fn)
    phi2 = grid.sample(phi2_fn)
    reports = berezin_limit_experiment([50.0, 100.0], phi1, phi2, quadN)
    assert [r.s for r in reports] == [50.0, 100.0]
    assert reports[1].relative_gap < reports[0].relative_gap
    assert reports[0].relative_gap <= 0.05
    assert reports[1].relative_gap <= 0.02
    # reference is s-independent
    assert reports[0].l2_reference == reports[1].l2_reference
    assert all(r.pairing > 0.0 for r in reports)


def test_experiment_gap_decreases_for_self_pair():
    """Fixed bump paired with itself: the gap at s=100 beats the gap at s=50."""
    quadN = 128
    grid = DiscGrid(quadN)
    phi = grid.sample(smooth_bump(0.3, 0.3))
    reports = berezin_limit_experiment([50.0, 100.0], phi, phi, quadN)
    assert reports[1].relative_gap < reports[0].relative_gap


def test_experiment_normalizer_scales_linearly():
    """omega(s) grows like s times a constant: doubling s roughly doubles it."""
    quadN = 128
    grid = DiscGrid(quadN)
    phi1_fn, phi2_fn = overlapping_bump_pair()
    phi1 = grid.sample(phi1_fn)
    phi2 = grid.sample(phi2_fn)
    reports = berezin_limit_experiment([50.0, 100.0], phi1, phi2, quadN)
    ratio = reports[1].omega / reports[0].omega
    assert 1.8 <= ratio <= 2.2


def test_experiment_validation():
    quadN = 16
    grid = DiscGrid(quadN)
    phi = grid.sample(smooth_bump(0.2, 0.3))
    with pytest.raises(ParameterError):
        berezin_limit_experiment([], phi, phi, quadN)
    with pytest.raises(ParameterError):
        berezin_limit_experiment([1.0, -2.0], phi, phi, quadN)
    far1 = grid.sample(smooth_bump(-0.55, 0.2))
    far2 = grid.sample(smooth_bump(0.55, 0.2))
    with pytest.raises(ContractError):
        berezin_limit_experiment([2.0], far1, far2, quadN)
