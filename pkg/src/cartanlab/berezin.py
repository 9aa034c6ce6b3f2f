"""Berezin pairing on the unit disc and its normalized large-parameter limit.

The pairing of two real test functions phi1, phi2 on the open unit disc is

    {phi1, phi2}_s = integral over D x D of b(z, u)^s phi1(z) phi2(u) dA dA,

    b(z, u) = (1 - |z|^2)(1 - |u|^2) / |1 - z conj(u)|^2,

the rank-one case of the Berezin kernel family.  For fixed z the kernel mass
satisfies

    integral of b(z, u)^s dA(u) = (pi / s) (1 - |z|^2)^2 (1 + O(1/s)),

so (s / pi) {phi1, phi2}_s converges, as s grows, to the weighted product

    integral of phi1(z) phi2(z) (1 - |z|^2)^2 dA(z),

the L2 pairing against the invariant density of the disc.  The normalizer is
never assumed: omega(s) is measured on a calibration function chi as
l2_reference(chi, chi) / pairing(chi, chi) and then applied to the pair
under study, and the relative gap between omega(s) {phi1, phi2}_s and the
weighted L2 reference is reported per s.

Quadrature is a tensor product of Gauss-Legendre nodes in the radius
(Jacobian r folded into the weights) and uniform trapezoid nodes in the
angle.  The integrand depends on the angles only through their difference,
so the double angular sum collapses to a circular correlation evaluated with
the FFT; the full pairing costs O(quadN^3 log quadN).

Test functions are flat-core bumps: 1 on a concentric core, identically 0
outside the support radius, a smooth monotone shoulder between.  Pairs with
overlapping cores have stable first-order corrections, which is what lets a
single calibration function track them across a decade of s.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import ContractError, DomainError, ParameterError

__all__ = [
    "DiscGrid",
    "BerezinLimitReport",
    "smooth_step",
    "smooth_bump",
    "overlapping_bump_pair",
    "calibration_function",
    "berezin_pairing",
    "l2_reference",
    "berezin_limit_experiment",
]

_GAP_CONSISTENCY_TOL = 1e-12


@dataclass(frozen=True)
class DiscGrid:
    """Tensor-product quadrature grid on the unit disc.

    Radial nodes are Gauss-Legendre points mapped to (0, 1) with the area
    Jacobian r folded into ``radial_weights``; angular nodes are uniform
    with the single trapezoid weight 2 pi / quadN.
    """

    quadN: int

    def __post_init__(self):
        if not isinstance(self.quadN, int) or isinstance(self.quadN, bool):
            raise ParameterError(f"quadN must be an integer, got {self.quadN!r}")
        if self.quadN < 4:
            raise ParameterError(f"quadN must be at least 4, got {self.quadN}")
        nodes, weights = np.polynomial.legendre.leggauss(self.quadN)
        radii = (nodes + 1.0) / 2.0
        object.__setattr__(self, "_radii", radii)
        object.__setattr__(self, "_radial_weights", (weights / 2.0) * radii)
        object.__setattr__(
            self, "_angles", 2.0 * np.pi * np.arange(self.quadN) / self.quadN
        )

    @property
    def radii(self) -> np.ndarray:
        return self._radii.copy()

    @property
    def radial_weights(self) -> np.ndarray:
        return self._radial_weights.copy()

    @property
    def angles(self) -> np.ndarray:
        return self._angles.copy()

    @property
    def angular_weight(self) -> float:
        return 2.0 * np.pi / self.quadN

    @property
    def points(self) -> np.ndarray:
        """Complex grid points, shape (quadN, quadN), rows sweep the radius."""
        return self._radii[:, None] * np.exp(1j * self._angles[None, :])

    def sample(self, fn) -> np.ndarray:
        """Evaluate a real-valued function of a complex argument on the grid."""
        values = np.asarray(fn(self.points))
        if np.iscomplexobj(values):
            if np.max(np.abs(values.imag)) > 0.0:
                raise ContractError("test function returned non-real values")
            values = values.real
        try:
            samples = np.broadcast_to(values, (self.quadN, self.quadN))
        except ValueError:
            raise ContractError(
                f"test function returned shape {values.shape}, "
                f"expected broadcastable to ({self.quadN}, {self.quadN})"
            )
        samples = np.array(samples, dtype=float)
        if not np.all(np.isfinite(samples)):
            raise ContractError("test function returned non-finite values")
        return samples

    def integrate(self, samples: np.ndarray) -> float:
        """Area integral of grid samples over the disc."""
        values = _as_samples(samples, self.quadN)
        return float(
            (self._radial_weights[:, None] * values).sum() * self.angular_weight
        )


def _as_samples(samples, quadN: int) -> np.ndarray:
    mat = np.asarray(samples)
    if np.iscomplexobj(mat):
        raise ContractError("test-function samples must be real")
    if mat.shape != (quadN, quadN):
        raise ContractError(
            f"samples have shape {mat.shape}, expected ({quadN}, {quadN})"
        )
    mat = mat.astype(float, copy=False)
    if not np.all(np.isfinite(mat)):
        raise ContractError("samples contain non-finite entries")
    return mat


def smooth_step(x) -> np.ndarray:
    """C-infinity step: 0 for x <= 0, 1 for x >= 1, strictly monotone between."""
    x = np.clip(np.asarray(x, dtype=float), 0.0, 1.0)
    with np.errstate(divide="ignore", over="ignore"):
        rise = np.where(x > 0.0, np.exp(-1.0 / np.maximum(x, 1e-300)), 0.0)
        fall = np.where(x < 1.0, np.exp(-1.0 / np.maximum(1.0 - x, 1e-300)), 0.0)
    return rise / (rise + fall)


def smooth_bump(center: complex, radius: float, core: float = 0.5):
    """Flat-core bump: 1 on |z - center| <= core*radius, 0 outside radius.

    The support must stay inside the open unit disc, so the samples describe
    a compactly supported smooth function of the disc.
    """
    center = complex(center)
    if not (math.isfinite(radius) and radius > 0.0):
        raise ParameterError(f"radius must be positive, got {radius}")
    if not (math.isfinite(core) and 0.0 < core < 1.0):
        raise ParameterError(f"core fraction must lie in (0, 1), got {core}")
    if abs(center) + radius >= 1.0:
        raise DomainError(
            f"support |z - {center}| <= {radius} is not inside the unit disc"
        )

    def fn(z):
        t = np.abs(np.asarray(z) - center) / radius
        return smooth_step((1.0 - t) / (1.0 - core))

    return fn


def overlapping_bump_pair():
    """The frozen test pair for the limit experiment: two flat-core bumps
    of radius 0.3 whose cores overlap."""
    return (
        smooth_bump(0.25 + 0.0j, 0.3, core=0.5),
        smooth_bump(0.25 + 0.22j, 0.3, core=0.5),
    )


def calibration_function():
    """The frozen calibration function: a wide flat-core bump, constant on
    the core of its support, whose self-pairing measures the normalizer."""
    return smooth_bump(0.0 + 0.0j, 0.6, core=0.5)


def _validate_s(s) -> float:
    s = float(s)
    if not math.isfinite(s):
        raise ParameterError(f"kernel exponent must be finite, got {s}")
    if s <= 0.0:
        raise ParameterError(f"kernel exponent must be positive, got {s}")
    return s


def berezin_pairing(phi1, phi2, s, quadN: int) -> float:
    """Quadrature value of the pairing {phi1, phi2}_s from grid samples.

    phi1 and phi2 are (quadN, quadN) real sample arrays as produced by
    DiscGrid.sample.  The two arguments are put in a canonical order before
    summation, so the pairing is symmetric exactly, bit for bit.
    """
    s = _validate_s(s)
    grid = DiscGrid(quadN)
    first = _as_samples(phi1, quadN)
    second = _as_samples(phi2, quadN)
    if second.tobytes() < first.tobytes():
        first, second = second, first

    radii = grid._radii
    radial_weights = grid._radial_weights
    cos_diff = np.cos(grid._angles)
    log_one_minus_r2 = np.log1p(-radii * radii)
    first_hat = np.fft.fft(first, axis=1)
    second_hat = np.fft.fft(second, axis=1)

    total = 0.0
    for i in range(quadN):
        t = radii[i] * radii
        # |1 - z conj(u)|^2 = 1 - 2 t cos(dtheta) + t^2 at radial pair (i, j)
        log_mod = np.log1p(
            -2.0 * t[:, None] * cos_diff[None, :] + (t * t)[:, None]
        )
        weight = np.exp(
            s * (log_one_minus_r2[i] + log_one_minus_r2[:, None] - log_mod)
        )
        weight_hat = np.fft.fft(weight, axis=1)
        # circular correlation: sum_{a,b} w(a-b) f(a) g(b) for real f
        row = (
            weight_hat * np.conj(first_hat[i])[None, :] * second_hat
        ).sum(axis=1).real / quadN
        total += radial_weights[i] * (radial_weights * row).sum()
    return float(total * grid.angular_weight ** 2)


def l2_reference(phi1, phi2, quadN: int) -> float:
    """Weighted L2 pairing of grid samples against the density (1 - |z|^2)^2.

    This is the limiting form of the normalized Berezin pairing: for fixed z
    the kernel mass is (pi / s)(1 - |z|^2)^2 (1 + O(1/s)).
    """
    grid = DiscGrid(quadN)
    first = _as_samples(phi1, quadN)
    second = _as_samples(phi2, quadN)
    density = grid._radial_weights * (1.0 - grid._radii ** 2) ** 2
    return float((density[:, None] * (first * second)).sum() * grid.angular_weight)


@dataclass(frozen=True)
class BerezinLimitReport:
    """One row of the limit experiment at a fixed kernel exponent s."""

    s: float
    omega: float
    pairing: float
    l2_reference: float
    relative_gap: float

    def __post_init__(self):
        for name in ("s", "omega", "pairing", "l2_reference", "relative_gap"):
            value = getattr(self, name)
            if not (isinstance(value, (int, float)) and math.isfinite(value)):
                raise ContractError(f"{name} must be a finite real, got {value!r}")
        if self.l2_reference == 0.0:
            raise ContractError("relative gap undefined for a zero L2 reference")
        expected = abs(self.omega * self.pairing - self.l2_reference) / abs(
            self.l2_reference
        )
        if abs(self.relative_gap - expected) > _GAP_CONSISTENCY_TOL * max(
            1.0, expected
        ):
            raise ContractError(
                f"relative_gap {self.relative_gap} is inconsistent with the "
                f"fields, expected {expected}"
            )


def berezin_limit_experiment(s_list, phi1, phi2, quadN: int):
    """Normalized-limit reports for a pair of test functions.

    For each s the normalizer omega(s) is measured on the calibration
    function chi as l2_reference(chi, chi) / pairing(chi, chi), then the
    relative gap between omega(s) {phi1, phi2}_s and the weighted L2
    reference of the pair is reported.
    """
    exponents = [_validate_s(s) for s in s_list]
    if not exponents:
        raise ParameterError("s_list must be non-empty")
    grid = DiscGrid(quadN)
    first = _as_samples(phi1, quadN)
    second = _as_samples(phi2, quadN)
    reference = l2_reference(first, second, quadN)
    if reference == 0.0:
        raise ContractError(
            "test pair has zero L2 reference; the relative gap is undefined"
        )
    chi = grid.sample(calibration_function())
    chi_reference = l2_reference(chi, chi, quadN)
    reports = []
    for s in exponents:
        omega = chi_reference / berezin_pairing(chi, chi, s, quadN)
        value = berezin_pairing(first, second, s, quadN)
        gap = abs(omega * value - reference) / abs(reference)
        reports.append(
            BerezinLimitReport(
                s=s,
                omega=omega,
                pairing=value,
                l2_reference=reference,
                relative_gap=gap,
            )
        )
    return reports
