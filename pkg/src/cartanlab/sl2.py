"""Boundary action of SU(1,1) on truncated Fourier series and its intertwiners.

An element g = (a, b; conj(b), conj(a)) with |a|^2 - |b|^2 = 1 acts on the
circle by the Moebius map z -> (a z + b) / (conj(b) z + conj(a)) and on a
series f by

    (T_s(g) f)(z) = f(z^[g]) |conj(b) z + conj(a)|^(s-1),

a unitary action for the weighted norms of `fourier`.  The module provides
the one- and two-variable actions on truncated series, the diagonal
restriction intertwiner and its exact truncated operator norm, and the
residual of the singular multiplier that carries the tensor action to the
plain L^2 action.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from .errors import ContractError, ParameterError
from .fourier import (
    FourierSeries1,
    FourierSeries2,
    _analysis2,
    _sin_power_values,
    _synthesis2,
    comp_series_norm_sq,
    norm_weights,
    restrict_diagonal,
)

__all__ = [
    "SU11Element",
    "random_su11",
    "act_comp_series",
    "act_tensor",
    "intertwining_residual",
    "restriction_norm_estimate",
    "RestrictionNormCurve",
    "restriction_norm_curve",
    "j_operator_residual",
]

_INVARIANT_TOL = 1e-12


class SU11Element:
    """Group element (a, b; conj(b), conj(a)) with |a|^2 - |b|^2 = 1."""

    __slots__ = ("a", "b")

    def __init__(self, a: complex, b: complex):
        a = complex(a)
        b = complex(b)
        defect = abs(a) ** 2 - abs(b) ** 2 - 1.0
        if not math.isfinite(defect) or abs(defect) > _INVARIANT_TOL:
            raise ContractError(f"|a|^2 - |b|^2 = 1 violated by {defect:.3e}")
        object.__setattr__(self, "a", a)
        object.__setattr__(self, "b", b)

    def __setattr__(self, name, value):
        raise AttributeError("SU11Element is immutable")

    @classmethod
    def identity(cls) -> "SU11Element":
        return cls(1.0, 0.0)

    @classmethod
    def rotation(cls, theta: float) -> "SU11Element":
        """diag(e^{i theta}, e^{-i theta}): rotates the boundary by 2 theta."""
        return cls(cmath.exp(1j * theta), 0.0)

    def compose(self, other: "SU11Element") -> "SU11Element":
        """Matrix product self @ other."""
        a = self.a * other.a + self.b * np.conj(other.b)
        b = self.a * other.b + self.b * np.conj(other.a)
        return SU11Element(a, b)

    def inverse(self) -> "SU11Element":
        return SU11Element(np.conj(self.a), -self.b)

    def is_identity(self) -> bool:
        return self.a == 1.0 and self.b == 0.0

    def matrix(self) -> np.ndarray:
        return np.array([[self.a, self.b], [np.conj(self.b), np.conj(self.a)]])

    def __repr__(self) -> str:
        return f"SU11Element(a={self.a:.12g}, b={self.b:.12g})"


def random_su11(seed, scale: float) -> SU11Element:
    """Exponentiate a random element of the Lie algebra span of
    {(i,0;0,-i), (0,1;1,0), (0,i;-i,0)} with coefficients uniform in
    [-scale, scale].

    `seed` may be an integer or a numpy Generator.  The exponential has the
    closed form exp(X) = cosh(r) I + sinhc(r) X with r^2 = |beta|^2 - alpha^2,
    so the group invariant holds to machine precision by construction.
    """
    scale = float(scale)
    if scale < 0.0:
        raise ParameterError(f"scale must be >= 0, got {scale}")
    rng = seed if isinstance(seed, np.random.Generator) else np.random.default_rng(seed)
    alpha, b1, b2 = rng.uniform(-scale, scale, size=3)
    delta = b1 * b1 + b2 * b2 - alpha * alpha
    if delta > 0.0:
        r = math.sqrt(delta)
        ch, shc = math.cosh(r), math.sinh(r) / r
    elif delta < 0.0:
        r = math.sqrt(-delta)
        ch, shc = math.cos(r), math.sin(r) / r
    else:
        ch, shc = 1.0, 1.0
    return SU11Element(ch + 1j * alpha * shc, (b1 + 1j * b2) * shc)


def _check_grid(gridN: int, order: int) -> int:
    gridN = int(gridN)
    if gridN < 1 or gridN & (gridN - 1) != 0:
        raise ParameterError(f"gridN must be a power of two, got {gridN}")
    if gridN < 4 * (2 * order + 1):
        raise ParameterError(f"gridN must be >= 4(2N+1) = {4 * (2 * order + 1)}, got {gridN}")
    return gridN


def _boundary_map(g: SU11Element, gridN: int):
    """Angles psi_j of the moved grid points and |conj(b) z_j + conj(a)|."""
    phis = 2.0 * np.pi * np.arange(gridN) / gridN
    z = np.exp(1j * phis)
    den = np.conj(g.b) * z + np.conj(g.a)
    psi = np.angle((g.a * z + g.b) / den)
    return psi, np.abs(den)


def _acted_values1(g: SU11Element, coeffs: np.ndarray, s: float, gridN: int) -> np.ndarray:
    K = (coeffs.shape[0] - 1) // 2
    psi, absden = _boundary_map(g, gridN)
    ns = np.arange(-K, K + 1)
    vals = np.exp(1j * np.outer(psi, ns)) @ coeffs
    vals *= absden ** (s - 1.0)
    return vals


def _acted_values2(g: SU11Element, coeffs: np.ndarray, s1: float, s2: float, gridN: int) -> np.ndarray:
    K = (coeffs.shape[0] - 1) // 2
    psi, absden = _boundary_map(g, gridN)
    ns = np.arange(-K, K + 1)
    E = np.exp(1j * np.outer(psi, ns))
    vals = E @ coeffs @ E.T
    vals *= np.outer(absden ** (s1 - 1.0), absden ** (s2 - 1.0))
    return vals


def _analysis1(vals: np.ndarray, out_order: int) -> np.ndarray:
    gridN = vals.shape[0]
    spec = np.fft.fft(vals) / gridN
    return spec[np.arange(-out_order, out_order + 1) % gridN]


def act_comp_series(g: SU11Element, f: FourierSeries1, s: float, gridN: int) -> FourierSeries1:
    """Apply T_s(g): evaluate f at the moved grid points, multiply by the
    automorphy factor |conj(b) z + conj(a)|^{s-1}, transform back, truncate
    to the input order."""
    N = f.order
    gridN = _check_grid(gridN, N)
    if g.is_identity():
        return f
    return FourierSeries1(_analysis1(_acted_values1(g, f.coeffs, s, gridN), N))


def act_tensor(g: SU11Element, F: FourierSeries2, s1: float, s2: float, gridN: int) -> FourierSeries2:
    """Two-variable action with factor |.|^{s1-1} |.|^{s2-1}, both variables
    moved by the same g."""
    N = F.order
    gridN = _check_grid(gridN, N)
    if g.is_identity():
        return F
    return FourierSeries2(_analysis2(_acted_values2(g, F.coeffs, s1, s2, gridN), N))


def _next_pow2(n: int) -> int:
    return 1 << (int(n) - 1).bit_length()


def intertwining_residual(g: SU11Element, F: FourierSeries2, s1: float, s2: float, gridN: int) -> float:
    """H_{s1+s2-1}-norm defect of the diagonal-restriction intertwiner:

        || restrict(T_{s1} x T_{s2}(g) F) - T_{s1+s2-1}(g) restrict(F) ||.

    The restricted series has order 2N, so the one-variable leg runs on an
    enlarged power-of-two grid when gridN < 4(2(2N)+1); that leg is
    spectrally converged, so the enlargement does not mask grid effects on
    the tensor side.
    """
    s_out = s1 + s2 - 1.0
    if not (-1.0 < s_out < 1.0) or s_out == 0.0:
        raise ParameterError(f"s1+s2-1 must lie in (-1,1) excluding 0, got {s_out}")
    N = F.order
    left = restrict_diagonal(act_tensor(g, F, s1, s2, gridN))
    grid1 = max(gridN, _next_pow2(4 * (2 * (2 * N) + 1)))
    right = act_comp_series(g, restrict_diagonal(F), s_out, grid1)
    return math.sqrt(comp_series_norm_sq(left - right, s_out))


def restriction_norm_estimate(s1: float, s2: float, N: int) -> float:
    """Exact operator norm rho(N) of diagonal restriction from the order-N
    weighted tensor space to the unweighted ell^2 of the restricted modes.

    The restriction is block-diagonal over k = n + m; each block is a linear
    functional of norm (sum_{n+m=k} gamma_n(s1)^{-1} gamma_m(s2)^{-1})^{1/2},
    and rho(N) is the largest block norm.  Bounded in N exactly when
    s1 + s2 > 1.
    """
    if N < 0:
        raise ParameterError(f"N must be >= 0, got {N}")
    inv1 = 1.0 / norm_weights(N, s1).weights
    inv2 = 1.0 / norm_weights(N, s2).weights
    return float(np.sqrt(np.convolve(inv1, inv2).max()))


class RestrictionNormCurve:
    """Sampled growth curve N -> rho(N) for fixed (s1, s2)."""

    __slots__ = ("s1", "s2", "points")

    def __init__(self, s1: float, s2: float, points):
        pts = [(int(N), float(rho)) for N, rho in points]
        if any(rho <= 0.0 for _, rho in pts):
            raise ContractError("restriction norms must be positive")
        for (n0, r0), (n1, r1) in zip(pts, pts[1:]):
            if n1 <= n0:
                raise ContractError("curve points must have increasing N")
            if r1 < r0 * (1.0 - 1e-12):
                raise ContractError("rho(N) must be non-decreasing in N")
        object.__setattr__(self, "s1", float(s1))
        object.__setattr__(self, "s2", float(s2))
        object.__setattr__(self, "points", tuple(pts))

    def __setattr__(self, name, value):
        raise AttributeError("RestrictionNormCurve is immutable")


def restriction_norm_curve(s1: float, s2: float, orders) -> RestrictionNormCurve:
    """Evaluate rho(N) along the given truncation orders."""
    pts = [(N, restriction_norm_estimate(s1, s2, N)) for N in orders]
    return RestrictionNormCurve(s1, s2, pts)


def j_operator_residual(g: SU11Element, F: FourierSeries2, s: float, gridN: int) -> float:
    """L^2(T^2) defect of the singular intertwiner J between the tensor
    action at (s, s) and the plain L^2 action (automorphy exponent -1):

        || J (T_s x T_s(g) F) - (T_0 x T_0)(g) (J F) ||.

    J multiplies by |sin((phi1 - phi2)/2)|^{-s}, the power that vanishes on
    the diagonal for s in (-1, -1/2); the Moebius identity
    |sin((psi1-psi2)/2)| = |sin((phi1-phi2)/2)| / (|d1| |d2|) with
    d_i = conj(b) z_i + conj(a) then makes the two compositions agree
    pointwise, so the residual is pure discretization.  Both compositions
    are carried at full grid resolution (order gridN/2 - 1) on half-cell
    offset grids, and the defect is measured over the alias-clean frequency
    box |n|, |m| <= gridN/4.
    """
    s = float(s)
    if not (-1.0 < s < -0.5):
        raise ParameterError(f"s must lie in (-1, -1/2), got {s}")
    N = F.order
    gridN = _check_grid(gridN, N)
    K = (gridN - 2) // 2
    mult = _sin_power_values(gridN, -s)

    acted = _analysis2(_acted_values2(g, F.coeffs, s, s, gridN), K)
    j_after = _analysis2(_synthesis2(acted, gridN, offset2=0.5) * mult, K, offset2=0.5)

    j_first = _analysis2(_synthesis2(F.coeffs, gridN, offset2=0.5) * mult, K, offset2=0.5)
    acted_after = _analysis2(_acted_values2(g, j_first, 0.0, 0.0, gridN), K)

    box = gridN // 4
    diff = j_after - acted_after
    center = slice(K - box, K + box + 1)
    return float(np.linalg.norm(diff[center, center]))
