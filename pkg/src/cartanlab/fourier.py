"""Truncated Fourier series on the circle and torus with complementary-series norms.

A series of order N stores coefficients c_n for n in [-N, N] (one variable)
or c_{n,m} on the square [-N, N]^2 (two variables).  The norm weights
gamma_n(s) = Gamma(|n| + (1+s)/2) / Gamma(|n| + (1-s)/2) grow like |n|^s,
so the weighted ell^2 norms realize Sobolev norms on the circle.

Grid transforms use the convention

    analysis:   c_n = (1/M) sum_j f(phi_j) e^{-i n phi_j},   phi_j = 2 pi j / M
    synthesis:  f(phi_j) = sum_n c_n e^{i n phi_j}

so a constant function has c_0 equal to its value and a synthesis/analysis
round trip is exact for band-limited data.
"""

from __future__ import annotations

import math

import numpy as np

from .errors import ContractError, DivergenceError, ParameterError
from .linalg import log_gamma

__all__ = [
    "FourierSeries1",
    "FourierSeries2",
    "NormWeights",
    "comp_series_weight",
    "norm_weights",
    "comp_series_norm_sq",
    "tensor_norm_sq",
    "restrict_diagonal",
    "grid_transform",
    "multiply_sin_power",
    "sin_power_coefficients",
    "random_smooth_series1",
    "random_smooth_series2",
]


def _as_coeff_array(coeffs, dims):
    arr = np.asarray(coeffs, dtype=complex)
    if arr.ndim != dims:
        raise ContractError(f"expected a {dims}-dimensional coefficient array, got shape {arr.shape}")
    for size in arr.shape:
        if size % 2 != 1:
            raise ContractError(f"coefficient axes must have odd length 2N+1, got shape {arr.shape}")
    if dims == 2 and arr.shape[0] != arr.shape[1]:
        raise ContractError(f"two-variable coefficients must be square, got shape {arr.shape}")
    if not np.all(np.isfinite(arr.view(float))):
        raise ContractError("coefficients must be finite")
    arr = np.ascontiguousarray(arr)
    arr.flags.writeable = False
    return arr


class FourierSeries1:
    """Truncated series f(phi) = sum_{|n| <= N} c_n e^{i n phi}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _as_coeff_array(coeffs, 1))

    def __setattr__(self, name, value):
        raise AttributeError("FourierSeries1 is immutable")

    @property
    def order(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @classmethod
    def zeros(cls, order: int) -> "FourierSeries1":
        return cls(np.zeros(2 * order + 1, dtype=complex))

    @classmethod
    def basis(cls, n: int, order: int) -> "FourierSeries1":
        """The single mode e^{i n phi} at truncation order `order`."""
        if abs(n) > order:
            raise ParameterError(f"mode {n} exceeds order {order}")
        c = np.zeros(2 * order + 1, dtype=complex)
        c[n + order] = 1.0
        return cls(c)

    def coefficient(self, n: int) -> complex:
        N = self.order
        if abs(n) > N:
            return 0.0 + 0.0j
        return complex(self.coeffs[n + N])

    def with_order(self, order: int) -> "FourierSeries1":
        """Zero-pad or truncate to the requested order."""
        N = self.order
        if order == N:
            return self
        out = np.zeros(2 * order + 1, dtype=complex)
        k = min(N, order)
        out[order - k : order + k + 1] = self.coeffs[N - k : N + k + 1]
        return FourierSeries1(out)

    def evaluate(self, phis):
        """Evaluate the series at the given angles (any array shape)."""
        phis = np.asarray(phis, dtype=float)
        N = self.order
        w = np.exp(1j * phis)
        # Horner in w for n >= 0 and in conj(w) for n < 0.
        pos = np.full_like(w, self.coeffs[2 * N])
        for n in range(N - 1, -1, -1):
            pos = pos * w + self.coeffs[n + N]
        if N == 0:
            return pos
        wc = np.conj(w)
        neg = np.full_like(w, self.coeffs[0])
        for n in range(N - 1, 0, -1):
            neg = neg * wc + self.coeffs[N - n]
        return pos + neg * wc

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: "FourierSeries1") -> "FourierSeries1":
        order = max(self.order, other.order)
        return FourierSeries1(self.with_order(order).coeffs + other.with_order(order).coeffs)

    def __sub__(self, other: "FourierSeries1") -> "FourierSeries1":
        order = max(self.order, other.order)
        return FourierSeries1(self.with_order(order).coeffs - other.with_order(order).coeffs)

    def __mul__(self, scalar) -> "FourierSeries1":
        return FourierSeries1(self.coeffs * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"FourierSeries1(order={self.order}, l2={self.l2_norm():.6g})"


class FourierSeries2:
    """Truncated series F(phi1, phi2) = sum c_{n,m} e^{i n phi1} e^{i m phi2}."""

    __slots__ = ("coeffs",)

    def __init__(self, coeffs):
        object.__setattr__(self, "coeffs", _as_coeff_array(coeffs, 2))

    def __setattr__(self, name, value):
        raise AttributeError("FourierSeries2 is immutable")

    @property
    def order(self) -> int:
        return (self.coeffs.shape[0] - 1) // 2

    @classmethod
    def zeros(cls, order: int) -> "FourierSeries2":
        n = 2 * order + 1
        return cls(np.zeros((n, n), dtype=complex))

    @classmethod
    def basis(cls, n: int, m: int, order: int) -> "FourierSeries2":
        if max(abs(n), abs(m)) > order:
            raise ParameterError(f"mode ({n},{m}) exceeds order {order}")
        c = np.zeros((2 * order + 1, 2 * order + 1), dtype=complex)
        c[n + order, m + order] = 1.0
        return cls(c)

    @classmethod
    def outer(cls, f: FourierSeries1, h: FourierSeries1) -> "FourierSeries2":
        """Rank-one product f(phi1) h(phi2)."""
        order = max(f.order, h.order)
        return cls(np.outer(f.with_order(order).coeffs, h.with_order(order).coeffs))

    def coefficient(self, n: int, m: int) -> complex:
        N = self.order
        if max(abs(n), abs(m)) > N:
            return 0.0 + 0.0j
        return complex(self.coeffs[n + N, m + N])

    def with_order(self, order: int) -> "FourierSeries2":
        N = self.order
        if order == N:
            return self
        out = np.zeros((2 * order + 1, 2 * order + 1), dtype=complex)
        k = min(N, order)
        out[order - k : order + k + 1, order - k : order + k + 1] = self.coeffs[
            N - k : N + k + 1, N - k : N + k + 1
        ]
        return FourierSeries2(out)

    def evaluate_grid(self, phis1, phis2):
        """Values on the product grid phis1 x phis2 (returns len1 x len2 array)."""
        phis1 = np.atleast_1d(np.asarray(phis1, dtype=float))
        phis2 = np.atleast_1d(np.asarray(phis2, dtype=float))
        ns = np.arange(-self.order, self.order + 1)
        e1 = np.exp(1j * np.outer(phis1, ns))
        e2 = np.exp(1j * np.outer(phis2, ns))
        return e1 @ self.coeffs @ e2.T

    def l2_norm(self) -> float:
        return float(np.linalg.norm(self.coeffs))

    def __add__(self, other: "FourierSeries2") -> "FourierSeries2":
        order = max(self.order, other.order)
        return FourierSeries2(self.with_order(order).coeffs + other.with_order(order).coeffs)

    def __sub__(self, other: "FourierSeries2") -> "FourierSeries2":
        order = max(self.order, other.order)
        return FourierSeries2(self.with_order(order).coeffs - other.with_order(order).coeffs)

    def __mul__(self, scalar) -> "FourierSeries2":
        return FourierSeries2(self.coeffs * scalar)

    __rmul__ = __mul__

    def __repr__(self) -> str:
        return f"FourierSeries2(order={self.order}, l2={self.l2_norm():.6g})"


def _check_s(s: float) -> float:
    s = float(s)
    if not (-1.0 < s < 1.0) or s == 0.0:
        raise ParameterError(f"norm parameter s must lie in (-1,1) excluding 0, got {s}")
    return s


def comp_series_weight(n: int, s: float) -> float:
    """Norm weight gamma_n(s) = Gamma(|n| + (1+s)/2) / Gamma(|n| + (1-s)/2).

    Positive for s in (-1,1) \\ {0}, symmetric in n, and asymptotic to |n|^s.
    """
    s = _check_s(s)
    k = abs(int(n))
    return math.exp(log_gamma(k + (1.0 + s) / 2.0) - log_gamma(k + (1.0 - s) / 2.0))


class NormWeights:
    """Weight vector gamma_n(s) for n in [-N, N]."""

    __slots__ = ("s", "weights")

    def __init__(self, s: float, weights):
        s = _check_s(s)
        w = np.asarray(weights, dtype=float)
        if w.ndim != 1 or w.shape[0] % 2 != 1:
            raise ContractError("weights must be a vector of odd length 2N+1")
        if not np.all(w > 0.0):
            raise ContractError("norm weights must be strictly positive")
        if not np.allclose(w, w[::-1], rtol=0.0, atol=0.0):
            raise ContractError("norm weights must satisfy gamma_n = gamma_{-n}")
        object.__setattr__(self, "s", s)
        object.__setattr__(self, "weights", w)
        w.flags.writeable = False

    def __setattr__(self, name, value):
        raise AttributeError("NormWeights is immutable")

    @property
    def order(self) -> int:
        return (self.weights.shape[0] - 1) // 2


def norm_weights(order: int, s: float) -> NormWeights:
    """Build gamma_n(s) for n in [-order, order]."""
    s = _check_s(s)
    half = np.array([comp_series_weight(n, s) for n in range(order + 1)])
    return NormWeights(s, np.concatenate([half[:0:-1], half]))


def comp_series_norm_sq(f: FourierSeries1, s: float) -> float:
    """Squared norm sum_n gamma_n(s) |c_n|^2."""
    w = norm_weights(f.order, s).weights
    return float(np.sum(w * np.abs(f.coeffs) ** 2))


def tensor_norm_sq(F: FourierSeries2, s1: float, s2: float) -> float:
    """Squared tensor norm sum gamma_n(s1) gamma_m(s2) |c_{n,m}|^2."""
    w1 = norm_weights(F.order, s1).weights
    w2 = norm_weights(F.order, s2).weights
    return float(np.sum(np.outer(w1, w2) * np.abs(F.coeffs) ** 2))


def restrict_diagonal(F: FourierSeries2) -> FourierSeries1:
    """Restrict to phi1 = phi2: output order 2N with d_k = sum_{n+m=k} c_{n,m}.

    Summation order along each anti-diagonal is fixed (ascending first index)
    so the operation is reproducibly linear.
    """
    N = F.order
    flipped = np.fliplr(F.coeffs)
    out = np.empty(4 * N + 1, dtype=complex)
    for k in range(-2 * N, 2 * N + 1):
        out[k + 2 * N] = np.trace(flipped, offset=2 * N - (k + 2 * N))
    return FourierSeries1(out)


def grid_transform(values, direction: str = "analysis", order: int | None = None):
    """Discrete Fourier transform between uniform grid values and a series.

    direction="analysis": values (length M) -> FourierSeries1.  The default
    output order is floor((M-1)/2); pass `order` <= that to truncate.
    direction="synthesis": FourierSeries1 -> values on an M-point grid with
    M = 2N+1 by default, or any M >= 2N+1 passed via `order`.
    """
    if direction == "analysis":
        vals = np.asarray(values, dtype=complex)
        if vals.ndim != 1 or vals.shape[0] == 0:
            raise ContractError("analysis expects a nonempty vector of grid values")
        M = vals.shape[0]
        max_order = (M - 1) // 2
        if order is None:
            order = max_order
        if order > max_order:
            raise ContractError(f"grid of size {M} resolves orders <= {max_order}, requested {order}")
        spec = np.fft.fft(vals) / M
        ns = np.arange(-order, order + 1)
        return FourierSeries1(spec[ns % M])
    if direction == "synthesis":
        if not isinstance(values, FourierSeries1):
            raise ContractError("synthesis expects a FourierSeries1")
        N = values.order
        M = 2 * N + 1 if order is None else int(order)
        if M < 2 * N + 1:
            raise ContractError(f"grid of size {M} cannot hold a series of order {N}")
        spec = np.zeros(M, dtype=complex)
        ns = np.arange(-N, N + 1)
        spec[ns % M] = values.coeffs
        return np.fft.ifft(spec) * M
    raise ContractError(f"direction must be 'analysis' or 'synthesis', got {direction!r}")


def _synthesis2(coeffs: np.ndarray, gridN: int, offset2: float = 0.0) -> np.ndarray:
    """Values of a coefficient array (square, odd side) on a gridN x gridN grid.

    Axis 1 uses phi_j = 2 pi j / gridN; axis 2 is shifted by `offset2` cells.
    """
    K = (coeffs.shape[0] - 1) // 2
    if gridN < 2 * K + 1:
        raise ContractError(f"grid of size {gridN} cannot hold order {K}")
    ns = np.arange(-K, K + 1)
    spec = np.zeros((gridN, gridN), dtype=complex)
    block = coeffs
    if offset2 != 0.0:
        block = block * np.exp(2j * np.pi * ns * offset2 / gridN)[None, :]
    spec[np.ix_(ns % gridN, ns % gridN)] = block
    return np.fft.ifft2(spec) * gridN * gridN


def _analysis2(values: np.ndarray, out_order: int, offset2: float = 0.0) -> np.ndarray:
    """Coefficients -out_order..out_order from values on the (0, offset2) grid."""
    gridN = values.shape[0]
    if 2 * out_order + 1 > gridN:
        raise ContractError(f"grid of size {gridN} resolves orders < {gridN // 2}, requested {out_order}")
    spec = np.fft.fft2(values) / (gridN * gridN)
    ns = np.arange(-out_order, out_order + 1)
    block = spec[np.ix_(ns % gridN, ns % gridN)]
    if offset2 != 0.0:
        block = block * np.exp(-2j * np.pi * ns * offset2 / gridN)[None, :]
    return block


def _sin_power_values(gridN: int, s: float) -> np.ndarray:
    """|sin((phi1 - phi2)/2)|^s on the half-cell-offset grid (never zero there)."""
    phi1 = 2.0 * np.pi * np.arange(gridN) / gridN
    phi2 = 2.0 * np.pi * (np.arange(gridN) + 0.5) / gridN
    base = np.abs(np.sin((phi1[:, None] - phi2[None, :]) / 2.0))
    if s == 0.0:
        return np.ones_like(base)
    return base**s


def multiply_sin_power(F: FourierSeries2, s: float, gridN: int, out_order: int | None = None) -> FourierSeries2:
    """Multiply by |sin((phi1 - phi2)/2)|^s via a half-cell-offset grid.

    The second axis of the grid is shifted by half a cell so phi1 - phi2 never
    hits the singularity at 0.  For s <= -1 the multiplier is not integrable
    and the operation is rejected.  Output is truncated to the input order
    unless `out_order` overrides it.

    For s < 0 the product has a slowly decaying spectrum along n + m = const,
    so the returned coefficients carry an aliasing error of order
    gridN^-(1+s); refining the grid converges at that rate.
    """
    s = float(s)
    if s <= -1.0:
        raise DivergenceError(f"|sin|^s is not integrable for s = {s} <= -1")
    N = F.order
    if gridN < 2 * (2 * N + 1):
        raise ParameterError(f"gridN must be >= 2(2N+1) = {2 * (2 * N + 1)}, got {gridN}")
    if out_order is None:
        out_order = N
    vals = _synthesis2(F.coeffs, gridN, offset2=0.5)
    vals *= _sin_power_values(gridN, s)
    return FourierSeries2(_analysis2(vals, out_order, offset2=0.5))


def _log_gamma_signed(x: float) -> tuple[float, float]:
    """(log|Gamma(x)|, sign) for any non-pole real x, via reflection for x <= 0."""
    if x > 0.0:
        return log_gamma(x), 1.0
    if x == math.floor(x):
        raise ParameterError(f"Gamma pole at {x}")
    # Gamma(x) Gamma(1-x) = pi / sin(pi x)
    sin_val = math.sin(math.pi * x)
    return math.log(math.pi) - math.log(abs(sin_val)) - log_gamma(1.0 - x), math.copysign(1.0, sin_val)


def sin_power_coefficients(s: float, count: int) -> np.ndarray:
    """Fourier coefficients h_j of |sin(theta/2)|^s for j in [-count, count].

    Closed form h_j = (-1)^j 2^{-s} Gamma(1+s) / (Gamma(1+s/2+j) Gamma(1+s/2-j)),
    valid for s > -1.  For integer s the expansion is finite; for fractional s
    the tail decays like |j|^{-(1+s)}.
    """
    s = float(s)
    if s <= -1.0:
        raise DivergenceError(f"|sin|^s is not integrable for s = {s} <= -1")
    lg_top = log_gamma(1.0 + s) - s * math.log(2.0)
    out = np.empty(2 * count + 1)
    for j in range(count + 1):
        x_plus = 1.0 + s / 2.0 + j
        x_minus = 1.0 + s / 2.0 - j
        sign = 1.0 if j % 2 == 0 else -1.0
        if x_minus <= 0.0 and x_minus == math.floor(x_minus):
            h = 0.0  # Gamma pole: finite expansion for even integer s
        else:
            lg_p, sg_p = _log_gamma_signed(x_plus)
            lg_m, sg_m = _log_gamma_signed(x_minus)
            h = sign * sg_p * sg_m * math.exp(lg_top - lg_p - lg_m)
        out[count + j] = h
        out[count - j] = h
    return out


def random_smooth_series1(order: int, rng: np.random.Generator, width: float = 8.0) -> FourierSeries1:
    """Gaussian-decay coefficients exp(-(n/width)^2) with unit random phases."""
    ns = np.arange(-order, order + 1)
    env = np.exp(-((ns / width) ** 2))
    return FourierSeries1(env * np.exp(2j * np.pi * rng.random(2 * order + 1)))


def random_smooth_series2(order: int, rng: np.random.Generator, width: float = 8.0) -> FourierSeries2:
    """Two-variable Gaussian-decay coefficients with unit random phases."""
    ns = np.arange(-order, order + 1)
    env = np.exp(-((ns / width) ** 2))
    phases = np.exp(2j * np.pi * rng.random((2 * order + 1, 2 * order + 1)))
    return FourierSeries2(env[:, None] * env[None, :] * phases)
