"""Classical matrix groups acting on the Cartan balls by fractional-linear maps.

Three families share the block action z -> (a + zc)^{-1}(b + zd) on their ball:

    UPQ(p, q)   pseudo-unitary: g diag(1_p, -1_q) g* = diag(1_p, -1_q);
                acts on BallI(p, q)
    SP2N(n)     g Omega g^T = Omega for Omega = [[0, 1], [-1, 0]] blockwise,
                with d = conj(a), c = conj(b); acts on SymmetricII(n)
    SOSTAR(n)   g S g^T = S for S = [[0, 1], [1, 0]] blockwise, with
                d = conj(a), c = -conj(b); acts on SkewIII(n)

The bilinear-form identity together with the reality constraint places SP2N
and SOSTAR inside the pseudo-unitary group of diag(1, -1), and that inclusion
is what makes the determinant cocycle of the kernels exact:

    1 - z^[g] (u^[g])* = (a + zc)^{-1} (1 - zu*) (a + uc)^{-*}.

With the opposite reality sign c = +conj(b) the SOSTAR condition forces
g* = g^{-1}, a compact unitary group whose fractional-linear maps leave the
ball (images of operator norm ~1.4 at ||z|| = 0.9); the noncompact
realization above is the one under which every covariance check closes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ConditioningError,
    ContractError,
    DomainError,
    GenerationError,
    ParameterError,
)
from .kernels import BallI, KernelSpec, SkewIII, SymmetricII, kernel_value, validate_point
from .linalg import ComplexMatrix, condition_estimate, determinant, matrix_exp, solve

__all__ = [
    "UPQ",
    "SP2N",
    "SOSTAR",
    "GroupElement",
    "ShilovPoint",
    "ProductKernelExpansion",
    "random_group_element",
    "mobius",
    "mobius_boundary",
    "group_law_residual",
    "cocycle_residual",
    "kernel_rep_covariance",
    "diag_identification",
    "shilov_sample",
    "orbit_invariant",
]

_FORM_TOL = 1e-10
_CONDITION_LIMIT = 1e12


@dataclass(frozen=True)
class UPQ:
    """Pseudo-unitary group of signature (p, q)."""

    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ParameterError(f"UPQ needs p, q >= 1, got ({self.p}, {self.q})")

    @property
    def label(self) -> str:
        return f"UPQ({self.p},{self.q})"

    @property
    def size(self) -> int:
        return self.p + self.q

    @property
    def top(self) -> int:
        return self.p

    @property
    def domain(self):
        return BallI(self.p, self.q)


@dataclass(frozen=True)
class SP2N:
    """Real symplectic group of rank n in its complex-block realization."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"SP2N needs n >= 1, got {self.n}")

    @property
    def label(self) -> str:
        return f"SP2N({self.n})"

    @property
    def size(self) -> int:
        return 2 * self.n

    @property
    def top(self) -> int:
        return self.n

    @property
    def domain(self):
        return SymmetricII(self.n)


@dataclass(frozen=True)
class SOSTAR:
    """The group SO*(2n) in its complex-block realization."""

    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"SOSTAR needs n >= 1, got {self.n}")

    @property
    def label(self) -> str:
        return f"SOSTAR({self.n})"

    @property
    def size(self) -> int:
        return 2 * self.n

    @property
    def top(self) -> int:
        return self.n

    @property
    def domain(self):
        return SkewIII(self.n)


def _signature_form(group) -> np.ndarray:
    p = group.top
    return np.diag([1.0] * p + [-1.0] * (group.size - p))


def _form_residual(group, mat: np.ndarray) -> float:
    """Largest defect among the defining identities of the realization."""
    p = group.top
    if isinstance(group, UPQ):
        J = _signature_form(group)
        return float(np.linalg.norm(mat @ J @ mat.conj().T - J))
    eye = np.eye(p)
    zero = np.zeros((p, p))
    a, b = mat[:p, :p], mat[:p, p:]
    c, d = mat[p:, :p], mat[p:, p:]
    if isinstance(group, SP2N):
        form = np.block([[zero, eye], [-eye, zero]])
        reality = max(np.abs(d - a.conj()).max(), np.abs(c - b.conj()).max())
    else:
        form = np.block([[zero, eye], [eye, zero]])
        reality = max(np.abs(d - a.conj()).max(), np.abs(c + b.conj()).max())
    return max(float(np.linalg.norm(mat @ form @ mat.T - form)), reality)


@dataclass(frozen=True)
class GroupElement:
    """A matrix satisfying the defining identities of its group realization."""

    group: object
    matrix: np.ndarray

    def __post_init__(self):
        if not isinstance(self.group, (UPQ, SP2N, SOSTAR)):
            raise ContractError(f"unknown group tag {self.group!r}")
        mat = np.asarray(self.matrix, dtype=complex)
        m = self.group.size
        if mat.shape != (m, m):
            raise ContractError(f"{self.group.label} elements are {m}x{m}, got {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise ContractError("group element entries must be finite")
        residual = _form_residual(self.group, mat)
        if residual > _FORM_TOL:
            raise ContractError(
                f"defining-form residual {residual:.3e} exceeds {_FORM_TOL:.0e} "
                f"for {self.group.label}"
            )
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, group) -> "GroupElement":
        return cls(group, np.eye(group.size, dtype=complex))

    @property
    def block_a(self) -> np.ndarray:
        return self.matrix[: self.group.top, : self.group.top]

    @property
    def block_b(self) -> np.ndarray:
        return self.matrix[: self.group.top, self.group.top :]

    @property
    def block_c(self) -> np.ndarray:
        return self.matrix[self.group.top :, : self.group.top]

    @property
    def block_d(self) -> np.ndarray:
        return self.matrix[self.group.top :, self.group.top :]

    def compose(self, other: "GroupElement") -> "GroupElement":
        """Matrix product self . other, staying in the same group."""
        if other.group != self.group:
            raise ContractError(f"cannot compose {self.group.label} with {other.group.label}")
        return GroupElement(self.group, self.matrix @ other.matrix)


def _antihermitian(raw: np.ndarray) -> np.ndarray:
    return (raw - raw.conj().T) / 2.0


def _uniform_complex(rng: np.random.Generator, shape, scale: float) -> np.ndarray:
    return scale * (rng.uniform(-1.0, 1.0, shape) + 1j * rng.uniform(-1.0, 1.0, shape))


def _lie_algebra_sample(group, rng: np.random.Generator, scale: float) -> np.ndarray:
    """Draw X with X J + J X* = 0 (J the signature form) plus the reality
    constraints of the realization, entries bounded by the scale."""
    p = group.top
    if isinstance(group, UPQ):
        a = _antihermitian(_uniform_complex(rng, (p, p), scale))
        d = _antihermitian(_uniform_complex(rng, (group.q, group.q), scale))
        b = _uniform_complex(rng, (p, group.q), scale)
        return np.block([[a, b], [b.conj().T, d]])
    a = _antihermitian(_uniform_complex(rng, (p, p), scale))
    raw = _uniform_complex(rng, (p, p), scale)
    if isinstance(group, SP2N):
        b = (raw + raw.T) / 2.0
        return np.block([[a, b], [b.conj(), a.conj()]])
    b = (raw - raw.T) / 2.0
    return np.block([[a, b], [-b.conj(), a.conj()]])


def random_group_element(group, seed, scale: float) -> GroupElement:
    """Exponential of a random Lie-algebra element of the given realization.

    scale bounds the algebra entries; scale = 0 returns the identity.  If the
    exponentiated matrix misses the form identities (possible only for very
    large scales), the draw is retried with the scale halved.
    """
    if not isinstance(group, (UPQ, SP2N, SOSTAR)):
        raise ContractError(f"unknown group tag {group!r}")
    if not (math.isfinite(scale) and scale >= 0.0):
        raise ParameterError(f"scale must be finite and >= 0, got {scale}")
    rng = np.random.default_rng(seed)
    attempt_scale = float(scale)
    last = None
    for _ in range(4):
        x = _lie_algebra_sample(group, rng, attempt_scale)
        g = matrix_exp(ComplexMatrix.from_rows([list(row) for row in x]))
        try:
            return GroupElement(group, np.array(g.to_rows()))
        except ContractError as exc:
            last = exc
            attempt_scale /= 2.0
    raise GenerationError(f"could not realize a {group.label} element: {last}")


def _to_cm(mat: np.ndarray) -> ComplexMatrix:
    return ComplexMatrix.from_rows([list(row) for row in np.atleast_2d(mat)])


def _from_cm(mat: ComplexMatrix) -> np.ndarray:
    return np.array(mat.to_rows())


def _fractional_image(g: GroupElement, z: np.ndarray) -> np.ndarray:
    den = g.block_a + z @ g.block_c
    den_cm = _to_cm(den)
    cond = condition_estimate(den_cm)
    if not (cond <= _CONDITION_LIMIT):
        raise ConditioningError(
            f"a + zc has condition estimate {cond:.3e} (limit {_CONDITION_LIMIT:.0e})"
        )
    return _from_cm(solve(den_cm, _to_cm(g.block_b + z @ g.block_d)))


def mobius(g: GroupElement, z) -> np.ndarray:
    """Fractional-linear image (a + zc)^{-1}(b + zd) of an interior point."""
    domain = g.group.domain
    z = validate_point(domain, z)
    w = _fractional_image(g, z)
    if isinstance(domain, (SymmetricII, SkewIII)):
        sign = 1.0 if isinstance(domain, SkewIII) else -1.0
        defect = float(np.abs(w + sign * w.T).max())
        if defect > _FORM_TOL:
            raise ContractError(
                f"image symmetry defect {defect:.3e}; group element is not a "
                f"{domain.label} automorphism"
            )
        # Exact re-projection: membership validation is stricter (1e-12)
        # than the class-preservation guarantee (1e-10).
        w = (w - sign * w.T) / 2.0
    return validate_point(domain, w)


def group_law_residual(g: GroupElement, h: GroupElement, z) -> float:
    """|| (z^[g])^[h] - z^[g.h] || for the matrix product g.h in that order."""
    stepwise = mobius(h, mobius(g, z))
    combined = mobius(g.compose(h), z)
    return float(np.linalg.norm(stepwise - combined))


def _holomorphic_cocycle_data(g: GroupElement, z, u, s: float):
    domain = g.group.domain
    z = validate_point(domain, z)
    u = validate_point(domain, u)
    spec = KernelSpec(domain, "HolomorphicDet", s)
    det_z = determinant(_to_cm(g.block_a + z @ g.block_c))
    det_u = determinant(_to_cm(g.block_a + u @ g.block_c))
    before = kernel_value(spec, z, u)
    after = kernel_value(spec, mobius(g, z), mobius(g, u))
    return before, after, det_z, det_u


def cocycle_residual(g: GroupElement, z, u, s: float) -> float:
    """Defect of K_s(z^[g], u^[g]) det^{-s}(a+zc) conj(det^{-s}(a+uc)) = K_s(z,u).

    Integer s compares complex values (the determinant power is single
    valued); fractional s compares moduli, which are branch independent.
    """
    before, after, det_z, det_u = _holomorphic_cocycle_data(g, z, u, s)
    if float(s) == int(s):
        k = int(s)
        lhs = after * det_z ** (-k) * np.conj(det_u ** (-k))
        return float(abs(lhs - before))
    lhs = abs(after) * abs(det_z) ** (-s) * abs(det_u) ** (-s)
    return float(abs(lhs - abs(before)))


def kernel_rep_covariance(g: GroupElement, z, u, s: float) -> float:
    """Defect of L_s(z^[g], u^[g]) |det(a+zc)|^{-2s} |det(a+uc)|^{-2s} = L_s(z,u)."""
    domain = g.group.domain
    z = validate_point(domain, z)
    u = validate_point(domain, u)
    spec = KernelSpec(domain, "ModulusDet", s)
    det_z = determinant(_to_cm(g.block_a + z @ g.block_c))
    det_u = determinant(_to_cm(g.block_a + u @ g.block_c))
    lhs = kernel_value(spec, mobius(g, z), mobius(g, u)).real
    lhs *= abs(det_z) ** (-2.0 * s) * abs(det_u) ** (-2.0 * s)
    return float(abs(lhs - kernel_value(spec, z, u).real))


@dataclass(frozen=True)
class ProductKernelExpansion:
    """Finite sum F(z1, z2) = sum_i alpha_i k_s(z1, u_i) k_s(z2, v_i) with
    k_s(z, u) = det^{-s}(1 - zu*), the holomorphic kernel of the domain."""

    domain: object
    s: float
    centers: tuple
    coefficients: tuple

    def __post_init__(self):
        pairs = []
        for pair in self.centers:
            u, v = pair
            u = validate_point(self.domain, u)
            v = validate_point(self.domain, v)
            u.flags.writeable = False
            v.flags.writeable = False
            pairs.append((u, v))
        coeffs = tuple(complex(c) for c in self.coefficients)
        if len(coeffs) != len(pairs):
            raise ContractError(
                f"{len(pairs)} center pairs need {len(pairs)} coefficients, got {len(coeffs)}"
            )
        if not pairs:
            raise ContractError("expansion needs at least one term")
        object.__setattr__(self, "centers", tuple(pairs))
        object.__setattr__(self, "coefficients", coeffs)
        object.__setattr__(self, "s", float(self.s))

    def evaluate(self, z1, z2) -> complex:
        spec = KernelSpec(self.domain, "HolomorphicDet", self.s)
        z1 = validate_point(self.domain, z1)
        z2 = validate_point(self.domain, z2)
        total = 0.0 + 0.0j
        for alpha, (u, v) in zip(self.coefficients, self.centers):
            total += alpha * kernel_value(spec, z1, u) * kernel_value(spec, z2, v)
        return total


def diag_identification(f: ProductKernelExpansion, z) -> complex:
    """Evaluate the two-variable expansion on the antiholomorphic diagonal
    (z, conj(z)).  For center pairs v = conj(u) this turns the product of two
    holomorphic kernel factors into the modulus kernel |det(1 - zu*)|^{-2s}."""
    z = validate_point(f.domain, z)
    return f.evaluate(z, np.conj(z))


@dataclass(frozen=True)
class ShilovPoint:
    """A p x q matrix with orthonormal rows (p <= q), i.e. z z* = 1."""

    matrix: np.ndarray

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2:
            raise DomainError("boundary points are matrices")
        p, q = mat.shape
        if p > q:
            raise DomainError(f"boundary points need p <= q, got {p}x{q}")
        if not np.all(np.isfinite(mat)):
            raise DomainError("boundary point entries must be finite")
        defect = float(np.linalg.norm(mat @ mat.conj().T - np.eye(p)))
        if defect > _FORM_TOL:
            raise DomainError(f"||zz* - 1|| = {defect:.3e} exceeds {_FORM_TOL:.0e}")
        mat = mat.copy()
        mat.flags.writeable = False
        object.__setattr__(self, "matrix", mat)

    @property
    def p(self) -> int:
        return self.matrix.shape[0]

    @property
    def q(self) -> int:
        return self.matrix.shape[1]


def shilov_sample(p: int, q: int, seed) -> ShilovPoint:
    """Random boundary point: Gaussian p x q matrix with its rows
    orthonormalized (via QR on the conjugate transpose)."""
    if not (1 <= p <= q):
        raise ParameterError(f"need 1 <= p <= q, got ({p}, {q})")
    rng = np.random.default_rng(seed)
    while True:
        raw = (rng.standard_normal((q, p)) + 1j * rng.standard_normal((q, p))) / math.sqrt(2.0)
        factor, upper = np.linalg.qr(raw)
        if np.abs(np.diag(upper)).min() > 1e-10:
            return ShilovPoint(factor.conj().T)


def mobius_boundary(g: GroupElement, z: ShilovPoint) -> ShilovPoint:
    """The same fractional-linear formula on the boundary stratum zz* = 1."""
    if not isinstance(g.group, UPQ):
        raise ContractError("boundary action is defined for UPQ elements")
    if (z.p, z.q) != (g.group.p, g.group.q):
        raise ContractError(
            f"boundary point is {z.p}x{z.q}, group acts on {g.group.p}x{g.group.q}"
        )
    return ShilovPoint(_fractional_image(g, z.matrix))


def orbit_invariant(z: ShilovPoint, u: ShilovPoint, tol: float) -> int:
    """Numerical rank of z - conj(u): singular values above tol * max(1, ||z - conj(u)||)."""
    if (z.p, z.q) != (u.p, u.q):
        raise ContractError(f"shape mismatch: {z.p}x{z.q} vs {u.p}x{u.q}")
    if not (math.isfinite(tol) and tol > 0.0):
        raise ParameterError(f"tol must be positive, got {tol}")
    singular = np.linalg.svd(z.matrix - np.conj(u.matrix), compute_uv=False)
    cutoff = tol * max(1.0, float(singular[0]) if singular.size else 0.0)
    return int(np.sum(singular > cutoff))
