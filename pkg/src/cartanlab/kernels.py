"""Positive-definite kernels on matrix balls, the polydisc, and Fock space.

The catalog couples five domains with five kernel families:

    BallI(p, q)      p x q complex matrices, operator norm < 1
    SymmetricII(n)   symmetric n x n matrices, operator norm < 1
    SkewIII(n)       skew-symmetric n x n matrices, operator norm < 1
    Polydisc(n)      points of the open unit polydisc in C^n
    FockSpace(n)     all of C^n

    HolomorphicDet   det^{-s}(1 - z u*)
    ModulusDet       |det(1 - z u*)|^{-2s}
    Berezin          (det(1-zz*) det(1-uu*) / |det(1-zu*)|^2)^s
    ExpFock          exp(sum z_j conj(u_j))
    PolydiscProduct  prod_k (1 - z_k conj(u_k))^{-s_k}

Positivity of a kernel on a finite configuration is decided by the spectrum
of its Gram matrix; scanning the parameter s over random configurations
reproduces the discrete-plus-ray structure of the admissible parameter set.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ContractError, DomainError, ParameterError
from .linalg import ComplexMatrix, hermitian_eigen, principal_det_power
from .seeding import derive_seed

__all__ = [
    "BallI",
    "SymmetricII",
    "SkewIII",
    "Polydisc",
    "FockSpace",
    "KernelSpec",
    "PointConfig",
    "GramReport",
    "RkhsElement",
    "MatrixKernelSpec",
    "CATALOG",
    "catalog_table",
    "kernel_value",
    "gram_matrix",
    "psd_check",
    "wallach_scan",
    "find_indefinite_witness",
    "rkhs_eval",
    "rkhs_norm_sq",
    "matrix_gram",
    "schur_product_check",
    "sample_point",
    "validate_point",
]

_MEMBERSHIP_TOL = 1e-12


@dataclass(frozen=True)
class BallI:
    p: int
    q: int

    def __post_init__(self):
        if self.p < 1 or self.q < 1:
            raise ParameterError(f"BallI needs p, q >= 1, got ({self.p}, {self.q})")

    @property
    def label(self) -> str:
        return f"BallI({self.p},{self.q})"


@dataclass(frozen=True)
class SymmetricII:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"SymmetricII needs n >= 1, got {self.n}")

    @property
    def label(self) -> str:
        return f"SymmetricII({self.n})"


@dataclass(frozen=True)
class SkewIII:
    n: int

    def __post_init__(self):
        if self.n < 2:
            raise ParameterError(f"SkewIII needs n >= 2, got {self.n}")

    @property
    def label(self) -> str:
        return f"SkewIII({self.n})"


@dataclass(frozen=True)
class Polydisc:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"Polydisc needs n >= 1, got {self.n}")

    @property
    def label(self) -> str:
        return f"Polydisc({self.n})"


@dataclass(frozen=True)
class FockSpace:
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ParameterError(f"FockSpace needs n >= 1, got {self.n}")

    @property
    def label(self) -> str:
        return f"FockSpace({self.n})"


_MATRIX_DOMAINS = (BallI, SymmetricII, SkewIII)

# Supported (domain, family) combinations; the determinant families make
# sense on every matrix ball, the product/Fock families on their own domains.
CATALOG = (
    (BallI, "HolomorphicDet"),
    (BallI, "ModulusDet"),
    (BallI, "Berezin"),
    (SymmetricII, "HolomorphicDet"),
    (SymmetricII, "ModulusDet"),
    (SymmetricII, "Berezin"),
    (SkewIII, "HolomorphicDet"),
    (SkewIII, "ModulusDet"),
    (SkewIII, "Berezin"),
    (Polydisc, "PolydiscProduct"),
    (FockSpace, "ExpFock"),
)


def catalog_table() -> list:
    """Machine-readable (domain kind, family) validity table."""
    return [{"domain": d.__name__, "family": f} for d, f in CATALOG]


def _point_shape(domain):
    if isinstance(domain, BallI):
        return (domain.p, domain.q)
    if isinstance(domain, (SymmetricII, SkewIII)):
        return (domain.n, domain.n)
    return (domain.n,)


def validate_point(domain, z) -> np.ndarray:
    """Return z as an array after checking the domain membership predicate."""
    z = np.asarray(z, dtype=complex)
    if z.shape != _point_shape(domain):
        raise DomainError(f"point shape {z.shape} does not match {domain.label}")
    if not np.all(np.isfinite(z)):
        raise DomainError("point entries must be finite")
    if isinstance(domain, _MATRIX_DOMAINS):
        if isinstance(domain, SymmetricII) and np.abs(z - z.T).max() > _MEMBERSHIP_TOL:
            raise DomainError("SymmetricII points must satisfy z = z^T")
        if isinstance(domain, SkewIII) and np.abs(z + z.T).max() > _MEMBERSHIP_TOL:
            raise DomainError("SkewIII points must satisfy z = -z^T")
        norm = np.linalg.norm(z, 2)
        if norm >= 1.0:
            raise DomainError(f"operator norm {norm:.6f} is not < 1")
    elif isinstance(domain, Polydisc):
        if np.abs(z).max() >= 1.0:
            raise DomainError("Polydisc points need |z_k| < 1 in every coordinate")
    return z


def sample_point(domain, rng: np.random.Generator) -> np.ndarray:
    """Random interior point: Gaussian entries (symmetrized or
    antisymmetrized for types II/III), rescaled to operator norm r with r
    uniform in [0.1, 0.95].  Polydisc coordinates get moduli in the same
    range; Fock points are plain complex Gaussians."""
    shape = _point_shape(domain)
    raw = (rng.standard_normal(shape) + 1j * rng.standard_normal(shape)) / math.sqrt(2.0)
    if isinstance(domain, Polydisc):
        radii = rng.uniform(0.1, 0.95, size=shape)
        return radii * np.exp(1j * np.angle(raw))
    if isinstance(domain, FockSpace):
        return raw
    if isinstance(domain, SymmetricII):
        raw = (raw + raw.T) / 2.0
    elif isinstance(domain, SkewIII):
        raw = (raw - raw.T) / 2.0
    target = rng.uniform(0.1, 0.95)
    return raw * (target / np.linalg.norm(raw, 2))


@dataclass(frozen=True)
class PointConfig:
    """A finite point configuration in one domain, with its generating seed."""

    domain: object
    points: tuple
    seed: object = None

    def __post_init__(self):
        pts = tuple(validate_point(self.domain, p) for p in self.points)
        for p in pts:
            p.flags.writeable = False
        object.__setattr__(self, "points", pts)
        if len(pts) == 0:
            raise ContractError("PointConfig needs at least one point")

    @classmethod
    def sample(cls, domain, npoints: int, seed) -> "PointConfig":
        if npoints < 1:
            raise ParameterError(f"npoints must be >= 1, got {npoints}")
        rng = np.random.default_rng(seed)
        return cls(domain, tuple(sample_point(domain, rng) for _ in range(npoints)), seed)

    def __len__(self) -> int:
        return len(self.points)


_SCALAR_FAMILIES = ("HolomorphicDet", "ModulusDet", "Berezin", "ExpFock", "PolydiscProduct")


@dataclass(frozen=True)
class KernelSpec:
    """A kernel family on a domain with its real parameter(s)."""

    domain: object
    family: str
    s: object = 1.0

    def __post_init__(self):
        if self.family not in _SCALAR_FAMILIES:
            raise ParameterError(f"unknown kernel family {self.family!r}")
        if not any(isinstance(self.domain, d) and self.family == f for d, f in CATALOG):
            raise ParameterError(f"{self.family} is not in the catalog for {self.domain.label}")
        if self.family == "PolydiscProduct":
            s = tuple(float(v) for v in np.atleast_1d(self.s))
            if len(s) == 1:
                s = s * self.domain.n
            if len(s) != self.domain.n:
                raise ParameterError(f"need {self.domain.n} exponents, got {len(s)}")
            object.__setattr__(self, "s", s)
        elif self.family == "ExpFock":
            object.__setattr__(self, "s", None)
        else:
            s = float(self.s)
            if not math.isfinite(s):
                raise ParameterError("kernel parameter must be finite")
            object.__setattr__(self, "s", s)


def _det_power(mat: np.ndarray, s: float) -> complex:
    """det^{-s}(1 - mat) on the principal branch via the numeric core."""
    return principal_det_power(ComplexMatrix.from_rows(mat.tolist()), s)


def kernel_value(spec: KernelSpec, z, u) -> complex:
    """Evaluate the kernel at a pair of domain points."""
    z = validate_point(spec.domain, z)
    u = validate_point(spec.domain, u)
    family = spec.family
    if family == "ExpFock":
        return complex(cmath.exp(np.sum(z * np.conj(u))))
    if family == "PolydiscProduct":
        out = 1.0 + 0.0j
        for zk, uk, sk in zip(z, u, spec.s):
            out *= cmath.exp(-sk * cmath.log(1.0 - zk * np.conj(uk)))
        return complex(out)
    zu = z @ np.conj(u).T
    if family == "HolomorphicDet":
        return complex(_det_power(zu, spec.s))
    if family == "ModulusDet":
        val = _det_power(zu, spec.s)
        return complex(val * np.conj(val))
    # Berezin: real-valued ratio of determinants raised to the s-th power
    dz = _det_power(z @ np.conj(z).T, -1.0).real
    du = _det_power(u @ np.conj(u).T, -1.0).real
    dzu = abs(_det_power(zu, -1.0))
    return complex(math.exp(spec.s * (math.log(dz) + math.log(du) - 2.0 * math.log(dzu))))


def gram_matrix(spec: KernelSpec, config: PointConfig) -> ComplexMatrix:
    """Gram matrix G_ij = K(x_j, x_i), Hermitized by averaging with its
    conjugate transpose.  A Hermiticity defect above 1e-8 * ||G||_F signals
    a broken kernel implementation and raises."""
    if config.domain != spec.domain:
        raise ContractError("configuration domain does not match the kernel spec")
    pts = config.points
    n = len(pts)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = kernel_value(spec, pts[j], pts[i])
    defect = np.abs(G - np.conj(G.T)).max()
    scale = float(np.linalg.norm(G))
    if defect > 1e-8 * max(1.0, scale):
        raise ContractError(f"Gram Hermiticity defect {defect:.3e} exceeds 1e-8 * ||G||")
    G = (G + np.conj(G.T)) / 2.0
    return ComplexMatrix.from_rows(G.tolist())


@dataclass(frozen=True)
class GramReport:
    """Positivity verdict for one kernel/configuration pair."""

    min_eigenvalue: float
    verdict: str
    witness: PointConfig
    tolerance: float
    hermiticity_residual: float = 0.0

    def __post_init__(self):
        expect = "PSD" if self.min_eigenvalue >= -self.tolerance else "INDEFINITE"
        if self.verdict != expect:
            raise ContractError(f"verdict {self.verdict} contradicts min eigenvalue")


def _report_from_gram(G: np.ndarray, config: PointConfig, tol) -> GramReport:
    defect = float(np.abs(G - np.conj(G.T)).max())
    H = (G + np.conj(G.T)) / 2.0
    eig = hermitian_eigen(ComplexMatrix.from_rows(H.tolist()))
    low, high = eig.eigenvalues[0], eig.eigenvalues[-1]
    norm = max(abs(low), abs(high))
    if tol is None:
        tol = 1e-8 * max(1.0, norm)
    verdict = "PSD" if low >= -tol else "INDEFINITE"
    return GramReport(float(low), verdict, config, float(tol), defect)


def psd_check(spec: KernelSpec, config: PointConfig, tol: float | None = None) -> GramReport:
    """Eigen-decompose the Gram matrix and report the positivity verdict.

    The default tolerance is 1e-8 * max(1, ||G||), matched to the accuracy
    of the Jacobi eigensolver with headroom."""
    pts = config.points
    n = len(pts)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            G[i, j] = kernel_value(spec, pts[j], pts[i])
    return _report_from_gram(G, config, tol)


def wallach_scan(domain, s_grid, trials: int, npoints: int, seed, family: str = "HolomorphicDet"):
    """For each s, run `trials` independent random configurations and report
    (s, fraction of INDEFINITE verdicts, worst min eigenvalue).

    Per-trial seeds are derived by hashing (seed, s-index, trial-index), so
    any execution order reproduces the same verdicts.
    """
    if trials < 1 or npoints < 1:
        raise ParameterError("trials and npoints must be >= 1")
    results = []
    for si, s in enumerate(s_grid):
        spec = KernelSpec(domain, family, s)
        bad = 0
        worst = math.inf
        for trial in range(trials):
            config = PointConfig.sample(domain, npoints, derive_seed(seed, "wallach", si, trial))
            report = psd_check(spec, config)
            if report.verdict == "INDEFINITE":
                bad += 1
            worst = min(worst, report.min_eigenvalue)
        results.append((float(s), bad / trials, worst))
    return results


def find_indefinite_witness(domain, s: float, npoints: int, max_trials: int, seed,
                            family: str = "HolomorphicDet"):
    """Search seeded random configurations for an INDEFINITE Gram; returns
    the first witness GramReport, or None.  Witnesses below 1e-6 in
    magnitude are not accepted (guards against eigensolver noise)."""
    spec = KernelSpec(domain, family, s)
    for trial in range(max_trials):
        config = PointConfig.sample(domain, npoints, derive_seed(seed, "witness", trial))
        report = psd_check(spec, config)
        if report.verdict == "INDEFINITE" and report.min_eigenvalue < -1e-6:
            return report
    return None


@dataclass(frozen=True)
class RkhsElement:
    """Finite expansion h = sum_i alpha_i Psi_{x_i} over kernel sections."""

    spec: KernelSpec
    centers: PointConfig
    coefficients: tuple

    def __post_init__(self):
        coeffs = tuple(complex(c) for c in self.coefficients)
        if len(coeffs) != len(self.centers):
            raise ContractError("centers and coefficients must have equal length")
        object.__setattr__(self, "coefficients", coeffs)


def rkhs_eval(h: RkhsElement, x) -> complex:
    """Evaluate the expansion: f_h(x) = sum_i alpha_i K(x, x_i)."""
    return complex(sum(a * kernel_value(h.spec, x, c) for a, c in zip(h.coefficients, h.centers.points)))


def rkhs_norm_sq(h: RkhsElement) -> float:
    """||h||^2 = sum_ij conj(alpha_j) alpha_i <Psi_i, Psi_j> via the Gram."""
    G = np.array(gram_matrix(h.spec, h.centers).to_rows())
    alpha = np.array(h.coefficients)
    return float(np.real(alpha @ G @ np.conj(alpha)))


_RHO_CHOICES = ("DetPower", "Defining", "DetPowerDefining")


@dataclass(frozen=True)
class MatrixKernelSpec:
    """Matrix-valued kernel on a matrix ball.

    rho = DetPower(s): L(z,u) = det^{-s}(1-zu*) Id on a value space of any
    dimension.  rho = Defining: L(z,u) = (1-zu*) kron (1-u*z), value
    dimension p*q.  rho = DetPowerDefining: det^{-s}(1-zu*) (1-u*z), value
    dimension q.
    """

    domain: object
    rho: str
    value_dim: int
    s: float = 1.0

    def __post_init__(self):
        if not isinstance(self.domain, _MATRIX_DOMAINS):
            raise ParameterError("matrix kernels live on the matrix-ball domains")
        if self.rho not in _RHO_CHOICES:
            raise ParameterError(f"rho must be one of {_RHO_CHOICES}")
        p, q = _point_shape(self.domain)
        expect = {"DetPower": self.value_dim, "Defining": p * q, "DetPowerDefining": q}[self.rho]
        if self.value_dim != expect or self.value_dim < 1:
            raise ParameterError(f"value dimension {self.value_dim} does not match rho {self.rho}")


def _matrix_kernel_value(mspec: MatrixKernelSpec, z: np.ndarray, u: np.ndarray) -> np.ndarray:
    zu = z @ np.conj(u).T
    if mspec.rho == "DetPower":
        return _det_power(zu, mspec.s) * np.eye(mspec.value_dim, dtype=complex)
    p, q = _point_shape(mspec.domain)
    uz = np.conj(u).T @ z
    if mspec.rho == "Defining":
        return np.kron(np.eye(p) - zu, np.eye(q) - uz)
    return _det_power(zu, mspec.s) * (np.eye(q) - uz)


def matrix_gram(mspec: MatrixKernelSpec, config: PointConfig, vectors) -> ComplexMatrix:
    """Scalar Gram of the lifted kernel <L(z,u) xi, eta> over points with
    attached value-space vectors: G_ij = <L(x_j, x_i) xi_j, xi_i>."""
    if config.domain != mspec.domain:
        raise ContractError("configuration domain does not match the kernel spec")
    vecs = [np.asarray(v, dtype=complex) for v in vectors]
    if len(vecs) != len(config):
        raise ContractError("one vector per point is required")
    for v in vecs:
        if v.shape != (mspec.value_dim,):
            raise ContractError(f"vector shape {v.shape} does not match value dimension {mspec.value_dim}")
    n = len(vecs)
    G = np.empty((n, n), dtype=complex)
    for i in range(n):
        for j in range(n):
            L = _matrix_kernel_value(mspec, config.points[j], config.points[i])
            G[i, j] = np.conj(vecs[i]) @ (L @ vecs[j])
    defect = np.abs(G - np.conj(G.T)).max()
    if defect > 1e-8 * max(1.0, float(np.linalg.norm(G))):
        raise ContractError(f"lifted Gram Hermiticity defect {defect:.3e}")
    G = (G + np.conj(G.T)) / 2.0
    return ComplexMatrix.from_rows(G.tolist())


def schur_product_check(spec_a: KernelSpec, spec_b: KernelSpec, config: PointConfig,
                        tol: float | None = None) -> GramReport:
    """Positivity of the pointwise product kernel K_a(z,u) conj(K_b(z,u)).

    The second factor enters conjugated (still positive definite, being the
    transpose Gram), so the pair (K_s, K_s) realizes the modulus-squared
    kernel |K_s|^2.  The product Gram is the Hadamard product of the factor
    Grams, which the Schur product theorem keeps positive semidefinite.
    """
    if spec_a.domain != spec_b.domain:
        raise ContractError("Schur product needs both kernels on the same domain")
    Ga = np.array(gram_matrix(spec_a, config).to_rows())
    Gb = np.array(gram_matrix(spec_b, config).to_rows())
    return _report_from_gram(Ga * np.conj(Gb), config, tol)
