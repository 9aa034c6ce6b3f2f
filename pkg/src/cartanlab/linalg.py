"""Self-contained dense complex linear algebra and special functions.

Everything here is hand-built on the stdlib (math/cmath) so that the rest
of the laboratory rests on primitives whose every operation is visible:
a cyclic Jacobi eigensolver for Hermitian matrices, a Lanczos log-gamma,
principal determinant powers through the trace-log series, LU with partial
pivoting, and scaling-and-squaring matrix exponentials.  Matrix sizes in
the laboratory stay modest (group elements and Gram matrices), so clarity
wins over asymptotic speed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

from .errors import ContractError, DivergenceError, DomainError

_JACOBI_MAX_SWEEPS = 30
_JACOBI_TOL = 1e-14
_HERMITICITY_TOL = 1e-10
_DET_POWER_TERM_TOL = 1e-16
_DET_POWER_MAX_TERMS = 200_000
_SPECTRAL_EDGE = 1.0 - 1e-12


class ComplexMatrix:
    """Immutable dense complex matrix, stored row-major.

    Entries are validated to be finite at construction; every algebraic
    operation returns a new matrix.
    """

    __slots__ = ("rows", "cols", "_data")

    def __init__(self, rows: int, cols: int, entries):
        data = tuple(complex(e) for e in entries)
        if rows <= 0 or cols <= 0 or rows * cols != len(data):
            raise ContractError(
                f"shape ({rows}, {cols}) does not match {len(data)} entries")
        for e in data:
            if not (math.isfinite(e.real) and math.isfinite(e.imag)):
                raise ContractError("matrix entries must be finite")
        object.__setattr__(self, "rows", rows)
        object.__setattr__(self, "cols", cols)
        object.__setattr__(self, "_data", data)

    def __setattr__(self, name, value):
        raise AttributeError("ComplexMatrix is immutable")

    @classmethod
    def from_rows(cls, rows) -> "ComplexMatrix":
        rows = [list(r) for r in rows]
        n = len(rows)
        if n == 0:
            raise ContractError("empty matrix")
        m = len(rows[0])
        if any(len(r) != m for r in rows):
            raise ContractError("ragged rows")
        return cls(n, m, [e for r in rows for e in r])

    @classmethod
    def identity(cls, n: int) -> "ComplexMatrix":
        return cls(n, n, [1.0 if i == j else 0.0 for i in range(n) for j in range(n)])

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "ComplexMatrix":
        return cls(rows, cols, [0.0] * (rows * cols))

    def __getitem__(self, key) -> complex:
        i, j = key
        return self._data[i * self.cols + j]

    def to_rows(self) -> list[list[complex]]:
        c = self.cols
        return [list(self._data[i * c:(i + 1) * c]) for i in range(self.rows)]

    def __eq__(self, other):
        return (isinstance(other, ComplexMatrix) and self.rows == other.rows
                and self.cols == other.cols and self._data == other._data)

    def __hash__(self):
        return hash((self.rows, self.cols, self._data))

    def __add__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        self._check_same_shape(other)
        return ComplexMatrix(self.rows, self.cols,
                             [a + b for a, b in zip(self._data, other._data)])

    def __sub__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        self._check_same_shape(other)
        return ComplexMatrix(self.rows, self.cols,
                             [a - b for a, b in zip(self._data, other._data)])

    def __mul__(self, scalar) -> "ComplexMatrix":
        s = complex(scalar)
        return ComplexMatrix(self.rows, self.cols, [s * a for a in self._data])

    __rmul__ = __mul__

    def __neg__(self) -> "ComplexMatrix":
        return self * -1.0

    def __matmul__(self, other: "ComplexMatrix") -> "ComplexMatrix":
        if self.cols != other.rows:
            raise ContractError(
                f"cannot multiply ({self.rows},{self.cols}) @ ({other.rows},{other.cols})")
        n, k, m = self.rows, self.cols, other.cols
        a, b = self._data, other._data
        out = [0j] * (n * m)
        for i in range(n):
            arow = a[i * k:(i + 1) * k]
            orow = out[i * m:(i + 1) * m]
            for t in range(k):
                ait = arow[t]
                if ait == 0:
                    continue
                brow = b[t * m:(t + 1) * m]
                for j in range(m):
                    orow[j] += ait * brow[j]
            out[i * m:(i + 1) * m] = orow
        return ComplexMatrix(n, m, out)

    def conj(self) -> "ComplexMatrix":
        return ComplexMatrix(self.rows, self.cols, [a.conjugate() for a in self._data])

    def transpose(self) -> "ComplexMatrix":
        return ComplexMatrix(self.cols, self.rows,
                             [self._data[i * self.cols + j]
                              for j in range(self.cols) for i in range(self.rows)])

    def conj_transpose(self) -> "ComplexMatrix":
        return ComplexMatrix(self.cols, self.rows,
                             [self._data[i * self.cols + j].conjugate()
                              for j in range(self.cols) for i in range(self.rows)])

    def trace(self) -> complex:
        if self.rows != self.cols:
            raise ContractError("trace of a non-square matrix")
        return sum(self._data[i * self.cols + i] for i in range(self.rows))

    def frobenius_norm(self) -> float:
        return math.sqrt(sum((a.real * a.real + a.imag * a.imag) for a in self._data))

    def __repr__(self):
        return f"ComplexMatrix({self.rows}x{self.cols})"

    def _check_same_shape(self, other: "ComplexMatrix"):
        if self.rows != other.rows or self.cols != other.cols:
            raise ContractError("shape mismatch")


@dataclass(frozen=True)
class EigenResult:
    """Spectral decomposition of a Hermitian matrix.

    eigenvalues are real and ascending; column j of `vectors` is the
    eigenvector for eigenvalues[j], and the columns form a unitary matrix.
    """

    eigenvalues: tuple[float, ...]
    vectors: ComplexMatrix


# ----------------------------------------------------------------------
# special functions

_LANCZOS_BASE = 0.99999999999980993
_LANCZOS_COEFFS = (
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_HALF_LOG_TWO_PI = 0.5 * math.log(2.0 * math.pi)


def log_gamma(x: float) -> float:
    """Natural log of the Gamma function for real x > 0.

    Lanczos approximation with the published g=7, n=9 coefficient set;
    relative accuracy is better than 1e-12 across (0, 1e4] (validated
    against a 50-digit reference sweep before the build).
    """
    x = float(x)
    if not math.isfinite(x) or x <= 0.0:
        raise DomainError(f"log_gamma requires x > 0, got {x!r}")
    if x < 0.5:
        # reflection keeps the series argument away from the poles
        return math.log(math.pi / math.sin(math.pi * x)) - log_gamma(1.0 - x)
    y = x - 1.0
    acc = _LANCZOS_BASE
    for i, coeff in enumerate(_LANCZOS_COEFFS, start=1):
        acc += coeff / (y + i)
    t = y + 7.5
    return _HALF_LOG_TWO_PI + (y + 0.5) * math.log(t) - t + math.log(acc)


# ----------------------------------------------------------------------
# Hermitian eigensolver (cyclic Jacobi with complex rotations)

def hermitian_eigen(m: ComplexMatrix) -> EigenResult:
    """Diagonalize a Hermitian matrix by cyclic Jacobi rotations.

    Sweeps run until the off-diagonal Frobenius mass falls below
    1e-14 * ||M|| or 30 sweeps elapse.  Input must be Hermitian to
    1e-10 * ||M|| in Frobenius norm.
    """
    if m.rows != m.cols:
        raise ContractError("hermitian_eigen requires a square matrix")
    n = m.rows
    scale = m.frobenius_norm()
    defect = (m - m.conj_transpose()).frobenius_norm()
    if defect > _HERMITICITY_TOL * max(scale, 1e-300):
        raise ContractError(
            f"input is not Hermitian: ||M - M*|| = {defect:.3e} vs ||M|| = {scale:.3e}")
    if scale == 0.0:
        return EigenResult(tuple(0.0 for _ in range(n)), ComplexMatrix.identity(n))

    # exact hermitization removes the tolerated defect before iterating
    a = [[0j] * n for _ in range(n)]
    for i in range(n):
        for j in range(n):
            a[i][j] = 0.5 * (m[i, j] + m[j, i].conjugate())
        a[i][i] = complex(a[i][i].real, 0.0)
    v = [[1.0 + 0j if i == j else 0j for j in range(n)] for i in range(n)]

    threshold = _JACOBI_TOL * scale
    skip = threshold / max(n, 1)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(2.0 * sum(abs(a[p][q]) ** 2
                                  for p in range(n) for q in range(p + 1, n)))
        if off <= threshold:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p][q]
                absg = abs(apq)
                if absg <= skip:
                    continue
                alpha = a[p][p].real
                beta = a[q][q].real
                phase = apq / absg
                tau = (beta - alpha) / (2.0 * absg)
                if tau >= 0.0:
                    t = 1.0 / (tau + math.sqrt(1.0 + tau * tau))
                else:
                    t = -1.0 / (-tau + math.sqrt(1.0 + tau * tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = (t * c) * phase
                sc = s.conjugate()
                for i in range(n):
                    aip, aiq = a[i][p], a[i][q]
                    a[i][p] = c * aip - sc * aiq
                    a[i][q] = s * aip + c * aiq
                for j in range(n):
                    apj, aqj = a[p][j], a[q][j]
                    a[p][j] = c * apj - s * aqj
                    a[q][j] = sc * apj + c * aqj
                a[p][p] = complex(a[p][p].real, 0.0)
                a[q][q] = complex(a[q][q].real, 0.0)
                a[p][q] = 0j
                a[q][p] = 0j
                for i in range(n):
                    vip, viq = v[i][p], v[i][q]
                    v[i][p] = c * vip - sc * viq
                    v[i][q] = s * vip + c * viq
    else:
        off = math.sqrt(2.0 * sum(abs(a[p][q]) ** 2
                                  for p in range(n) for q in range(p + 1, n)))
        if off > 1e-8 * scale:
            raise DivergenceError("Jacobi sweeps did not converge")

    order = sorted(range(n), key=lambda i: a[i][i].real)
    eigenvalues = tuple(a[i][i].real for i in order)
    vectors = ComplexMatrix(n, n, [v[i][order[j]] for i in range(n) for j in range(n)])
    return EigenResult(eigenvalues, vectors)


def operator_norm(m: ComplexMatrix) -> float:
    """Largest singular value, via the Hermitian eigensolver on M*M."""
    if m.frobenius_norm() == 0.0:
        return 0.0
    if m.rows <= m.cols:
        gram = m @ m.conj_transpose()
    else:
        gram = m.conj_transpose() @ m
    top = hermitian_eigen(gram).eigenvalues[-1]
    return math.sqrt(max(top, 0.0))


# ----------------------------------------------------------------------
# LU factorization: determinants, solves, conditioning

def _lu_factor(m: ComplexMatrix):
    n = m.rows
    lu = [list(r) for r in m.to_rows()]
    perm = list(range(n))
    sign = 1.0
    for k in range(n):
        pivot = max(range(k, n), key=lambda i: abs(lu[i][k]))
        if abs(lu[pivot][k]) == 0.0:
            return lu, perm, sign, True
        if pivot != k:
            lu[k], lu[pivot] = lu[pivot], lu[k]
            perm[k], perm[pivot] = perm[pivot], perm[k]
            sign = -sign
        pk = lu[k][k]
        for i in range(k + 1, n):
            f = lu[i][k] / pk
            lu[i][k] = f
            row_i, row_k = lu[i], lu[k]
            for j in range(k + 1, n):
                row_i[j] -= f * row_k[j]
    return lu, perm, sign, False


def determinant(m: ComplexMatrix) -> complex:
    """Determinant through LU with partial pivoting."""
    if m.rows != m.cols:
        raise ContractError("determinant of a non-square matrix")
    lu, _, sign, singular = _lu_factor(m)
    if singular:
        return 0j
    det = complex(sign)
    for i in range(m.rows):
        det *= lu[i][i]
    return det


def solve(m: ComplexMatrix, rhs: ComplexMatrix) -> ComplexMatrix:
    """Solve m @ X = rhs for X by LU with partial pivoting."""
    if m.rows != m.cols:
        raise ContractError("solve requires a square matrix")
    if rhs.rows != m.rows:
        raise ContractError("right-hand side has incompatible row count")
    n, k = m.rows, rhs.cols
    lu, perm, _, singular = _lu_factor(m)
    if singular:
        raise DivergenceError("singular matrix in solve")
    b = rhs.to_rows()
    y = [b[perm[i]] for i in range(n)]
    for i in range(n):
        for j in range(i):
            f = lu[i][j]
            if f != 0:
                row_j = y[j]
                y[i] = [yi - f * yj for yi, yj in zip(y[i], row_j)]
    for i in range(n - 1, -1, -1):
        for j in range(i + 1, n):
            f = lu[i][j]
            if f != 0:
                row_j = y[j]
                y[i] = [yi - f * yj for yi, yj in zip(y[i], row_j)]
        piv = lu[i][i]
        y[i] = [yi / piv for yi in y[i]]
    return ComplexMatrix(n, k, [e for row in y for e in row])


def inverse(m: ComplexMatrix) -> ComplexMatrix:
    return solve(m, ComplexMatrix.identity(m.rows))


def condition_estimate(m: ComplexMatrix) -> float:
    """Spectral condition number estimate ||M|| * ||M^-1||.

    Returns math.inf for singular input.
    """
    try:
        inv = inverse(m)
    except DivergenceError:
        return math.inf
    return operator_norm(m) * operator_norm(inv)


# ----------------------------------------------------------------------
# matrix exponential

def matrix_exp(x: ComplexMatrix) -> ComplexMatrix:
    """exp(X) by scaling and squaring with a truncated Taylor series."""
    if x.rows != x.cols:
        raise ContractError("matrix_exp requires a square matrix")
    n = x.rows
    norm = x.frobenius_norm()
    squarings = 0
    if norm > 0.5:
        squarings = max(0, int(math.ceil(math.log(norm / 0.5, 2.0))))
    scaled = x * (0.5 ** squarings)
    result = ComplexMatrix.identity(n)
    term = ComplexMatrix.identity(n)
    for k in range(1, 60):
        term = (term @ scaled) * (1.0 / k)
        result = result + term
        if term.frobenius_norm() <= 1e-18 * max(1.0, result.frobenius_norm()):
            break
    else:
        raise DivergenceError("Taylor series for matrix_exp did not settle")
    for _ in range(squarings):
        result = result @ result
    return result


# ----------------------------------------------------------------------
# principal determinant powers

def spectral_radius_estimate(a: ComplexMatrix, squarings: int = 16) -> float:
    """Gelfand estimate rho(A) ~ ||A^(2^m)||_F^(1/2^m) via normalized squaring."""
    if a.rows != a.cols:
        raise ContractError("spectral radius of a non-square matrix")
    b = a
    log_scale = 0.0
    for _ in range(squarings):
        f = b.frobenius_norm()
        if f == 0.0:
            return 0.0
        b = b * (1.0 / f)
        b = b @ b
        log_scale = 2.0 * (log_scale + math.log(f))
    f = b.frobenius_norm()
    if f == 0.0:
        return 0.0
    return math.exp((log_scale + math.log(f)) / (2.0 ** squarings))


def _char_poly_coeffs(a: ComplexMatrix) -> list[complex]:
    """Faddeev-LeVerrier coefficients c so that p(t) = t^n + c[0] t^(n-1) + ... + c[n-1]."""
    n = a.rows
    coeffs: list[complex] = []
    m = ComplexMatrix.identity(n)
    c = 1.0 + 0j
    for k in range(1, n + 1):
        if k > 1:
            m = a @ m + c * ComplexMatrix.identity(n)
        c = -(a @ m).trace() / k
        coeffs.append(c)
    return coeffs


def _power_traces(a: ComplexMatrix, count: int) -> list[complex]:
    """tr(A^k) for k = 1..count via the characteristic-polynomial recurrence."""
    n = a.rows
    traces: list[complex] = []
    p = a
    for _ in range(min(n, count)):
        traces.append(p.trace())
        if len(traces) < min(n, count):
            p = p @ a
    coeffs = _char_poly_coeffs(a)
    while len(traces) < count:
        k = len(traces) + 1
        acc = 0j
        for i, c in enumerate(coeffs, start=1):
            if i > len(traces):
                break
            acc += c * traces[k - 1 - i]
        traces.append(-acc)
    return traces


def _roots_durand_kerner(coeffs: list[complex]) -> list[complex]:
    """Roots of the monic polynomial t^n + coeffs[0] t^(n-1) + ... + coeffs[-1]."""
    n = len(coeffs)
    if n == 0:
        return []
    radius = 1.0 + max(abs(c) for c in coeffs)
    roots = [radius * cmath.exp(2j * math.pi * (k + 0.25) / n) for k in range(n)]
    full = [1.0 + 0j] + coeffs
    for _ in range(400):
        moved = 0.0
        for i in range(n):
            z = roots[i]
            num = 0j
            for c in full:
                num = num * z + c
            den = 1.0 + 0j
            for j in range(n):
                if j != i:
                    den *= (z - roots[j])
            if den == 0:
                continue
            step = num / den
            roots[i] = z - step
            moved = max(moved, abs(step))
        if moved < 1e-15 * max(1.0, radius):
            break
    return roots


def principal_det_power(a: ComplexMatrix, s: float) -> complex:
    """det(I - A)^(-s) on the principal branch, defined by exp(-s tr log(I - A)).

    The branch is the one fixed by the convergent series
    log(I - A) = -sum_k A^k / k, valid for spectral radius < 1.  Terms are
    evaluated through the characteristic-polynomial trace recurrence, cut
    when the spectral-radius tail bound drops below 1e-16; if the radius is
    so close to one that the series would need more than 2e5 terms, the
    same trace is taken as sum of principal logs of (1 - lambda_i) over the
    characteristic roots, which the series converges to on the open disc.
    """
    if a.rows != a.cols:
        raise ContractError("principal_det_power requires a square matrix")
    rho = spectral_radius_estimate(a)
    if rho >= _SPECTRAL_EDGE:
        raise DivergenceError(
            f"spectral radius estimate {rho:.15f} is not below 1 - 1e-12")
    n = a.rows
    if rho == 0.0:
        terms = n + 1
    else:
        terms = int(math.ceil(
            math.log(_DET_POWER_TERM_TOL * (1.0 - rho) / n) / math.log(rho)))
        terms = max(terms, n + 1)
    if terms <= _DET_POWER_MAX_TERMS:
        traces = _power_traces(a, terms)
        acc = 0j
        for k in range(terms, 0, -1):
            acc += traces[k - 1] / k
        trace_log = -acc
    else:
        roots = _roots_durand_kerner(_char_poly_coeffs(a))
        trace_log = sum(cmath.log(1.0 - r) for r in roots)
    return cmath.exp(-s * trace_log)
