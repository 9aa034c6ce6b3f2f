"""Tests for the matrix-ball group realizations, their fractional-linear
action, kernel cocycle covariance, diagonal identification, and the Shilov
boundary orbit invariant."""

import numpy as np
import pytest

from cartanlab.errors import ContractError, DomainError, ParameterError
from cartanlab.groups import (
    GroupElement,
    ProductKernelExpansion,
    SOSTAR,
    SP2N,
    ShilovPoint,
    UPQ,
    cocycle_residual,
    diag_identification,
    group_law_residual,
    kernel_rep_covariance,
    mobius,
    mobius_boundary,
    orbit_invariant,
    random_group_element,
    shilov_sample,
)
from cartanlab.kernels import KernelSpec, kernel_value, sample_point, validate_point
from cartanlab.linalg import ComplexMatrix, matrix_exp

ALL_GROUPS = (UPQ(2, 2), SP2N(2), SOSTAR(3))


def _expm(x: np.ndarray) -> np.ndarray:
    return np.array(matrix_exp(ComplexMatrix.from_rows([list(row) for row in x])).to_rows())


def _random_unitary(rng, n):
    raw = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    factor, upper = np.linalg.qr(raw)
    return factor * (np.diag(upper) / np.abs(np.diag(upper)))


# ---------------------------------------------------------------------------
# group elements


def test_identity_element_satisfies_every_form():
    for group in ALL_GROUPS:
        el = GroupElement.identity(group)
        assert np.array_equal(el.matrix, np.eye(group.size))


def test_group_element_rejects_form_violation():
    bad = np.eye(4, dtype=complex)
    bad[0, 1] = 1e-6
    for group in (UPQ(2, 2), SP2N(2), SOSTAR(2)):
        with pytest.raises(ContractError):
            GroupElement(group, bad)


def test_group_element_rejects_bad_shape_and_nonfinite():
    with pytest.raises(ContractError):
        GroupElement(UPQ(2, 2), np.eye(3))
    nan = np.eye(4, dtype=complex)
    nan[2, 2] = np.nan
    with pytest.raises(ContractError):
        GroupElement(UPQ(2, 2), nan)
    with pytest.raises(ContractError):
        GroupElement("not-a-group", np.eye(4))


def test_random_element_deterministic():
    for group in ALL_GROUPS:
        first = random_group_element(group, 321, 0.6)
        second = random_group_element(group, 321, 0.6)
        assert np.array_equal(first.matrix, second.matrix)


def test_random_element_scale_zero_is_identity():
    for group in ALL_GROUPS:
        el = random_group_element(group, 5, 0.0)
        assert np.allclose(el.matrix, np.eye(group.size), atol=1e-15)


def test_random_element_form_residuals():
    for group in ALL_GROUPS:
        p = group.top
        for trial in range(8):
            g = random_group_element(group, 1000 + trial, 0.7).matrix
            sig = np.diag([1.0] * p + [-1.0] * (group.size - p))
            assert np.linalg.norm(g @ sig @ g.conj().T - sig) < 1e-12
            if isinstance(group, UPQ):
                continue
            a, b = g[:p, :p], g[:p, p:]
            c, d = g[p:, :p], g[p:, p:]
            assert np.abs(d - a.conj()).max() < 1e-13
            if isinstance(group, SP2N):
                form = np.block([[np.zeros((p, p)), np.eye(p)], [-np.eye(p), np.zeros((p, p))]])
                assert np.abs(c - b.conj()).max() < 1e-13
            else:
                form = np.block([[np.zeros((p, p)), np.eye(p)], [np.eye(p), np.zeros((p, p))]])
                assert np.abs(c + b.conj()).max() < 1e-13
            assert np.linalg.norm(g @ form @ g.T - form) < 1e-12


def test_hyperbolic_exponential_closed_form():
    t = 0.7317
    el = GroupElement(UPQ(1, 1), _expm(np.array([[0.0, t], [t, 0.0]], dtype=complex)))
    assert abs(el.block_a[0, 0] - np.cosh(t)) < 1e-12
    assert abs(el.block_b[0, 0] - np.sinh(t)) < 1e-12
    assert abs(el.block_c[0, 0] - np.sinh(t)) < 1e-12
    assert abs(el.block_d[0, 0] - np.cosh(t)) < 1e-12


def test_sostar_opposite_reality_sign_is_rejected():
    # With lower-left block +conj(b) the bilinear form still closes but the
    # element is unitary (compact realization) and is not a ball automorphism.
    rng = np.random.default_rng(77)
    raw = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
    b = (raw - raw.T) / 2.0
    x = np.block([[np.zeros((2, 2)), b], [b.conj(), np.zeros((2, 2))]])
    g = _expm(x)
    assert np.linalg.norm(g @ g.conj().T - np.eye(4)) < 1e-12
    with pytest.raises(ContractError):
        GroupElement(SOSTAR(2), g)


def test_compose_requires_same_group():
    g = random_group_element(UPQ(2, 2), 1, 0.3)
    h = random_group_element(SP2N(2), 2, 0.3)
    with pytest.raises(ContractError):
        g.compose(h)


def test_generation_rejects_bad_scale():
    with pytest.raises(ParameterError):
        random_group_element(UPQ(1, 1), 0, -1.0)
    with pytest.raises(ContractError):
        random_group_element(object(), 0, 0.5)


# ---------------------------------------------------------------------------
# fractional-linear action


def test_mobius_identity_fixes_points():
    rng = np.random.default_rng(31)
    for group in ALL_GROUPS:
        z = sample_point(group.domain, rng)
        assert np.array_equal(mobius(GroupElement.identity(group), z), z)


def test_mobius_at_origin_reads_off_blocks():
    g = random_group_element(UPQ(2, 3), 88, 0.5)
    image = mobius(g, np.zeros((2, 3)))
    assert np.allclose(image, np.linalg.solve(g.block_a, g.block_b), atol=1e-13)


def test_mobius_block_diagonal_rotates():
    rng = np.random.default_rng(19)
    a = _random_unitary(rng, 2)
    d = _random_unitary(rng, 3)
    g = GroupElement(UPQ(2, 3), np.block(
        [[a, np.zeros((2, 3))], [np.zeros((3, 2)), d]]))
    z = sample_point(g.group.domain, rng)
    assert np.allclose(mobius(g, z), np.linalg.solve(a, z @ d), atol=1e-13)


def test_mobius_preserves_ball_and_symmetry_class():
    rng = np.random.default_rng(47)
    for group in ALL_GROUPS:
        for trial in range(10):
            g = random_group_element(group, 3000 + trial, 0.6)
            w = mobius(g, sample_point(group.domain, rng))
            assert np.linalg.norm(w, 2) < 1.0
            if isinstance(group, SP2N):
                assert np.array_equal(w, w.T)
            elif isinstance(group, SOSTAR):
                assert np.array_equal(w, -w.T)
            validate_point(group.domain, w)


def test_mobius_rejects_invalid_points():
    g = random_group_element(SP2N(2), 4, 0.4)
    with pytest.raises(DomainError):
        mobius(g, 1.5 * np.eye(2))
    with pytest.raises(DomainError):
        mobius(g, np.zeros((2, 3)))
    asym = np.array([[0.1, 0.2], [0.3, 0.1]])
    with pytest.raises(DomainError):
        mobius(g, asym)


# ---------------------------------------------------------------------------
# group law


def test_group_law_identity_is_exact():
    rng = np.random.default_rng(53)
    for group in ALL_GROUPS:
        g = random_group_element(group, 9, 0.5)
        z = sample_point(group.domain, rng)
        assert group_law_residual(g, GroupElement.identity(group), z) == 0.0


def test_group_law_scalar_algebraic_identity():
    # (z^[g])^[h] = z^[g.h] holds for arbitrary invertible 2x2 complex
    # matrices in the scalar case; this pins the product order convention.
    rng = np.random.default_rng(59)

    def frac(m, z):
        return (m[0, 1] + z * m[1, 1]) / (m[0, 0] + z * m[1, 0])

    for _ in range(200):
        g = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        h = rng.standard_normal((2, 2)) + 1j * rng.standard_normal((2, 2))
        z = complex(rng.standard_normal(), rng.standard_normal())
        stepwise = frac(h, frac(g, z))
        combined = frac(g @ h, z)
        assert abs(stepwise - combined) < 1e-10 * max(1.0, abs(combined))


def test_group_law_random_triples():
    rng = np.random.default_rng(61)
    for group in ALL_GROUPS:
        worst = 0.0
        for trial in range(20):
            g = random_group_element(group, 4000 + trial, 0.6)
            h = random_group_element(group, 5000 + trial, 0.6)
            z = sample_point(group.domain, rng)
            worst = max(worst, group_law_residual(g, h, z))
        assert worst < 1e-12


# ---------------------------------------------------------------------------
# cocycle covariance


def test_cocycle_identity_element_zero():
    rng = np.random.default_rng(67)
    for group in ALL_GROUPS:
        z = sample_point(group.domain, rng)
        u = sample_point(group.domain, rng)
        gid = GroupElement.identity(group)
        assert cocycle_residual(gid, z, u, 2) == 0.0
        assert kernel_rep_covariance(gid, z, u, 1.5) == 0.0


def test_cocycle_scalar_denominator_identity():
    # 1 - z^[g] conj(u^[g]) = (1 - z conj(u)) / ((a+zc) conj(a+uc))
    g = random_group_element(UPQ(1, 1), 73, 0.8)
    a, b = g.block_a[0, 0], g.block_b[0, 0]
    c, d = g.block_c[0, 0], g.block_d[0, 0]
    rng = np.random.default_rng(79)
    for _ in range(25):
        z = complex(*(0.6 * rng.uniform(-1, 1, 2)))
        u = complex(*(0.6 * rng.uniform(-1, 1, 2)))
        zg = (b + z * d) / (a + z * c)
        ug = (b + u * d) / (a + u * c)
        lhs = 1.0 - zg * np.conj(ug)
        rhs = (1.0 - z * np.conj(u)) / ((a + z * c) * np.conj(a + u * c))
        assert abs(lhs - rhs) < 1e-14


def test_cocycle_integer_parameters():
    rng = np.random.default_rng(83)
    for group in ALL_GROUPS:
        for trial in range(10):
            g = random_group_element(group, 6000 + trial, 0.5)
            z = sample_point(group.domain, rng)
            u = sample_point(group.domain, rng)
            for s in (1, 2, 3):
                assert cocycle_residual(g, z, u, s) < 1e-12


def test_cocycle_fractional_modulus():
    rng = np.random.default_rng(89)
    for group in ALL_GROUPS:
        for trial in range(10):
            g = random_group_element(group, 7000 + trial, 0.5)
            z = sample_point(group.domain, rng)
            u = sample_point(group.domain, rng)
            for s in (1.5, 2.7):
                assert cocycle_residual(g, z, u, s) < 1e-10


def test_kernel_rep_covariance_bound_and_relation():
    rng = np.random.default_rng(97)
    for trial in range(10):
        g = random_group_element(SP2N(2), 8000 + trial, 0.5)
        z = sample_point(g.group.domain, rng)
        u = sample_point(g.group.domain, rng)
        s = 0.8
        rep = kernel_rep_covariance(g, z, u, s)
        assert rep < 1e-11
        # modulus-squaring relation: |m^2 - m0^2| = |m - m0| (m + m0)
        coc = cocycle_residual(g, z, u, s)
        spec = KernelSpec(g.group.domain, "HolomorphicDet", s)
        m0 = abs(kernel_value(spec, z, u))
        assert rep <= 2.0 * coc * max(1.0, 2.0 * m0 + coc) + 1e-14


# ---------------------------------------------------------------------------
# diagonal identification


def test_diag_identification_reproduces_modulus_kernel():
    rng = np.random.default_rng(101)
    for domain in (UPQ(2, 2).domain, SP2N(2).domain):
        u = sample_point(domain, rng)
        expansion = ProductKernelExpansion(domain, 1.3, ((u, np.conj(u)),), (1.0,))
        modulus = KernelSpec(domain, "ModulusDet", 1.3)
        for _ in range(5):
            z = sample_point(domain, rng)
            assert abs(diag_identification(expansion, z)
                       - kernel_value(modulus, z, u)) < 1e-12


def test_diag_identification_constant_expansion():
    domain = UPQ(2, 2).domain
    rng = np.random.default_rng(103)
    u = sample_point(domain, rng)
    expansion = ProductKernelExpansion(domain, 0.0, ((u, u),), (2.5 + 0.5j,))
    for _ in range(3):
        z = sample_point(domain, rng)
        assert abs(diag_identification(expansion, z) - (2.5 + 0.5j)) < 1e-14


def test_diag_identification_double_gram_unitarity():
    # Gram of the identified one-variable functions equals the Gram of the
    # two-variable expansion terms on conjugate-paired centers.
    domain = UPQ(2, 2).domain
    rng = np.random.default_rng(107)
    s = 0.9
    centers = [sample_point(domain, rng) for _ in range(5)]
    holo = KernelSpec(domain, "HolomorphicDet", s)
    modulus = KernelSpec(domain, "ModulusDet", s)
    for u in centers:
        for v in centers:
            two_var = kernel_value(holo, u, v) * kernel_value(holo, np.conj(u), np.conj(v))
            one_var = kernel_value(modulus, u, v)
            assert abs(two_var - one_var) < 1e-12 * max(1.0, abs(one_var))


def test_product_expansion_validation():
    domain = UPQ(2, 2).domain
    rng = np.random.default_rng(109)
    u = sample_point(domain, rng)
    with pytest.raises(ContractError):
        ProductKernelExpansion(domain, 1.0, ((u, u),), (1.0, 2.0))
    with pytest.raises(ContractError):
        ProductKernelExpansion(domain, 1.0, (), ())
    with pytest.raises(DomainError):
        ProductKernelExpansion(domain, 1.0, ((u, 2.0 * u),), (1.0,))


def test_diag_identification_evaluates_expansion():
    domain = SP2N(2).domain
    rng = np.random.default_rng(113)
    pairs = tuple((sample_point(domain, rng), sample_point(domain, rng)) for _ in range(3))
    coeffs = (1.0, -0.5 + 0.25j, 0.125j)
    expansion = ProductKernelExpansion(domain, 1.1, pairs, coeffs)
    z = sample_point(domain, rng)
    holo = KernelSpec(domain, "HolomorphicDet", 1.1)
    direct = sum(
        alpha * kernel_value(holo, z, u) * kernel_value(holo, np.conj(z), v)
        for alpha, (u, v) in zip(coeffs, pairs)
    )
    assert abs(diag_identification(expansion, z) - direct) < 1e-14


# ---------------------------------------------------------------------------
# Shilov boundary


def test_shilov_sample_invariant_and_determinism():
    z = shilov_sample(2, 3, 505)
    assert np.linalg.norm(z.matrix @ z.matrix.conj().T - np.eye(2)) < 1e-12
    assert np.array_equal(shilov_sample(2, 3, 505).matrix, z.matrix)
    assert not np.array_equal(shilov_sample(2, 3, 506).matrix, z.matrix)


def test_shilov_identity_padded_is_valid():
    padded = ShilovPoint(np.hstack([np.eye(2), np.zeros((2, 2))]))
    assert (padded.p, padded.q) == (2, 4)


def test_shilov_validation_errors():
    with pytest.raises(DomainError):
        ShilovPoint(0.5 * np.hstack([np.eye(2), np.zeros((2, 1))]))
    with pytest.raises(DomainError):
        ShilovPoint(np.eye(3)[:, :2])
    with pytest.raises(ParameterError):
        shilov_sample(3, 2, 0)


def test_boundary_action_preserves_shilov_stratum():
    for trial in range(5):
        g = random_group_element(UPQ(2, 3), 9000 + trial, 0.5)
        z = shilov_sample(2, 3, 9100 + trial)
        image = mobius_boundary(g, z)
        assert np.linalg.norm(image.matrix @ image.matrix.conj().T - np.eye(2)) < 1e-10


def test_boundary_action_requires_matching_group():
    g = random_group_element(SP2N(2), 1, 0.3)
    z = shilov_sample(2, 2, 2)
    with pytest.raises(ContractError):
        mobius_boundary(g, z)
    g23 = random_group_element(UPQ(2, 3), 3, 0.3)
    with pytest.raises(ContractError):
        mobius_boundary(g23, shilov_sample(2, 2, 4))


def test_orbit_invariant_examples():
    z = shilov_sample(2, 3, 11)
    assert orbit_invariant(z, ShilovPoint(np.conj(z.matrix)), 1e-8) == 0
    z1 = shilov_sample(1, 2, 12)
    u1 = shilov_sample(1, 2, 13)
    assert orbit_invariant(z1, u1, 1e-8) == 1
    u = shilov_sample(2, 3, 14)
    assert orbit_invariant(z, u, 1e-8) == 2


def test_orbit_invariant_under_diagonal_action():
    for trial in range(10):
        z = shilov_sample(2, 3, 500 + trial)
        u = shilov_sample(2, 3, 600 + trial)
        alpha = orbit_invariant(z, u, 1e-8)
        for gtrial in range(3):
            g = random_group_element(UPQ(2, 3), 700 + 10 * trial + gtrial, 0.5)
            moved = orbit_invariant(mobius_boundary(g, z), mobius_boundary(g, u), 1e-8)
            assert moved == alpha


def test_orbit_invariant_validation():
    z = shilov_sample(2, 3, 21)
    with pytest.raises(ContractError):
        orbit_invariant(z, shilov_sample(2, 4, 22), 1e-8)
    with pytest.raises(ParameterError):
        orbit_invariant(z, shilov_sample(2, 3, 23), 0.0)
