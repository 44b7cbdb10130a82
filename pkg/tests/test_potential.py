import math

import numpy as np
import pytest

from jordan_hessian import algebra as alg
from jordan_hessian import potential as pot
from jordan_hessian.config import StencilConfig
from jordan_hessian.errors import ConvergenceError, DivergenceError, DomainError, NotJordanError
from jordan_hessian.numdiff import fd_consistency, fd_derivative

from conftest import FAMILIES, FAMILY_IDS, non_jordan_r2, random_cone_point, random_point_in_series_region

LINE = alg.metrised(alg.componentwise(1))


# ---------------------------------------------------------------- series


def test_series_line_closed_form():
    # x - log(1 + x) at x = 0.5
    assert pot.series_potential(LINE, [0.5]) == pytest.approx(0.09453489189183562, rel=1e-13)


@pytest.mark.parametrize("name,M", FAMILIES, ids=FAMILY_IDS)
def test_series_at_zero(name, M):
    assert pot.series_potential(M, np.zeros(M.dim)) == 0.0
    np.testing.assert_array_equal(pot.series_gradient(M, np.zeros(M.dim)), np.zeros(M.dim))


def test_series_sym2_value():
    M = alg.metrised(alg.sym(2))
    x = alg.sym_to_vec(np.diag([0.3, -0.2]))
    oracle = -1.5 * (math.log(1.3) + math.log(0.8)) + 1.5 * 0.1
    assert oracle == pytest.approx(0.091168930270078, rel=1e-12)
    assert pot.series_potential(M, x) == pytest.approx(oracle, rel=1e-13)


def test_series_divergence_and_cap():
    with pytest.raises(DivergenceError):
        pot.series_potential(LINE, [1.0])
    with pytest.raises(ConvergenceError):
        pot.series_potential(LINE, [0.99], max_terms=50)


def test_series_gradient_line():
    assert pot.series_gradient(LINE, [0.5])[0] == pytest.approx(1.0 / 3.0, rel=1e-14)


def test_series_gradient_matches_central_difference():
    M = alg.metrised(alg.componentwise(2))
    x = np.array([0.1, 0.2])
    fd = fd_derivative(lambda z: pot.series_potential(M, z), x, 1)
    np.testing.assert_allclose(pot.series_gradient(M, x), fd, rtol=0, atol=1e-7)


def test_series_hessian_line():
    assert pot.series_hessian(LINE, [0.5])[0, 0] == pytest.approx(4.0 / 9.0, rel=1e-14)


@pytest.mark.parametrize("name,M", FAMILIES, ids=FAMILY_IDS)
def test_series_derivatives_at_zero(name, M, rng):
    n = M.dim
    np.testing.assert_allclose(pot.series_hessian(M, np.zeros(n)), M.sigma, atol=1e-15)
    T = pot.series_third(M, np.zeros(n))
    cubic = -2.0 * np.einsum("ag,gbc->abc", M.sigma, M.algebra.structure)
    np.testing.assert_allclose(T, cubic, atol=1e-13)


@pytest.mark.parametrize("name,M", FAMILIES, ids=FAMILY_IDS)
def test_series_hessian_symmetric(name, M, rng):
    for _ in range(5):
        x = random_point_in_series_region(M.algebra, rng, 0.8)
        H = pot.series_hessian(M, x)
        assert np.linalg.norm(H - H.T) <= 1e-10 * np.linalg.norm(H)


@pytest.mark.parametrize("name,M", FAMILIES, ids=FAMILY_IDS)
def test_series_exact_derivatives_vs_fd(name, M, rng):
    x = random_point_in_series_region(M.algebra, rng, 0.5)
    f = lambda z: pot.series_potential(M, z)
    cfg = StencilConfig(richardson_levels=3)
    assert fd_consistency(f, pot.series_gradient(M, x), x, 1, cfg) <= 1e-6
    assert fd_consistency(f, pot.series_hessian(M, x), x, 2, cfg) <= 1e-6
    assert fd_consistency(f, pot.series_third(M, x), x, 3, cfg) <= 1e-6


def test_fourth_derivative_at_zero_spot_check(rng):
    M = alg.metrised(alg.spin(4))
    F = pot.series_field(M)
    T4 = F.fourth(np.zeros(4))
    for _ in range(3):
        v = rng.standard_normal(4)
        v3 = alg.power(M.algebra, v, 3)
        want = 6.0 * M.form(v3, v)
        got = np.einsum("abcd,a,b,c,d->", T4, v, v, v, v)
        assert abs(got - want) <= 1e-7 * max(1.0, abs(want))


def test_series_field_requires_jordan():
    M = alg.MetrisedAlgebra(non_jordan_r2(), alg.BilinearForm([[0.0, 1.0], [1.0, 0.0]]))
    with pytest.raises(NotJordanError):
        pot.series_field(M)
    F = pot.series_field(M, check_jordan=False)
    assert F.source_tag(2) == pot.FD


def test_series_field_domain():
    F = pot.series_field(LINE)
    assert F.in_domain([0.9]) and not F.in_domain([1.1])
    with pytest.raises(DomainError):
        F.value([1.5])


# ---------------------------------------------------------------- log-det


def test_logdet_at_zero():
    M = alg.metrised(alg.componentwise(2))
    assert pot.logdet_potential(M, [0.0, 0.0]) == 0.0


@pytest.mark.parametrize("name,M", FAMILIES, ids=FAMILY_IDS)
def test_logdet_derivatives_at_zero(name, M, rng):
    A = M.algebra
    u = rng.standard_normal(A.dim)
    g = pot.logdet_gradient(M, np.zeros(A.dim))
    # weighted trace of L_u, i.e. sigma(e, u)
    assert g @ u == pytest.approx(-M.form(alg.unit(A), u), abs=1e-12)
    H = pot.logdet_hessian(M, np.zeros(A.dim))
    assert u @ H @ u == pytest.approx(M.form(alg.unit(A), alg.multiply(A, u, u)), rel=1e-8)


def test_logdet_trace_form_derivatives_at_zero(rng):
    A = alg.sym(3)
    M = alg.metrised(A)
    u = rng.standard_normal(A.dim)
    trL = lambda w: np.trace(alg.left_mult(A, w))
    assert pot.logdet_gradient(M, np.zeros(6)) @ u == pytest.approx(-trL(u), rel=1e-12)
    H = pot.logdet_hessian(M, np.zeros(6))
    assert u @ H @ u == pytest.approx(trL(alg.multiply(A, u, u)), rel=1e-8)


def test_logdet_eigenvalue_error():
    with pytest.raises(Exception):
        pot.logdet_potential(alg.metrised(alg.componentwise(2)), [-1.0, 0.0])


@pytest.mark.parametrize("name,M", FAMILIES, ids=FAMILY_IDS)
def test_series_equals_logdet_plus_linear_term(name, M, rng):
    A = M.algebra
    e = alg.unit(A)
    for _ in range(20):
        sd = alg.spectral(A, rng.standard_normal(A.dim))
        x = rng.uniform(-0.5, 0.5, sd.eigenvalues.size) @ sd.idempotents
        closed = pot.logdet_potential(M, x) + M.form(e, x)
        assert abs(pot.series_potential(M, x) - closed) <= 1e-8 * (1 + abs(closed))


# ---------------------------------------------------------------- barriers


def test_barrier_neglog():
    B = pot.canonical_barrier(pot.barrier_spec([(LINE, 1.0)]))
    assert B.value([2.0]) == pytest.approx(-math.log(2.0))
    assert B.gradient([2.0])[0] == pytest.approx(-0.5)
    assert B.hessian([2.0])[0, 0] == pytest.approx(0.25)
    assert B.third([2.0])[0, 0, 0] == pytest.approx(-0.25)
    assert B.fourth([2.0]).item() == pytest.approx(0.375, rel=1e-8)
    assert not B.in_domain([0.0]) and not B.in_domain([-1.0])
    with pytest.raises(DomainError):
        B.value([-1.0])


def test_barrier_sym2_value():
    B = pot.canonical_barrier(pot.barrier_spec([(alg.metrised(alg.sym(2)), 1.0)]))
    x = alg.sym_to_vec(np.diag([2.0, 3.0]))
    assert B.value(x) == pytest.approx(-2.6876392038420827, rel=1e-14)


def test_barrier_offset_and_center():
    spec = pot.barrier_spec([(alg.metrised(alg.spin(3)), 2.0)], center=[1.0, 0.5, 0.0], offset=3.0)
    B = pot.canonical_barrier(spec)
    x = np.array([3.0, 0.5, 1.0])  # delta = (2, 0, 1): eigenvalues 3, 1
    assert B.value(x) == pytest.approx(3.0 - 2.0 * 1.5 * math.log(3.0))


def test_barrier_spec_validation():
    with pytest.raises(ValueError):
        pot.barrier_spec([(LINE, -1.0)])
    with pytest.raises(Exception):
        pot.barrier_spec([(alg.MetrisedAlgebra(non_jordan_r2(), [[0, 1], [1, 0]]), 1.0)])


@pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
def test_barrier_homogeneity(alpha, rng):
    spec = pot.barrier_spec([(alg.metrised(alg.sym(2)), 1.0), (alg.metrised(alg.spin(3)), 2.0)])
    B = pot.canonical_barrier(spec)
    nu = pot.homogeneity_parameter(spec)
    assert nu == -9.0
    x = random_cone_point(spec.algebra().algebra, rng)
    assert abs(B.value(alpha * x) - nu * math.log(alpha) - B.value(x)) <= 1e-9 * (1 + abs(B.value(x)))


def test_homogeneity_parameter_examples():
    assert pot.homogeneity_parameter(pot.barrier_spec([(LINE, 1.0)])) == -1.0
    spec = pot.barrier_spec([(alg.metrised(alg.sym(2)), 1.0)])
    assert pot.homogeneity_parameter(spec) == -3.0
    B = pot.canonical_barrier(spec)
    x = alg.sym_to_vec(np.array([[2.0, 0.3], [0.3, 1.0]]))
    assert (B.value(2 * x) - B.value(x)) / math.log(2.0) == pytest.approx(-3.0, rel=1e-12)


def test_barrier_cross_blocks_exactly_zero(rng):
    spec = pot.barrier_spec([(alg.metrised(alg.sym(2)), 1.0), (alg.metrised(alg.spin(3)), 2.0)])
    B = pot.canonical_barrier(spec)
    x = random_cone_point(spec.algebra().algebra, rng)
    H, T = B.hessian(x), B.third(x)
    assert np.all(H[:3, 3:] == 0) and np.all(T[:3, 3:, :] == 0) and np.all(T[3:, :3, :3] == 0)


def test_barrier_hessian_positive_definite(rng):
    spec = pot.barrier_spec([(alg.metrised(alg.sym(3)), 1.0), (alg.metrised(alg.componentwise(2)), 0.5)])
    B = pot.canonical_barrier(spec)
    for _ in range(10):
        x = random_cone_point(spec.algebra().algebra, rng, 0.05, 20.0)
        assert np.min(np.linalg.eigvalsh(B.hessian(x))) > 0


def test_barrier_hessian_matches_logdet_route(rng):
    # barrier Hessian (closed form) vs log-det Hessian (differenced gradient)
    M = alg.metrised(alg.sym(2))
    B = pot.canonical_barrier(pot.barrier_spec([(M, 1.0)]))
    x = random_cone_point(M.algebra, rng, 0.6, 1.6)
    e = alg.unit(M.algebra)
    np.testing.assert_allclose(B.hessian(x), pot.logdet_hessian(M, x - e), rtol=1e-8, atol=1e-10)
    np.testing.assert_allclose(B.gradient(x), pot.logdet_gradient(M, x - e), rtol=1e-12)


def test_scaled_field():
    B = pot.canonical_barrier(pot.barrier_spec([(LINE, 1.0)]))
    S = pot.scaled_field(B, 3.0)
    assert S.value([2.0]) == pytest.approx(3 * B.value([2.0]))
    assert S.hessian([2.0])[0, 0] == pytest.approx(0.75)


def test_quadratic_field():
    Q = np.array([[2.0, 1.0], [1.0, 3.0]])
    F = pot.quadratic_field(Q)
    x = np.array([0.5, -1.0])
    assert F.value(x) == pytest.approx(0.5 * x @ Q @ x)
    np.testing.assert_array_equal(F.third(x), 0)
    np.testing.assert_array_equal(F.fourth(x), 0)


def test_user_field_uses_finite_differences():
    F = pot.user_field(lambda x: x[0] ** 4, 1, domain=lambda x: x[0] > 0)
    assert F.source_tag(2) == pot.FD
    assert F.hessian([1.0])[0, 0] == pytest.approx(12.0, rel=1e-8)
