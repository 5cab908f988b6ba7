import math

import numpy as np
import pytest

from aniso import families as fam
from aniso import geometry as geo
from aniso.basis import ElementKind, rt0_basis
from aniso.errors import UnsupportedKind
from aniso.fields import (
    AffineComposition,
    Difference,
    ScalarField,
    VectorField,
    polynomial_field,
    random_polynomial,
    random_vector_polynomial,
)
from aniso.interpolation import (
    commuting_residual,
    interpolate,
    l2_project,
    piola_pull,
    piola_push,
    rt0_interpolate,
)
from aniso.norms import SeminormSpec, lp_norm, seminorm
from aniso.polynomial import linear_combination
from aniso.quadrature import integrate, integrate_embedded, rule
from aniso.standardization import direction_frame, factorize, standardize

from conftest import random_simplex

PHI = polynomial_field(2, {(2, 0): 2.0, (1, 1): -1.0, (0, 2): 3.0})


def local(f, T):
    """f composed with x -> (x - centroid)/h_T so derivatives are O(1) on T."""
    h = T.diameter()
    return AffineComposition(f, np.eye(T.dim) / h, -T.centroid() / h)


@pytest.mark.parametrize("s,eps", [(2.0**-5, 1.5), (2.0**-8, 2.0), (0.3, 3.0)])
def test_lagrange_closed_form(s, eps):
    T = fam.right_angled(s, eps)
    phi = polynomial_field(2, {(2, 0): 1.0, (0, 2): 1.0})
    I = interpolate("Lagrange", T, phi)
    X = T.to_physical(np.random.default_rng(0).dirichlet(np.ones(3), size=10))
    np.testing.assert_allclose(I.value(X), s * X[:, 0] + s**eps * X[:, 1], rtol=1e-12, atol=1e-300)


def test_unknown_kind(unit_triangle):
    with pytest.raises(UnsupportedKind):
        interpolate("Hermite", unit_triangle, PHI)
    with pytest.raises(UnsupportedKind):
        commuting_residual("Lagrange", unit_triangle, PHI)


@pytest.mark.parametrize("d", [2, 3])
def test_cr_preserves_face_means(rng, d):
    T = random_simplex(rng, d)
    f = random_polynomial(d, 2, rng)
    I = interpolate("CR", T, f)
    for i in range(d + 1):
        F = geo.facet_vertices(T, i)
        a = integrate_embedded(F, I.value, rule(d - 1))
        b = integrate_embedded(F, f.value, rule(d - 1))
        assert a == pytest.approx(b, rel=1e-11, abs=1e-13)


@pytest.mark.parametrize("d", [2, 3])
def test_l2_projection(rng, d):
    T = random_simplex(rng, d)
    c = polynomial_field(d, {(0,) * d: 2.5})
    P0 = l2_project(T, c, 0)
    assert P0.coeffs[0] == pytest.approx(2.5, rel=1e-13)
    lin = random_polynomial(d, 1, rng)
    X = rng.normal(size=(6, d))
    np.testing.assert_allclose(l2_project(T, lin, 1).value(X), lin.value(X), atol=1e-10)
    f = random_polynomial(d, 3, rng)
    P1 = l2_project(T, f, 1)
    for q in P1.functions:
        r = integrate(T, lambda Y, q=q: (P1.value(Y) - f.value(Y)) * q.value(Y))
        assert abs(r) <= 1e-11 * max(1.0, lp_norm(T, f) * lp_norm(T, q))


def test_poincare_bound_random(rng):
    for i in range(100):
        T = random_simplex(rng, 2 + i % 2)
        f = local(random_polynomial(T.dim, 2, rng), T)
        lhs = lp_norm(T, Difference(f, l2_project(T, f, 0).poly))
        assert lhs <= T.diameter() / math.pi * seminorm(T, f)


def test_piola_identity_transform(rng):
    T = random_simplex(rng, 2)
    F = factorize(standardize(T))
    F_id = type(F)(np.eye(2), np.eye(2), np.eye(2), np.zeros(2), F.type_tag)
    v = random_vector_polynomial(2, 2, rng)
    X = rng.normal(size=(5, 2))
    np.testing.assert_allclose(piola_push(F_id, v).value(X), v.value(X), atol=1e-14)
    back = piola_pull(F, piola_push(F, v))
    np.testing.assert_allclose(back.value(X), v.value(X), atol=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_piola_integral_identities(rng, d):
    T = random_simplex(rng, d)
    F = factorize(standardize(T))
    Ainv = np.linalg.inv(F.A)
    That = geo.Simplex(F.reference_vertices())
    vhat = random_vector_polynomial(d, 2, rng)
    phat = random_polynomial(d, 2, rng)
    v = piola_push(F, vhat)
    phi = AffineComposition(phat, Ainv, -Ainv @ F.b_T)

    def div_pair(K, vv, ff):
        return integrate(K, lambda X: vv.divergence(X) * ff.value(X))

    def flux(K, vv, ff):
        n = geo.outward_normals(K)
        return sum(
            integrate_embedded(geo.facet_vertices(K, i), lambda X, i=i: (vv.value(X) @ n[i]) * ff.value(X), rule(d - 1))
            for i in range(d + 1)
        )

    assert div_pair(T, v, phi) == pytest.approx(div_pair(That, vhat, phat), rel=1e-10, abs=1e-10)
    assert flux(T, v, phi) == pytest.approx(flux(That, vhat, phat), rel=1e-10, abs=1e-10)


def test_rt0_reference_example(unit_triangle):
    v = VectorField(
        lambda X: np.column_stack([np.zeros(len(X)), X[:, 1] ** 2]),
        lambda X: np.stack([np.zeros((len(X), 2)), np.column_stack([np.zeros(len(X)), 2 * X[:, 1]])], axis=1),
    )
    I = rt0_interpolate(unit_triangle, v)
    X = np.random.default_rng(3).random((6, 2)) * 0.4
    np.testing.assert_allclose(I.value(X), X / 3, atol=1e-14)


def test_rt0_reproduces_rt0_fields(rng):
    for d in (2, 3):
        T = random_simplex(rng, d)
        B = rt0_basis(T)
        c = rng.normal(size=d + 1)
        v = linear_combination(B.functions, c)
        np.testing.assert_allclose(rt0_interpolate(T, v).coeffs, c, atol=1e-10)


@pytest.mark.parametrize("d", [2, 3])
def test_commuting_residuals(rng, d):
    for _ in range(5):
        T = random_simplex(rng, d)
        assert commuting_residual("CR", T, local(random_polynomial(d, 3, rng), T)) < 1e-8
        assert commuting_residual("Morley", T, local(random_polynomial(d, 4, rng), T)) < 1e-8
        assert commuting_residual("RT0", T, random_vector_polynomial(d, 2, rng)) < 1e-8 * max(1.0, T.diameter() ** -2)


def test_lagrange_linf_stability(rng):
    for i in range(50):
        T = random_simplex(rng, 2 + i % 2)
        f = local(random_polynomial(T.dim, 3, rng), T)
        c = lp_norm(T, Difference(f, interpolate("Lagrange", T, f).poly), math.inf) / lp_norm(T, f, math.inf)
        assert c <= T.dim + 2


def test_cr_and_morley_bounds(rng):
    tensor = lambda m: SeminormSpec(m=m, convention="tensor")  # noqa: E731
    for i in range(100):
        T = random_simplex(rng, 2 + i % 2)
        h = T.diameter()
        f = local(random_polynomial(T.dim, 2, rng) + random_polynomial(T.dim, 4, rng, scale=0.1), T)
        Icr = interpolate("CR", T, f)
        assert seminorm(T, Difference(f, Icr.poly), tensor(1)) <= h / math.pi * seminorm(T, f, tensor(2))
        Im = interpolate("Morley", T, f)
        assert seminorm(T, Difference(f, Im.poly), tensor(2)) <= h / math.pi * seminorm(T, f, tensor(3))


def _anisotropic_ratio(T):
    S = standardize(T)
    D = direction_frame(S)
    num = seminorm(T, Difference(PHI, interpolate("Lagrange", T, PHI).poly))
    den = 0.0
    for h, r in zip(S.h, D.r):
        g = ScalarField(lambda X, r=r: PHI.derivative(X, 1) @ r, {1: lambda X, r=r: PHI.derivative(X, 2) @ r})
        den += h * seminorm(T, g)
    return num / den


def test_anisotropic_estimate_bounded_on_dagger():
    ratios = [_anisotropic_ratio(fam.dagger(2.0**-k, 1.5, 2.0)) for k in range(5, 11)]
    assert max(ratios) / min(ratios) < 1.5
    blade = [_anisotropic_ratio(fam.blade(2.0**-k, 2.0)) for k in range(5, 11)]
    assert blade[-1] > 16 * blade[0]


@pytest.mark.parametrize("eps", [1.5, 2.0, 3.0])
def test_linf_ratio_is_one_eighth(eps):
    from aniso.standardization import mathscr_h

    phi = polynomial_field(2, {(2, 0): 1.0, (0, 2): 1.0})
    for k in range(5, 11):
        T = fam.right_angled(2.0**-k, eps)
        I = interpolate("Lagrange", T, phi)
        H = mathscr_h(standardize(T)).values
        num = lp_norm(T, Difference(phi, I.poly), math.inf)
        den = geo.measure(T) ** -0.5 * seminorm(T, phi, SeminormSpec(m=2, frame="weighted", weights=H))
        assert num / den == pytest.approx(1 / 8, abs=1e-9)


def test_interpolant_kind_recorded(unit_tet):
    I = interpolate(ElementKind.Morley, unit_tet, random_polynomial(3, 2, np.random.default_rng(0)))
    assert I.kind is ElementKind.Morley
    assert len(I.coeffs) == 10
