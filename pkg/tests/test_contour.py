"""Contour integration: path algebra, fundamental theorem, m-paths, forms."""

import random
from fractions import Fraction

import pytest

from superint.algebra import GrassmannElement as G
from superint.casegen import rand_nilpotent_even, rand_real_poly
from superint.contour import (
    Form1,
    MPath,
    Path,
    QuadratureSpec,
    form_path_integral,
    fundamental_theorem_check,
    mpath_integral,
    path_integral,
    path_inverse,
    path_reparametrize,
    path_sum,
    pullback_form1,
)
from superint.errors import DimensionError, ExactModeError
from superint.supersmooth import SuperMap, SupersmoothFn

LEVEL = 6


def s(*indices):
    return G.monomial(1, indices, LEVEL)


def t_var():
    return SupersmoothFn.coordinate(1, 1, 0, LEVEL)


def x_var():
    return SupersmoothFn.coordinate(1, 1, 0, LEVEL)


# -- basic integrals -----------------------------------------------------------


def test_straight_path_of_linear_integrand():
    mu = 1 + s(1, 2)
    g = Path.straight(G.zero(LEVEL), mu)
    value = path_integral(g, x_var())
    assert value == Fraction(1, 2) * (mu * mu)
    assert value == Fraction(1, 2) + s(1, 2)


def test_nilpotent_endpoint_shift():
    """Integrating x from a+nu to b+nu gives (b^2 - a^2)/2 + nu (b - a)."""
    a, b = Fraction(1), Fraction(3)
    nu = s(1, 2) + Fraction(1, 2) * s(3, 4)
    g = Path.straight(a + nu, b + nu)
    value = path_integral(g, x_var())
    want = Fraction(1, 2) * (b * b - a * a) + nu * (b - a)
    assert value == want


def test_constant_integrand_measures_endpoints():
    lam = Fraction(1, 3) + s(1, 2)
    mu = 2 + s(3, 4)
    g = Path.straight(lam, mu)
    one = SupersmoothFn.constant(1, 1, 0, LEVEL)
    assert path_integral(g, one) == mu - lam


def test_curved_path_same_endpoints_same_integral():
    # homotopic polynomial paths with equal endpoints agree for entire
    # integrands
    t = t_var()
    u = x_var() * x_var()
    straight = Path.from_polynomial(0, 1, t)
    curved = Path.from_polynomial(0, 1, t + (t - t * t) * SupersmoothFn.constant(
        s(1, 2), 1, 0, LEVEL))
    assert curved.start == straight.start and curved.end == straight.end
    assert path_integral(straight, u) == path_integral(curved, u)


# -- path algebra -----------------------------------------------------------------


def test_split_path_is_additive():
    t = t_var()
    u = x_var() * x_var() + 2
    whole = Path.from_polynomial(0, 2, t * t)
    first = Path.from_polynomial(0, 1, t * t)
    second = Path.from_polynomial(1, 2, t * t)
    joined = path_sum(first, second)
    assert path_integral(joined, u) == path_integral(whole, u)
    assert (path_integral(first, u) + path_integral(second, u)
            == path_integral(whole, u))


def test_sum_requires_matching_endpoints():
    t = t_var()
    with pytest.raises(DimensionError):
        path_sum(Path.from_polynomial(0, 1, t), Path.from_polynomial(0, 1, t + 2))


def test_inverse_negates_integral():
    t = t_var()
    g = Path.from_polynomial(0, 1, t + t * t * SupersmoothFn.constant(s(1, 2), 1, 0, LEVEL))
    u = x_var() * 3 + 1
    assert path_integral(path_inverse(g), u) == -path_integral(g, u)


def test_double_inverse_restores_values():
    t = t_var()
    g = Path.from_polynomial(0, 1, t * t + t)
    gg = path_inverse(path_inverse(g))
    for k in range(5):
        tt = Fraction(k, 4)
        assert gg.at(tt) == g.at(tt)


def test_sum_with_inverse_cancels():
    t = t_var()
    g = Path.from_polynomial(0, 1, t + t * t * SupersmoothFn.constant(s(1, 2), 1, 0, LEVEL))
    loop = path_sum(g, path_inverse(g))
    u = x_var() * x_var()
    assert path_integral(loop, u).is_zero()


# -- reparametrization ---------------------------------------------------------------


def test_identity_reparametrization():
    t = t_var()
    g = Path.from_polynomial(0, 1, t * t)
    h = path_reparametrize(g, t, 0, 1)
    u = x_var()
    assert path_integral(h, u) == path_integral(g, u)


def test_affine_reparametrization_exact():
    t = t_var()
    g = Path.from_polynomial(0, 1, t + SupersmoothFn.constant(s(1, 2), 1, 0, LEVEL) * t)
    phi = t * Fraction(1, 2) - 1  # [2, 4] -> [0, 1]
    h = path_reparametrize(g, phi, 2, 4)
    u = x_var() * x_var()
    assert path_integral(h, u) == path_integral(g, u)


def test_square_reparametrization_quadrature():
    t = t_var()
    g = Path.from_polynomial(0, 1, t)
    h = path_reparametrize(g, t * t, 0, 1)
    u = x_var()
    spec = QuadratureSpec()
    got = path_integral(h, u, spec)
    want = path_integral(g, u)
    assert (got - want).max_abs_coeff() < 1e-12


def test_non_monotone_reparametrization_rejected():
    t = t_var()
    g = Path.from_polynomial(0, 1, t)
    with pytest.raises(DimensionError):
        path_reparametrize(g, t * t * 2 - t, 0, 1)


# -- fundamental theorem ----------------------------------------------------------------


def test_fundamental_theorem_polynomial_pairs():
    rng = random.Random(3)
    t = t_var()
    for _ in range(10):
        big_u = rand_real_poly(rng, 1, 0, LEVEL, deg=4)
        soul = rand_nilpotent_even(rng, LEVEL)
        g = Path.from_polynomial(
            0, 1, t + SupersmoothFn.constant(soul, 1, 0, LEVEL) * (t * t))
        assert fundamental_theorem_check(g, big_u).is_zero()


def test_fundamental_theorem_flags_wrong_derivative():
    t = t_var()
    g = Path.from_polynomial(0, 1, t)
    with pytest.raises(ExactModeError):
        fundamental_theorem_check(g, x_var() * x_var(), x_var() * 3)


def test_constant_antiderivative():
    t = t_var()
    g = Path.from_polynomial(0, 1, t)
    c = SupersmoothFn.constant(s(1, 2) + 5, 1, 0, LEVEL)
    assert fundamental_theorem_check(g, c).is_zero()


def test_path_independence_quadrature():
    spec = QuadratureSpec()
    u = x_var() * x_var() * x_var()
    g1 = Path.from_callable(0.0, 1.0,
                            lambda t: G.scalar(t, LEVEL),
                            lambda t: G.scalar(1.0, LEVEL))
    g2 = Path.from_callable(0.0, 1.0,
                            lambda t: G.scalar(3 * t * t - 2 * t**3, LEVEL),
                            lambda t: G.scalar(6 * t - 6 * t * t, LEVEL))
    r1 = path_integral(g1, u, spec)
    r2 = path_integral(g2, u, spec)
    assert (r1 - r2).max_abs_coeff() < 1e-10


# -- m-paths --------------------------------------------------------------------------


def test_mpath_identity_embedding():
    x1 = SupersmoothFn.coordinate(1, 2, 0, LEVEL)
    x2 = SupersmoothFn.coordinate(2, 2, 0, LEVEL)
    g = MPath(box=((0, 1), (0, 1)), comps=(x1, x2))
    assert mpath_integral(g, x1 * x2) == G.scalar(Fraction(1, 4), LEVEL)
    assert mpath_integral(g, SupersmoothFn.constant(1, 2, 0, LEVEL)) == G.scalar(1, LEVEL)


def test_mpath_volume_of_box():
    x1 = SupersmoothFn.coordinate(1, 2, 0, LEVEL)
    x2 = SupersmoothFn.coordinate(2, 2, 0, LEVEL)
    g = MPath(box=((0, 2), (1, 4)), comps=(x1, x2))
    assert mpath_integral(g, SupersmoothFn.constant(1, 2, 0, LEVEL)) == G.scalar(6, LEVEL)


def test_mpath_affine_change_of_variables():
    """Rogers-style change: the image integral equals the parameter
    integral weighted by the Jacobian determinant."""
    rng = random.Random(7)
    x1 = SupersmoothFn.coordinate(1, 2, 0, LEVEL)
    x2 = SupersmoothFn.coordinate(2, 2, 0, LEVEL)
    u = rand_real_poly(rng, 2, 0, LEVEL, deg=2)
    # gamma = phi o iota for a linear phi with positive determinant
    a11, a22, a12 = Fraction(2), Fraction(3), Fraction(1, 2)
    comps = (x1 * a11 + x2 * a12, x2 * a22)
    g = MPath(box=((0, 1), (0, 1)), comps=comps)
    direct = mpath_integral(g, u)
    # quadrature cross-check of the same integral
    spec = QuadratureSpec(order=12, panels=4)
    numeric = mpath_integral(g, u, spec)
    assert (direct - numeric).max_abs_coeff() < 1e-9


def test_mpath_pullthrough_of_invertible_map():
    """Pushing an m-path through an invertible map and compensating with
    the inverse Jacobian determinant leaves the integral unchanged."""
    from superint.supersmooth import compose

    rng = random.Random(13)
    x1 = SupersmoothFn.coordinate(1, 2, 0, LEVEL)
    x2 = SupersmoothFn.coordinate(2, 2, 0, LEVEL)
    u = rand_real_poly(rng, 2, 0, LEVEL, deg=2)
    base = MPath(box=((0, 1), (0, 1)), comps=(x1, x2))
    # invertible affine map with a nilpotent shift
    nu = SupersmoothFn.constant(s(1, 2), 2, 0, LEVEL)
    phi = SuperMap(even=(x1 * 2 + nu, x2 * 3 + x1), odd=())
    phi_inv = SuperMap(
        even=((x1 - nu) * Fraction(1, 2), (x2 - (x1 - nu) * Fraction(1, 2)) * Fraction(1, 3)),
        odd=())
    det_jac = SupersmoothFn.constant(6, 2, 0, LEVEL)
    pushed = MPath(box=base.box, comps=tuple(compose(f, SuperMap(even=base.comps, odd=()))
                                             for f in phi.even))
    lhs = mpath_integral(base, u)
    weighted = det_jac.inverse_even() * compose(u, phi_inv)
    rhs = mpath_integral(pushed, weighted)
    assert lhs == rhs


def test_composition_of_changes_matches_two_step():
    """A composite change of variables applies in one step or two; the
    determinant multiplicativity keeps both equal."""
    from superint.supersmooth import compose, compose_map

    rng = random.Random(17)
    u = rand_real_poly(rng, 1, 0, LEVEL, deg=3)
    y = x_var()
    nu = SupersmoothFn.constant(s(1, 2), 1, 0, LEVEL)
    phi1 = SuperMap(even=(y * 2 + nu,), odd=())
    phi2 = SuperMap(even=(y * Fraction(1, 3) + 1,), odd=())
    phi = compose_map(phi2, phi1)

    t = t_var()
    g = Path.from_polynomial(0, 1, t)
    d1 = phi1.even[0].d_even(1)
    d2 = phi2.even[0].d_even(1)
    one_step = path_integral(g, phi.even[0].d_even(1) * compose(u, phi))
    two_step = path_integral(g, d1 * compose(d2 * compose(u, phi2), phi1))
    assert one_step == two_step
    # determinant multiplicativity at the 1-D level
    assert phi.even[0].d_even(1) == d1 * compose(d2, phi1)


# -- 1-forms -----------------------------------------------------------------------------


def test_pullback_identity_map():
    rho = x_var() * 2 + 1
    ident = SuperMap.identity(1, 0, LEVEL)
    assert pullback_form1(ident, Form1(rho)).rho == rho


def test_pullback_affine_contract():
    """x = 2y + 1: the form integral along gamma equals the pulled-back
    integral along the preimage path."""
    t = t_var()
    y = x_var()
    phi = SuperMap(even=(y * 2 + 1,), odd=())
    phi_inv = SuperMap(even=(y * Fraction(1, 2) - Fraction(1, 2),), odd=())
    rho = SupersmoothFn.constant(1, 1, 0, LEVEL)
    u = x_var()
    from superint.supersmooth import compose

    g = Path.from_polynomial(0, 1, t * 2 + 1)  # runs 1 -> 3 in x-space
    pre = Path.from_polynomial(0, 1, t)  # phi^-1 of g
    lhs = form_path_integral(g, Form1(rho), u)
    rhs = form_path_integral(pre, pullback_form1(phi, Form1(rho)), compose(u, phi))
    assert lhs == rhs
    assert lhs == G.scalar(Fraction(9, 2) - Fraction(1, 2), LEVEL)


def test_translation_shifts_paths_not_values():
    """Moving the manifold by a nilpotent and compensating in the
    integrand leaves the integral unchanged."""
    nu = s(1, 2)
    a, b = Fraction(0), Fraction(1)
    rng = random.Random(11)
    u = rand_real_poly(rng, 1, 0, LEVEL, deg=3)
    base = Path.straight(a + G.zero(LEVEL), b + G.zero(LEVEL))
    moved = Path.straight(a + nu, b + nu)
    y = x_var()
    shift_back = SuperMap(even=(y - SupersmoothFn.constant(nu, 1, 0, LEVEL),), odd=())
    from superint.supersmooth import compose

    assert path_integral(moved, compose(u, shift_back)) == path_integral(base, u)


def test_path_integral_domain_enforced():
    from superint.errors import DomainError
    from superint.supersmooth import SuperDomain

    t = t_var()
    g = Path.from_polynomial(0, 2, t)  # leaves (0, 1) at t > 1
    with pytest.raises(DomainError):
        path_integral(g, x_var(), domain=SuperDomain.from_box([(0, 1)]))


def test_exact_mode_requires_polynomial_data():
    g = Path.from_callable(0.0, 1.0,
                           lambda t: G.scalar(t, LEVEL),
                           lambda t: G.scalar(1.0, LEVEL))
    with pytest.raises(ExactModeError):
        path_integral(g, x_var())


def test_mpath_callable_mode():
    spec = QuadratureSpec(order=8, panels=2)
    g = MPath(
        box=((0.0, 1.0), (0.0, 1.0)),
        value=lambda t: [G.scalar(t[0], LEVEL), G.scalar(t[1], LEVEL)],
        jac=lambda t: [[G.scalar(1.0, LEVEL), G.scalar(0.0, LEVEL)],
                       [G.scalar(0.0, LEVEL), G.scalar(1.0, LEVEL)]],
    )
    x1 = SupersmoothFn.coordinate(1, 2, 0, LEVEL)
    x2 = SupersmoothFn.coordinate(2, 2, 0, LEVEL)
    got = mpath_integral(g, x1 * x2, spec)
    assert abs(float(got.body) - 0.25) < 1e-13


def test_quadrature_tolerance_failure_is_reported():
    from superint.errors import ToleranceError

    # a kink inside one panel defeats the convergence check at tight tol
    g = Path.from_callable(0.0, 1.0,
                           lambda t: G.scalar(abs(t - 0.37) ** 1.5, LEVEL),
                           lambda t: G.scalar(1.5 * abs(t - 0.37) ** 0.5
                                              * (1 if t > 0.37 else -1), LEVEL))
    u = x_var() * x_var()
    with pytest.raises(ToleranceError):
        path_integral(g, u, QuadratureSpec(order=4, panels=1, tol=1e-15))
