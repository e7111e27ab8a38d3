"""Integration over odd variables and its algebraic laws.

The integral of an odd polynomial v = sum_a theta^a v_a is the iterated
left derivative (d/dtheta_n ... d/dtheta_1 v)(0), i.e. the coefficient
v_1bar standing right of the top monomial, normalized so the integral of
theta_1...theta_n is exactly 1. The module also houses the direct
even x odd product integral (top-coefficient extraction followed by a
body-box integral) that serves as the comparison baseline for the
change-of-variables diagnostics.
"""

from __future__ import annotations

from typing import Mapping, Sequence

from .algebra import GrassmannElement, Parity
from .errors import DimensionError, ParityError, ZeroBodyError
from .quadrature import QuadratureSpec, integrate_box_quad
from .supermatrix import even_det
from .supersmooth import SuperDomain, SuperMap, SupersmoothFn, compose, integrate_box

# An odd polynomial is a supersmooth function with no even variables;
# coefficients multiply from the right.
OddPolynomial = SupersmoothFn


def odd_polynomial(n: int, level: int, coeffs: Mapping) -> OddPolynomial:
    """Build sum_a theta^a v_a from an a -> Grassmann-constant table."""
    return SupersmoothFn.from_odd_coeffs(0, n, level, coeffs)


def berezin_coefficient(u: SupersmoothFn) -> SupersmoothFn:
    """Iterated odd derivative at theta = 0, kept as a function of x.

    Applies the axes in ascending order (axis 1 innermost), the order
    that makes the top monomial integrate to one, and returns a function
    with no odd variables.
    """
    cur = u
    for k in range(1, u.n + 1):
        cur = cur.d_odd(k)
    cur = cur.odd_part_at_zero()
    if cur.is_polynomial:
        return SupersmoothFn(u.m, 0, u.level, terms=dict(cur._terms))
    return SupersmoothFn(u.m, 0, u.level, oracles=dict(cur._oracles))


def berezin_full(v: OddPolynomial) -> GrassmannElement:
    """The integral of an odd polynomial (m = 0 function)."""
    if v.m != 0:
        raise DimensionError("odd polynomials have no even variables; "
                             "use berezin_coefficient for functions of x")
    return berezin_coefficient(v).constant_value()


def berezin_partial(v: SupersmoothFn, axes: Sequence[int]) -> SupersmoothFn:
    """Integrate out a subset of odd axes (highest axis outermost).

    Iterating over complementary subsets reproduces the full integral.
    """
    order = sorted(set(axes))
    if len(order) != len(tuple(axes)):
        raise DimensionError("integration axes must be distinct")
    cur = v
    for k in order:
        if not 1 <= k <= v.n:
            raise DimensionError(f"odd axis {k} out of range 1..{v.n}")
        cur = cur.d_odd(k)
    return cur


def translate_odd(v: OddPolynomial, rho: Sequence[GrassmannElement]) -> OddPolynomial:
    """v(theta + rho) expanded exactly through the algebra product."""
    if len(rho) != v.n:
        raise DimensionError("translation vector length differs from n")
    comps = []
    for k, r in enumerate(rho, start=1):
        if not isinstance(r, GrassmannElement):
            raise ParityError("translation components must be Grassmann elements")
        if not r.is_zero() and r.parity() is not Parity.ODD:
            raise ParityError("translation components must be odd")
        comps.append(SupersmoothFn.odd_coordinate(k, v.m, v.n, v.level)
                     + SupersmoothFn.constant(r.lift(v.level), v.m, v.n, v.level))
    shift = SuperMap(even=tuple(SupersmoothFn.coordinate(j, v.m, v.n, v.level)
                                for j in range(1, v.m + 1)),
                     odd=tuple(comps))
    return compose(v, shift)


def _coerce_even_matrix(a, n: int, level: int):
    rows = []
    for row in a:
        r = []
        for entry in row:
            if isinstance(entry, GrassmannElement):
                g = entry.lift(level)
            else:
                g = GrassmannElement.scalar(entry, level)
            if not g.is_zero() and g.parity() is not Parity.EVEN:
                raise ParityError("change-of-variables matrix must have even entries")
            r.append(g)
        rows.append(tuple(r))
    if len(rows) != n or any(len(r) != n for r in rows):
        raise DimensionError(f"matrix must be {n}x{n}")
    return tuple(rows)


def odd_linear_change(v: OddPolynomial, a) -> GrassmannElement:
    """Value of the linear change-of-variables identity.

    Returns (det A)^-1 . integral of v(A . omega) and asserts equality
    with the integral of v, where (A . omega)_j = sum_k A_jk omega_k.
    """
    mat = _coerce_even_matrix(a, v.n, v.level)
    det = even_det(mat)
    if det.body == 0:
        raise ZeroBodyError("matrix is body-singular")
    comps = []
    for j in range(v.n):
        acc = SupersmoothFn.zero(v.m, v.n, v.level)
        for k in range(v.n):
            acc = acc + SupersmoothFn.odd_coordinate(k + 1, v.m, v.n, v.level) * mat[j][k]
        comps.append(acc)
    change = SuperMap(even=tuple(SupersmoothFn.coordinate(j, v.m, v.n, v.level)
                                 for j in range(1, v.m + 1)),
                      odd=tuple(comps))
    value = det.inverse_even() * berezin_full(compose(v, change))
    direct = berezin_full(v)
    if value != direct:
        raise AssertionError("linear odd change of variables violated; sign data corrupt")
    return value


def odd_cov(v: OddPolynomial, theta_of_omega: SuperMap) -> GrassmannElement:
    """Value of the nonlinear odd change-of-variables identity.

    theta(omega) must fix 0 and have a body-invertible derivative
    matrix at omega = 0; returns the transformed integral of
    (det dtheta/domega)^-1 . v(theta(omega)), asserted equal to the
    integral of v.
    """
    if v.m != 0:
        raise DimensionError("odd change of variables applies to odd polynomials")
    sm, sn = theta_of_omega.source_dims
    if sm != 0 or sn != v.n or theta_of_omega.target_dims != (0, v.n):
        raise DimensionError("change of variables must map 0|n to 0|n")
    for comp in theta_of_omega.odd:
        if not comp.odd_part_at_zero().is_zero():
            raise ParityError("odd change of variables must fix the origin")
    deriv = tuple(
        tuple(theta_of_omega.odd[j].d_odd(i + 1) for j in range(v.n)) for i in range(v.n)
    )
    det = even_det(deriv)
    if det.odd_part_at_zero().constant_value().body == 0:
        raise ZeroBodyError("derivative matrix is body-singular at omega = 0")
    integrand = det.inverse_even() * compose(v, theta_of_omega)
    value = berezin_full(integrand)
    direct = berezin_full(v)
    if value != direct:
        raise AssertionError("odd change of variables violated; sign data corrupt")
    return value


def odd_delta(omega: Sequence[GrassmannElement], n: int, level: int) -> OddPolynomial:
    """The reproducing kernel (theta_1 - omega_1)...(theta_n - omega_n).

    Integrating delta(theta - omega) . v(theta) over theta returns
    v(omega); the reversed factor ordering differs by (-1)^n.
    """
    if len(omega) != n:
        raise DimensionError("omega length differs from n")
    prod = SupersmoothFn.constant(1, 0, n, level)
    for k, w in enumerate(omega, start=1):
        if not w.is_zero() and w.parity() is not Parity.ODD:
            raise ParityError("delta shifts must be odd elements")
        factor = (SupersmoothFn.odd_coordinate(k, 0, n, level)
                  - SupersmoothFn.constant(w.lift(level), 0, n, level))
        prod = prod * factor
    return prod


def integration_by_parts_check(v: OddPolynomial, w: OddPolynomial, s: int) -> GrassmannElement:
    """Residual of the integration-by-parts law for axis s; must be 0."""
    pv = v.parity()
    if pv is Parity.MIXED:
        raise ParityError("integration by parts needs homogeneous v")
    sign = -1 if pv is Parity.ODD else 1
    lhs = berezin_full(v * w.d_odd(s))
    rhs = berezin_full(v.d_odd(s) * w)
    return lhs + sign * rhs


def naive_integral(u: SupersmoothFn, dom: SuperDomain,
                   quad: QuadratureSpec | None = None) -> GrassmannElement:
    """Iterated integral: odd variables first, then the body box.

    Polynomial coefficients integrate by exact antiderivatives; oracle
    coefficients by tensor Gauss-Legendre quadrature.
    """
    if dom.m != u.m:
        raise DimensionError("domain dimension does not match the integrand")
    top = berezin_coefficient(u)
    if top.is_polynomial:
        return integrate_box(top, dom)
    spec = quad if quad is not None else QuadratureSpec()
    box = [(float(lo), float(hi)) for lo, hi in dom.box]
    value = integrate_box_quad(lambda q: top.body_value(q), box, spec)
    return GrassmannElement.scalar(float(value), u.level)


def fubini_check(u: SupersmoothFn, dom: SuperDomain) -> GrassmannElement:
    """Difference between the two integration orders; exactly 0 for
    polynomial coefficients."""
    order_a = naive_integral(u, dom)
    consts = {}
    for amask in u.odd_support():
        consts[amask] = integrate_box(u.odd_coeff(amask), dom)
    v = SupersmoothFn.from_odd_coeffs(0, u.n, u.level, consts)
    order_b = berezin_full(v)
    return order_a - order_b


__all__ = [
    "OddPolynomial",
    "berezin_coefficient",
    "berezin_full",
    "berezin_partial",
    "fubini_check",
    "integration_by_parts_check",
    "naive_integral",
    "odd_cov",
    "odd_delta",
    "odd_linear_change",
    "odd_polynomial",
    "translate_odd",
]
