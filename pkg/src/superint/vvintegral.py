"""Integration over foliated singular manifolds and its change of variables.

A foliated singular manifold is the image of a parameter box times all
odd directions under a supersmooth map gamma whose super-Jacobian has
nonvanishing body on the box. Its integral weights the pulled-back
integrand by sdet J(gamma), integrates out the odd parameters, and then
the box - the contour-style construction under which the
change-of-variables formula holds with no support hypothesis, unlike
the direct definition (see ``naive_cvf_discrepancy`` for the diagnostic
that exhibits the difference).

The odd parameters are dedicated generators disjoint from those used in
the coefficients, so the odd integral is literal coefficient extraction.
Exact mode keeps everything polynomial; it raises ExactModeError when a
needed pointwise inverse has a nonconstant scalar part, in which case
quadrature mode evaluates node by node instead.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Callable, Sequence

from .algebra import GrassmannElement
from .berezin import berezin_coefficient, berezin_full, naive_integral
from .errors import (
    BodySingularError,
    DimensionError,
    ExactModeError,
    LevelBudgetError,
    ParityError,
)
from .quadrature import QuadratureSpec, integrate_box_quad
from .supermatrix import EvenSuperMatrix, even_det, even_matrix_inverse, mat_mul, sdet
from .supersmooth import (
    SuperDomain,
    SuperMap,
    SupersmoothFn,
    compose,
    compose_map,
    integrate_box,
    is_superdiffeo,
    jacobian,
)


@dataclass(frozen=True)
class ParameterSet:
    """A bounded parameter box together with its odd directions."""

    box: tuple[tuple[Fraction, Fraction], ...]
    n: int

    @classmethod
    def from_box(cls, box: Sequence, n: int) -> "ParameterSet":
        dom = SuperDomain.from_box(box, n)
        return cls(dom.box, n)

    @property
    def m(self) -> int:
        return len(self.box)

    @property
    def domain(self) -> SuperDomain:
        return SuperDomain(self.box, self.n)


@dataclass(frozen=True)
class FoliatedManifold:
    """A parameter set plus the supersmooth map whose image it measures."""

    params: ParameterSet
    gamma: SuperMap

    def __post_init__(self):
        sm, sn = self.gamma.source_dims
        if (sm, sn) != (self.params.m, self.params.n):
            raise DimensionError("map source dimensions must match the parameter set")
        if self.gamma.target_dims != (sm, sn):
            raise DimensionError("foliation maps keep the even|odd dimensions")

    @property
    def level(self) -> int:
        return self.gamma.level

    @classmethod
    def trivial(cls, box: Sequence, n: int, level: int) -> "FoliatedManifold":
        params = ParameterSet.from_box(box, n)
        return cls(params, SuperMap.identity(params.m, n, level))


@dataclass(frozen=True)
class LazyDensity:
    """A density known only pointwise; usable in quadrature mode only."""

    fn: Callable[[Sequence, Sequence], GrassmannElement]
    m: int
    n: int
    level: int

    is_polynomial = False

    def eval(self, xs, thetas, domain=None) -> GrassmannElement:
        return self.fn(xs, thetas)


@dataclass(frozen=True)
class SuperForm:
    """The volume density dx dtheta rho(x, theta)."""

    density: SupersmoothFn | LazyDensity


def _sample_points(box, samples: int, seed: int):
    rng = random.Random(seed)
    points = []
    grid = min(max(samples // 2, 1), 9) | 1  # odd count puts the midpoint on the grid
    for i in range(1, grid + 1):
        frac = Fraction(i, grid + 1)
        points.append(tuple(lo + (hi - lo) * frac for lo, hi in box))
    while len(points) < max(samples, 1):
        points.append(tuple(lo + (hi - lo) * Fraction(rng.randint(1, 999), 1000)
                            for lo, hi in box))
    return points


def _check_path_condition(mani: FoliatedManifold, samples: int, seed: int) -> None:
    """Body of sdet J(gamma) must not vanish on the sampled box."""
    jac = jacobian(mani.gamma)
    for q in _sample_points(mani.params.box, samples, seed):
        for block in (jac.a, jac.b):
            if not block:
                continue
            rows = [[entry.body_value(q) for entry in row] for row in block]
            if _real_det(rows) == 0:
                raise BodySingularError(
                    f"body of sdet J(gamma) vanishes at sampled point {q}"
                )


def _real_det(rows):
    n = len(rows)
    acc = 0
    for perm in permutations(range(n)):
        term = 1
        for i, p in enumerate(perm):
            term = term * rows[i][p]
        acc = acc + (term if _perm_parity(perm) == 0 else -term)
    return acc


def _perm_parity(perm) -> int:
    inv = 0
    for i in range(len(perm)):
        for j in range(i + 1, len(perm)):
            if perm[i] > perm[j]:
                inv += 1
    return inv & 1


def _element_as_odd_polynomial(w: GrassmannElement, base_level: int, n: int) -> SupersmoothFn:
    """Reinterpret an element of the enlarged algebra as an odd
    polynomial in the reserved top generators."""
    terms = {((), ix.bits): c for ix, c in w.terms()}
    return SupersmoothFn(0, n, base_level, terms=terms)


def vv_integral(mani: FoliatedManifold, u, quad: QuadratureSpec | None = None,
                samples: int = 8, seed: int = 0) -> GrassmannElement:
    """Integral of u over the foliated singular manifold.

    Forms sdet J(gamma) . u(gamma(q, theta)) as an odd polynomial in
    the reserved parameters with box-dependent coefficients, extracts
    the top coefficient, and integrates it over the box; the two
    integration orders agree and the exact path asserts it.
    """
    m, n = mani.gamma.target_dims
    level = mani.level
    if isinstance(u, SupersmoothFn):
        if (u.m, u.n) != (m, n):
            raise DimensionError("integrand dimensions do not match the manifold")
        if u.level != level:
            raise DimensionError("integrand level differs from the manifold level")
    if level + n > 64:
        raise LevelBudgetError("level budget exceeded by the reserved odd parameters")
    _check_path_condition(mani, samples, seed)

    if quad is None:
        if not isinstance(u, SupersmoothFn):
            raise ExactModeError("pointwise densities need quadrature mode")
        pulled = compose(u, mani.gamma)
        weight = sdet(jacobian(mani.gamma))
        integrand = weight * pulled
        value = naive_integral(integrand, mani.params.domain)
        # order interchange: integrating the box first must agree
        consts = {a: integrate_box(integrand.odd_coeff(a), mani.params.domain)
                  for a in integrand.odd_support()}
        other_order = berezin_full(SupersmoothFn.from_odd_coeffs(0, n, level, consts))
        if value != other_order:
            raise AssertionError("integration orders disagree; algebra corrupt")
        return value

    pt_level = level + n
    theta_syms = [GrassmannElement.generator(level + k, pt_level) for k in range(1, n + 1)]
    jac = jacobian(mani.gamma)

    def node_value(q: tuple) -> GrassmannElement:
        xs_q = [Fraction(qi) if not isinstance(qi, float) else qi for qi in q]
        point_rows = jac.map_entries(lambda f: f.eval(xs_q, theta_syms))
        weight = sdet(point_rows)
        xs, ths = mani.gamma.eval(xs_q, theta_syms)
        val = u.eval(list(xs), list(ths))
        top = berezin_full(_element_as_odd_polynomial(weight * val, level, n))
        return top

    box = [(float(lo), float(hi)) for lo, hi in mani.params.box]
    return integrate_box_quad(node_value, box, quad)


def pullback_superform(phi: SuperMap, form: SuperForm,
                       dom: SuperDomain | None = None, samples: int = 16) -> SuperForm:
    """Pull a volume density back along a superdiffeomorphism:
    the density picks up sdet J(phi) as a factor."""
    if phi.source_dims != phi.target_dims:
        raise DimensionError("pull-back needs a square map")
    if dom is not None:
        ok, witness = is_superdiffeo(phi, dom, samples)
        if not ok:
            raise BodySingularError(f"superdiffeomorphism certificate failed: {witness}")
    weight = _sdet_symbolic_or_none(phi)
    rho = form.density
    if weight is not None and isinstance(rho, SupersmoothFn) and rho.is_polynomial:
        return SuperForm(weight * compose(rho, phi))

    def lazy(ys, ws):
        w = _sdet_at_point(phi, weight, ys, ws)
        xs, ths = phi.eval(ys, ws)
        return w * rho.eval(list(xs), list(ths))

    sm, sn = phi.source_dims
    return SuperForm(LazyDensity(lazy, sm, sn, phi.level))


def _sdet_symbolic_or_none(phi: SuperMap) -> SupersmoothFn | None:
    """Symbolic sdet of the Jacobian, or None when the exact pipeline
    cannot invert a nonconstant scalar part (quadrature handles it
    pointwise instead)."""
    try:
        return sdet(jacobian(phi))
    except ExactModeError:
        return None


def _sdet_at_point(phi: SuperMap, weight: SupersmoothFn | None, ys, ws) -> GrassmannElement:
    if weight is not None:
        return weight.eval(ys, ws)
    point = jacobian(phi).map_entries(lambda f: f.eval(ys, ws))
    return sdet(point)


def verify_inverse_pair(phi: SuperMap, phi_inv: SuperMap,
                        dom: SuperDomain | None = None, samples: int = 4,
                        seed: int = 0) -> None:
    """Check phi o phi_inv = id, symbolically for polynomial maps and on
    sampled points otherwise."""
    sm, sn = phi.source_dims
    if phi_inv.source_dims != phi.target_dims or phi_inv.target_dims != phi.source_dims:
        raise DimensionError("inverse map dimensions do not line up")
    polynomial = all(c.is_polynomial for c in phi.even + phi.odd + phi_inv.even + phi_inv.odd)
    if polynomial:
        composed = compose_map(phi, phi_inv)
        ident = SuperMap.identity(sm, sn, phi.level)
        for got, want in zip(composed.even + composed.odd, ident.even + ident.odd):
            if got != want:
                raise ExactModeError("supplied inverse fails phi o phi_inv = id")
        return
    if dom is None:
        raise ExactModeError("sampled inverse verification needs a domain")
    pt_level = phi.level + sn
    ths = [GrassmannElement.generator(phi.level + k, pt_level) for k in range(1, sn + 1)]
    for q in _sample_points(dom.box, samples, seed):
        ys, ws = phi_inv.eval(list(q), ths)
        xs, ts = phi.eval(list(ys), list(ws))
        for got, want in zip(xs, [GrassmannElement.scalar(qi, pt_level) for qi in q]):
            if got != want:
                raise ExactModeError(f"inverse verification failed at sample {q}")
        for got, want in zip(ts, ths):
            if got != want:
                raise ExactModeError(f"inverse verification failed at sample {q}")


def cvf_residual(phi: SuperMap, phi_inv: SuperMap, mani: FoliatedManifold, u,
                 quad: QuadratureSpec | None = None, samples: int = 8,
                 seed: int = 0) -> GrassmannElement:
    """Residual of the change-of-variables formula through the manifold
    integral; the contract is exact zero in exact mode.

    The caller supplies the inverse map, which is verified before use;
    the comparison manifold is the same box with pulled-back foliation
    phi^-1 o gamma, and the integrand on it carries sdet J(phi).
    """
    verify_inverse_pair(phi, phi_inv, mani.params.domain, samples, seed)
    side_m = vv_integral(mani, u, quad, samples, seed)

    delta = compose_map(phi_inv, mani.gamma)
    pulled_manifold = FoliatedManifold(mani.params, delta)
    weight = _sdet_symbolic_or_none(phi)
    if weight is not None and isinstance(u, SupersmoothFn) and u.is_polynomial:
        integrand = weight * compose(u, phi)
    else:
        sm, sn = phi.source_dims

        def lazy(ys, ws):
            w = _sdet_at_point(phi, weight, ys, ws)
            xs, ths = phi.eval(ys, ws)
            return w * u.eval(list(xs), list(ths))

        integrand = LazyDensity(lazy, sm, sn, phi.level)
    side_n = vv_integral(pulled_manifold, integrand, quad, samples, seed)
    return side_m - side_n


def naive_cvf_discrepancy(phi: SuperMap, dom: SuperDomain, u: SupersmoothFn) -> GrassmannElement:
    """Difference of direct integrals under the bilinear-shear family
    x = y + omega_1 omega_2 p(y), theta = omega (one even variable).

    Returns transformed-minus-original, asserted equal to the exactly
    computed boundary term (p u_00 at one endpoint minus the other);
    the change-of-variables formula fails by exactly this amount unless
    the integrand vanishes at the boundary.
    """
    if phi.source_dims != (1, 2) or phi.target_dims != (1, 2):
        raise DimensionError("the diagnostic family is 1|2")
    level = phi.level
    for k, comp in enumerate(phi.odd, start=1):
        if comp != SupersmoothFn.odd_coordinate(k, 1, 2, level):
            raise DimensionError("diagnostic family keeps the odd coordinates fixed")
    x0 = phi.even[0]
    p = x0.odd_coeff((1, 1))
    rebuilt = SupersmoothFn.coordinate(1, 1, 2, level) + SupersmoothFn.from_odd_coeffs(
        1, 2, level, {(1, 1): p}
    )
    if x0 != rebuilt:
        raise DimensionError("even component is not of the bilinear-shear form")

    weight = sdet(jacobian(phi))
    transformed = naive_integral(weight * compose(u, phi), dom)
    original = naive_integral(u, dom)
    discrepancy = transformed - original

    boundary_fn = p * u.odd_coeff(0)
    lo, hi = dom.box[0]
    boundary = boundary_fn.eval([hi]) - boundary_fn.eval([lo])
    if discrepancy != boundary:
        raise AssertionError("discrepancy does not equal the boundary term; algebra corrupt")
    return discrepancy


def reparam_invariance_check(mani: FoliatedManifold, phi0: Sequence[SupersmoothFn],
                             phi1: Sequence[SupersmoothFn], new_box: Sequence, u,
                             quad: QuadratureSpec | None = None, samples: int = 8,
                             seed: int = 0) -> GrassmannElement:
    """Residual between the integral over (box, gamma) and over the
    reparametrized (new_box, gamma o phi); the contract is zero.

    phi0 lists the even components of the parameter change (functions of
    the new parameters, positive body Jacobian determinant), phi1 the
    odd components (body-invertible odd derivative).
    """
    m, n = mani.params.m, mani.params.n
    phi = SuperMap(even=tuple(phi0), odd=tuple(phi1))
    if phi.source_dims != (m, n) or phi.target_dims != (m, n):
        raise DimensionError("reparametrization dimensions do not match")
    for f in phi0:
        if f.is_polynomial and any(mask for (_, mask) in f._terms):
            raise ParityError("body reparametrization must be a real map of the box")
    new_params = ParameterSet.from_box(new_box, n)

    jac = jacobian(phi)
    for q in _sample_points(new_params.box, samples, seed):
        det0 = _real_det([[entry.body_value(q) for entry in row] for row in jac.a]) if m else 1
        if not det0 > 0:
            raise ParityError(f"orientation violated: body Jacobian determinant {det0} at {q}")
        det1 = _real_det([[entry.body_value(q) for entry in row] for row in jac.b]) if n else 1
        if det1 == 0:
            raise BodySingularError(f"odd reparametrization body-singular at {q}")

    moved = FoliatedManifold(new_params, compose_map(mani.gamma, phi))
    side_a = vv_integral(mani, u, quad, samples, seed)
    side_b = vv_integral(moved, u, quad, samples, seed)
    return side_a - side_b


def linear_cvf_check(matrix: EvenSuperMatrix, u: SupersmoothFn, dom: SuperDomain,
                     collect_steps: bool = False):
    """Residual of the linear change-of-variables chain.

    Factors the substitution (x, theta) = (y, omega) M into the four
    elementary steps (odd scale, odd shear, even scale by the nilpotent
    Schur factor, even shear), evaluates each step's direct-integral
    identity against its displayed superdeterminant factor, and returns
    the residual of the assembled formula: the transformed integral
    minus sdet(M)^-1 times the integral over the image box. The body of
    the A block must be diagonal with positive entries so that the image
    of a box is a box.

    On a bounded box the even-variable steps shift the body by nilpotent
    amounts, so their identities hold exactly only when the integrand's
    coefficients are flat enough at the box boundary (or when the even
    data is real and the off-diagonal blocks vanish); otherwise the
    step residuals expose the boundary terms.
    """
    m, n = matrix.dims
    if (u.m, u.n) != (m, n):
        raise DimensionError("integrand dimensions do not match the matrix")
    level = u.level
    body_a = [[entry.body for entry in row] for row in matrix.a]
    for i in range(m):
        for j in range(m):
            if i == j and not body_a[i][j] > 0:
                raise ExactModeError("A block needs positive diagonal body entries")
            if i != j and body_a[i][j] != 0:
                raise ExactModeError("A block body must be diagonal so boxes map to boxes")

    a_inv = even_matrix_inverse(matrix.a)
    b_inv = even_matrix_inverse(matrix.b)
    shear = mat_mul(mat_mul(a_inv, matrix.c), mat_mul(b_inv, matrix.d))  # A^-1 C B^-1 D
    one = GrassmannElement.scalar(1, level)
    zero = GrassmannElement.zero(level)
    eye_m = tuple(tuple(one if i == j else zero for j in range(m)) for i in range(m))
    eye_n = tuple(tuple(one if i == j else zero for j in range(n)) for i in range(n))
    zeros_mn = tuple(tuple(zero for _ in range(n)) for _ in range(m))
    scaled = tuple(tuple(eye_m[i][j] - shear[i][j] for j in range(m)) for i in range(m))
    binv_d = mat_mul(b_inv, matrix.d)
    ainv_c = mat_mul(a_inv, matrix.c)

    steps = [
        # (map matrix, sdet factor of this step)
        (matrix, None),
        (EvenSuperMatrix(eye_m, ainv_c, binv_d, eye_n),
         even_det(matrix.a).inverse_even() * even_det(matrix.b)),
        (EvenSuperMatrix(scaled, zeros_mn, binv_d, eye_n), one),
        (EvenSuperMatrix(eye_m, zeros_mn, binv_d, eye_n),
         even_det(scaled).inverse_even()),
        (None, one),
    ]

    image_box = tuple(
        (lo * body_a[j][j], hi * body_a[j][j]) for j, (lo, hi) in enumerate(dom.box)
    )
    boxes = [dom.box] + [image_box] * 4

    values = []
    for (step, _), box in zip(steps, boxes):
        integrand = u if step is None else compose(u, SuperMap.linear(step, level))
        values.append(naive_integral(integrand, SuperDomain.from_box(box, n)))

    step_residuals = []
    for i in range(4):
        factor = steps[i + 1][1]
        step_residuals.append(values[i] - factor * values[i + 1])

    total = values[0] - sdet(matrix).inverse_even() * values[4]
    if collect_steps:
        return total, step_residuals
    return total


def total_derivative_decomposition(h_map: SuperMap, u: SupersmoothFn) -> dict:
    """Decompose the sub-top part of the triangular-change integrand as
    a divergence.

    For H(y, omega) = (h(y, omega), omega) with two odd variables, the
    top-coefficient of sdet J(H) . u(H) splits into the classical term
    (transported top coefficient times the body Jacobian determinant)
    plus a remainder that equals sum_j d/dy_j g_j; the witnesses g_j
    are built from the cofactor expansion and the identity is verified
    symbolically.
    """
    m, n = h_map.source_dims
    if h_map.target_dims != (m, n):
        raise DimensionError("triangular maps are square")
    if n != 2:
        raise DimensionError("witness construction implemented for two odd variables")
    level = h_map.level
    for k, comp in enumerate(h_map.odd, start=1):
        if comp != SupersmoothFn.odd_coordinate(k, m, n, level):
            raise DimensionError("map must fix the odd coordinates")
    if (u.m, u.n) != (m, n):
        raise DimensionError("integrand dimensions do not match the map")

    big = sdet(jacobian(h_map)) * compose(u, h_map)
    full = berezin_coefficient(big)

    h0 = [comp.odd_coeff(0) for comp in h_map.even]
    h0_map = SuperMap(even=tuple(h0), odd=())
    det_h0 = even_det(tuple(tuple(h0[j].d_even(i + 1) for j in range(m)) for i in range(m)))
    u_top = u.odd_coeff((1, 1))
    top = det_h0 * compose(u_top, h0_map)
    remainder = full - top

    u0_moved = compose(u.odd_coeff((0, 0)), h0_map)
    h_bilinear = [comp.odd_coeff((1, 1)) for comp in h_map.even]
    witnesses = []
    for j in range(m):
        acc = SupersmoothFn.zero(m, 0, level)
        for perm in permutations(range(m)):
            term = h_bilinear[perm[j]]
            for i in range(m):
                if i == j:
                    continue
                term = term * h0[perm[i]].d_even(i + 1)
            if _perm_parity(perm):
                term = -term
            acc = acc + term
        witnesses.append(u0_moved * acc)

    divergence = SupersmoothFn.zero(m, 0, level)
    for j, g in enumerate(witnesses, start=1):
        divergence = divergence + g.d_even(j)
    verified = remainder == divergence
    return {
        "top_term": top,
        "remainder": remainder,
        "witnesses": witnesses,
        "divergence": divergence,
        "verified": verified,
    }


__all__ = [
    "FoliatedManifold",
    "LazyDensity",
    "ParameterSet",
    "SuperForm",
    "cvf_residual",
    "linear_cvf_check",
    "naive_cvf_discrepancy",
    "pullback_superform",
    "reparam_invariance_check",
    "total_derivative_decomposition",
    "verify_inverse_pair",
    "vv_integral",
]
