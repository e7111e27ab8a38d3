"""Contour integration of supersmooth functions over even variables.

A path is a piecewise-C1 curve of even Grassmann values over a real
parameter interval; its integral weights the integrand by the parameter
derivative, exactly as in complex contour integration. Exact mode keeps
paths and integrands polynomial and integrates antiderivatives in the
parameter; quadrature mode works through sampled callbacks.

Orientation: the integral of an exact derivative along a path running
a -> b is the continuation of the antiderivative at the endpoint b
minus its value at a.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .algebra import GrassmannElement, Parity, Scalar
from .errors import DimensionError, DomainError, ExactModeError, ParityError
from .quadrature import QuadratureSpec, integrate_box_quad, integrate_interval
from .supermatrix import even_det
from .supersmooth import (
    SuperDomain,
    SuperMap,
    SupersmoothFn,
    compose,
    integrate_box,
)


@dataclass(frozen=True)
class PathSegment:
    """One C1 piece of a path over [a, b].

    ``fn`` is a polynomial-in-t function with Grassmann coefficients
    (exact mode); alternatively ``value``/``deriv`` callbacks supply
    sampled evaluation. Values must be even elements.
    """

    a: Scalar
    b: Scalar
    fn: SupersmoothFn | None = None
    value: Callable[[float], GrassmannElement] | None = None
    deriv: Callable[[float], GrassmannElement] | None = None

    def __post_init__(self):
        if not self.a < self.b:
            raise DimensionError(f"segment needs a < b, got [{self.a}, {self.b}]")
        if self.fn is not None:
            if (self.fn.m, self.fn.n) != (1, 0):
                raise DimensionError("segment function must have one even variable")
            if self.fn.parity() is not Parity.EVEN:
                raise ParityError("path values must be even")
        elif self.value is None or self.deriv is None:
            raise DimensionError("segment needs a polynomial or value+derivative callbacks")

    @property
    def is_exact(self) -> bool:
        return self.fn is not None

    def at(self, t) -> GrassmannElement:
        if self.fn is not None:
            return self.fn.eval([t])
        return self.value(t)

    def speed(self, t) -> GrassmannElement:
        if self.fn is not None:
            return self.fn.d_even(1).eval([t])
        return self.deriv(t)


class Path:
    """A continuous piecewise-C1 curve of even Grassmann values."""

    def __init__(self, segments: Sequence[PathSegment]):
        segs = tuple(segments)
        if not segs:
            raise DimensionError("a path needs at least one segment")
        for s1, s2 in zip(segs, segs[1:]):
            if s1.b != s2.a:
                raise DimensionError("segment parameter intervals must be contiguous")
            if s1.at(s1.b) != s2.at(s2.a):
                raise DimensionError("path segments must join continuously")
        self.segments = segs

    @classmethod
    def from_polynomial(cls, a, b, fn: SupersmoothFn) -> "Path":
        return cls([PathSegment(a, b, fn=fn)])

    @classmethod
    def from_callable(cls, a, b, value, deriv) -> "Path":
        return cls([PathSegment(a, b, value=value, deriv=deriv)])

    @classmethod
    def straight(cls, lam: GrassmannElement, mu: GrassmannElement, a=None, b=None) -> "Path":
        """Line segment from lam to mu, parametrized by the bodies by
        default (so the body marches with the parameter)."""
        level = lam.level
        if a is None:
            a, b = lam.body, mu.body
            a = Fraction(a) if not isinstance(a, float) else a
            b = Fraction(b) if not isinstance(b, float) else b
        if not a < b:
            raise DimensionError("parametrize with a < b (reverse via path_inverse)")
        t = SupersmoothFn.coordinate(1, 1, 0, level)
        width = b - a
        fn = (SupersmoothFn.constant(lam, 1, 0, level)
              + (t - a) * (1 / width if isinstance(width, float) else Fraction(1, 1) / width)
              * SupersmoothFn.constant(mu - lam, 1, 0, level))
        return cls.from_polynomial(a, b, fn)

    @property
    def a(self):
        return self.segments[0].a

    @property
    def b(self):
        return self.segments[-1].b

    @property
    def start(self) -> GrassmannElement:
        return self.segments[0].at(self.segments[0].a)

    @property
    def end(self) -> GrassmannElement:
        return self.segments[-1].at(self.segments[-1].b)

    @property
    def is_exact(self) -> bool:
        return all(s.is_exact for s in self.segments)

    def at(self, t) -> GrassmannElement:
        for seg in self.segments:
            if t <= seg.b or seg is self.segments[-1]:
                return seg.at(t)
        raise DimensionError("parameter outside the path interval")


def _shift_segment(seg: PathSegment, offset) -> PathSegment:
    if offset == 0:
        return seg
    if seg.is_exact:
        lvl = seg.fn.level
        t = SupersmoothFn.coordinate(1, 1, 0, lvl)
        moved = compose(seg.fn, SuperMap(even=(t - offset,), odd=()))
        return PathSegment(seg.a + offset, seg.b + offset, fn=moved)
    value, deriv = seg.value, seg.deriv
    return PathSegment(
        seg.a + offset, seg.b + offset,
        value=lambda t, _v=value, _o=offset: _v(t - _o),
        deriv=lambda t, _d=deriv, _o=offset: _d(t - _o),
    )


def path_sum(g1: Path, g2: Path) -> Path:
    """Concatenation; requires the endpoint values to match exactly."""
    if g1.end != g2.start:
        raise DimensionError("paths do not join: end of the first differs from start of the second")
    offset = g1.b - g2.a
    return Path(list(g1.segments) + [_shift_segment(s, offset) for s in g2.segments])


def path_inverse(g: Path) -> Path:
    """The reversed path t -> g(a + b - t); integrals change sign."""
    total_a, total_b = g.a, g.b
    pivot = total_a + total_b
    out = []
    for seg in reversed(g.segments):
        na, nb = pivot - seg.b, pivot - seg.a
        if seg.is_exact:
            lvl = seg.fn.level
            t = SupersmoothFn.coordinate(1, 1, 0, lvl)
            fn = compose(seg.fn, SuperMap(even=(-t + pivot,), odd=()))
            out.append(PathSegment(na, nb, fn=fn))
        else:
            value, deriv = seg.value, seg.deriv
            out.append(PathSegment(
                na, nb,
                value=lambda t, _v=value, _p=pivot: _v(_p - t),
                deriv=lambda t, _d=deriv, _p=pivot: -_d(_p - t),
            ))
    return Path(out)


def path_reparametrize(g: Path, phi: SupersmoothFn | tuple, c, d) -> Path:
    """The path g o phi over [c, d] for a monotone C1 surjection phi.

    ``phi`` is a polynomial in one variable (exact mode) or a pair of
    callbacks (value, derivative). Monotonicity is certified on a
    sample grid; the endpoints must map exactly onto [a, b].
    """
    if not c < d:
        raise DimensionError("reparametrization interval is empty")
    if isinstance(phi, SupersmoothFn):
        if (phi.m, phi.n) != (1, 0):
            raise DimensionError("reparametrization must be a one-variable function")
        if phi.body_value((c,)) != g.a or phi.body_value((d,)) != g.b:
            raise DimensionError("reparametrization endpoints do not match the path interval")
        dphi = phi.d_even(1)
        # derivative positive on an interior grid (zeros at the boundary
        # itself do not break the parameter change)
        for i in range(1, 32):
            s = c + (d - c) * Fraction(i, 32)
            if dphi.body_value((s,)) <= 0:
                raise DimensionError("reparametrization is not monotone increasing onto [a, b]")
        if len(g.segments) == 1 and g.segments[0].is_exact:
            fn = compose(g.segments[0].fn, SuperMap(even=(phi,), odd=()))
            return Path([PathSegment(c, d, fn=fn)])
        value = lambda s: g.at(phi.body_value((s,)))
        deriv = lambda s: _path_speed(g, phi.body_value((s,))) * dphi.body_value((s,))
        return Path([PathSegment(c, d, value=value, deriv=deriv)])
    fn, dfn = phi
    if fn(c) != g.a or fn(d) != g.b:
        raise DimensionError("reparametrization endpoints do not match the path interval")
    for i in range(1, 32):
        s = c + (d - c) * i / 32
        if dfn(s) <= 0:
            raise DimensionError("reparametrization is not monotone increasing")
    return Path([PathSegment(
        c, d,
        value=lambda s: g.at(fn(s)),
        deriv=lambda s: _path_speed(g, fn(s)) * dfn(s),
    )])


def _path_speed(g: Path, t) -> GrassmannElement:
    for seg in g.segments:
        if t <= seg.b or seg is g.segments[-1]:
            return seg.speed(t)
    raise DimensionError("parameter outside the path interval")


def path_integral(g: Path, u: SupersmoothFn, quad: QuadratureSpec | None = None,
                  domain: SuperDomain | None = None) -> GrassmannElement:
    """Integral of u along the path: the parameter integral of
    speed(t) . u(g(t)).

    Exact mode (default) needs polynomial path pieces and integrand and
    returns exact scalars; pass a QuadratureSpec for sampled data.
    """
    if (u.m, u.n) != (1, 0):
        raise DimensionError("contour integration expects a one-even-variable integrand")
    total = None
    for seg in g.segments:
        if quad is None:
            if not (seg.is_exact and u.is_polynomial):
                raise ExactModeError("exact mode needs polynomial path and integrand; "
                                     "pass a QuadratureSpec for sampled data")
            if domain is not None:
                for i in range(17):
                    t = seg.a + (seg.b - seg.a) * Fraction(i, 16)
                    if not domain.contains_body([seg.fn.body_value((t,))]):
                        raise DomainError("path body leaves the declared domain")
            integrand = seg.fn.d_even(1) * compose(u, SuperMap(even=(seg.fn,), odd=()))
            anti = integrand.antiderivative_even(1)
            piece = (anti.substitute_even(1, seg.b) - anti.substitute_even(1, seg.a)).constant_value()
        else:
            def f(t, _seg=seg):
                x = _seg.at(t)
                if domain is not None and not domain.contains_body([x.body]):
                    raise DomainError("path body leaves the declared domain")
                return _seg.speed(t) * u.eval([x])

            piece = integrate_interval(f, float(seg.a), float(seg.b), quad)
        total = piece if total is None else total + piece
    return total


def fundamental_theorem_check(g: Path, big_u: SupersmoothFn,
                              u: SupersmoothFn | None = None,
                              quad: QuadratureSpec | None = None) -> GrassmannElement:
    """Residual of the fundamental theorem along the path.

    ``big_u`` is the antiderivative; if ``u`` is supplied it is checked
    symbolically against big_u'. The residual compares the contour
    integral with the continuation of big_u at the endpoints.
    """
    du = big_u.d_even(1)
    if u is None:
        u = du
    elif u.is_polynomial and big_u.is_polynomial and du != u:
        raise ExactModeError("supplied function is not the derivative of the antiderivative")
    lhs = path_integral(g, u, quad)
    rhs = big_u.eval([g.end]) - big_u.eval([g.start])
    return lhs - rhs


@dataclass(frozen=True)
class MPath:
    """A piecewise-C1 image of a box in several even variables."""

    box: tuple[tuple[Scalar, Scalar], ...]
    comps: tuple[SupersmoothFn, ...] | None = None
    value: Callable[[tuple], Sequence[GrassmannElement]] | None = None
    jac: Callable[[tuple], Sequence[Sequence[GrassmannElement]]] | None = None

    def __post_init__(self):
        object.__setattr__(self, "box", tuple((lo, hi) for lo, hi in self.box))
        m = len(self.box)
        if self.comps is not None:
            comps = tuple(self.comps)
            object.__setattr__(self, "comps", comps)
            if len(comps) != m:
                raise DimensionError("component count must match the box dimension")
            for f in comps:
                if (f.m, f.n) != (m, 0):
                    raise DimensionError("components must be functions of the box parameters")
                if f.parity() is not Parity.EVEN:
                    raise ParityError("m-path values must be even")
        elif self.value is None or self.jac is None:
            raise DimensionError("m-path needs components or value+jacobian callbacks")

    @property
    def m(self) -> int:
        return len(self.box)

    @property
    def is_exact(self) -> bool:
        return self.comps is not None


def mpath_integral(g: MPath, u: SupersmoothFn, quad: QuadratureSpec | None = None) -> GrassmannElement:
    """Integral over an m-path: the parameter-box integral of
    det(J(g)(t)) . u(g(t))."""
    if (u.m, u.n) != (g.m, 0):
        raise DimensionError("integrand dimensions do not match the m-path")
    if quad is None:
        if not (g.is_exact and u.is_polynomial):
            raise ExactModeError("exact mode needs polynomial data; pass a QuadratureSpec")
        jac = tuple(tuple(g.comps[i].d_even(j + 1) for i in range(g.m)) for j in range(g.m))
        det = even_det(jac)
        pulled = compose(u, SuperMap(even=g.comps, odd=()))
        return integrate_box(det * pulled, g.box)

    if g.is_exact:
        partials = [[g.comps[i].d_even(j + 1) for i in range(g.m)] for j in range(g.m)]

    def f(t: tuple) -> GrassmannElement:
        if g.is_exact:
            xs = [c.eval(list(t)) for c in g.comps]
            rows = [[entry.eval(list(t)) for entry in row] for row in partials]
        else:
            xs = list(g.value(t))
            rows = [list(r) for r in g.jac(t)]
        det = even_det(rows)
        return det * u.eval(xs)

    box = [(float(lo), float(hi)) for lo, hi in g.box]
    return integrate_box_quad(f, box, quad)


@dataclass(frozen=True)
class Form1:
    """A 1-form dx rho(x) with supersmooth coefficient."""

    rho: SupersmoothFn

    def __post_init__(self):
        if (self.rho.m, self.rho.n) != (1, 0):
            raise DimensionError("1-form coefficient must be a one-even-variable function")


def pullback_form1(phi: SuperMap, v: Form1) -> Form1:
    """Pull-back along a change of variable x = phi(y): the coefficient
    picks up the derivative of phi on the left."""
    if phi.source_dims != (1, 0) or phi.target_dims != (1, 0):
        raise DimensionError("pull-back of a 1-form needs a 1|0 -> 1|0 map")
    dphi = phi.even[0].d_even(1)
    return Form1(dphi * compose(v.rho, phi))


def form_path_integral(g: Path, v: Form1, u: SupersmoothFn,
                       quad: QuadratureSpec | None = None) -> GrassmannElement:
    """Integral of the 1-form against u along the path."""
    return path_integral(g, v.rho * u, quad)


__all__ = [
    "Form1",
    "MPath",
    "Path",
    "PathSegment",
    "QuadratureSpec",
    "form_path_integral",
    "fundamental_theorem_check",
    "mpath_integral",
    "path_integral",
    "path_inverse",
    "path_reparametrize",
    "path_sum",
    "pullback_form1",
]
