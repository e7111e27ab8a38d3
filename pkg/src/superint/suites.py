"""Seeded verification suites behind the command-line ``verify`` verb.

Each law gets its own deterministic stream (seeded from the run seed and
the law name), runs a batch of randomized cases, and reports the worst
residual. Exact laws demand a residual of exactly zero; quadrature laws
compare against the spec tolerance.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations

from .algebra import GrassmannElement, Parity
from .berezin import (
    berezin_full,
    berezin_partial,
    fubini_check,
    integration_by_parts_check,
    naive_integral,
    odd_cov,
    odd_delta,
    odd_linear_change,
    translate_odd,
)
from .casegen import (
    rand_bilinear_shear_map,
    rand_box_preserving_supermatrix,
    rand_element,
    rand_even_matrix,
    rand_flat_supersmooth,
    rand_fraction,
    rand_nilpotent_even,
    rand_odd,
    rand_odd_polynomial,
    rand_real_poly,
    rand_supermatrix,
    rand_supersmooth,
)
from .contour import Path, QuadratureSpec, fundamental_theorem_check, path_integral
from .supermatrix import sdet, sm_inverse, sm_mul
from .supersmooth import SmoothOracle, SuperDomain, SuperMap, SupersmoothFn, compose, compose_map, jacobian
from .vvintegral import (
    FoliatedManifold,
    SuperForm,
    cvf_residual,
    linear_cvf_check,
    naive_cvf_discrepancy,
    pullback_superform,
    reparam_invariance_check,
    total_derivative_decomposition,
    vv_integral,
)

LEVEL = 6
QUAD_TOL = 1e-10


@dataclass
class CheckResult:
    law: str
    cases: int
    max_residual: str
    passed: bool

    def as_json(self) -> dict:
        return {
            "law": self.law,
            "cases": self.cases,
            "max_residual": self.max_residual,
            "pass": self.passed,
        }


class _Law:
    """Accumulates residuals for one named law."""

    def __init__(self, name: str, tol: float | None = None):
        self.name = name
        self.tol = tol  # None: exact law, residual must be identically 0
        self.cases = 0
        self.worst: float | Fraction = 0

    def add(self, residual) -> None:
        self.cases += 1
        if isinstance(residual, GrassmannElement):
            mag = residual.max_abs_coeff()
        else:
            mag = abs(residual)
        if float(mag) > float(self.worst):
            self.worst = mag

    def add_bool(self, ok: bool) -> None:
        self.add(0 if ok else 1)

    def result(self) -> CheckResult:
        limit = self.tol if self.tol is not None else 0
        passed = float(self.worst) <= float(limit)
        worst = self.worst
        text = repr(float(worst)) if isinstance(worst, float) else str(worst)
        return CheckResult(self.name, self.cases, text, passed)


def _rng(seed: int, law: str) -> random.Random:
    return random.Random(f"{seed}:{law}")


def _split_cases(total: int, buckets: int) -> list[int]:
    base, extra = divmod(max(total, buckets), buckets)
    return [base + (1 if i < extra else 0) for i in range(buckets)]


# -- odd-integral axioms ------------------------------------------------------


def suite_berezin(seed: int, cases: int) -> list[CheckResult]:
    out = []

    law = _Law("odd-integral.normalization")
    for n in (1, 2, 3):
        v = SupersmoothFn.constant(1, 0, n, LEVEL)
        for k in range(1, n + 1):
            v = v * SupersmoothFn.odd_coordinate(k, 0, n, LEVEL)
        law.add(berezin_full(v) - GrassmannElement.scalar(1, LEVEL))
    out.append(law.result())

    law = _Law("odd-integral.vanishing-below-top")
    for n in (1, 2, 3):
        for size in range(n):
            for word in combinations(range(1, n + 1), size):
                v = SupersmoothFn.constant(1, 0, n, LEVEL)
                for k in word:
                    v = v * SupersmoothFn.odd_coordinate(k, 0, n, LEVEL)
                law.add(berezin_full(v))
    out.append(law.result())

    law = _Law("odd-integral.linearity-parity-sign")
    for n, share in zip((1, 2, 3), _split_cases(cases, 3)):
        rng = _rng(seed, f"{law.name}:{n}")
        for _ in range(share):
            v = rand_odd_polynomial(rng, n, LEVEL)
            w = rand_odd_polynomial(rng, n, LEVEL)
            lam = rand_element(rng, 3, Parity.ODD if rng.random() < 0.5 else Parity.EVEN).lift(LEVEL)
            mu = rand_element(rng, 3, Parity.ODD if rng.random() < 0.5 else Parity.EVEN).lift(LEVEL)
            sl = -1 if (n % 2 and lam.parity() is Parity.ODD) else 1
            sm = -1 if (n % 2 and mu.parity() is Parity.ODD) else 1
            combined = (SupersmoothFn.constant(lam, 0, n, LEVEL) * v
                        + SupersmoothFn.constant(mu, 0, n, LEVEL) * w)
            want = sl * (lam * berezin_full(v)) + sm * (mu * berezin_full(w))
            law.add(berezin_full(combined) - want)
    out.append(law.result())

    law = _Law("odd-integral.translation-invariance")
    for n, share in zip((1, 2, 3), _split_cases(cases, 3)):
        rng = _rng(seed, f"{law.name}:{n}")
        for _ in range(share):
            v = rand_odd_polynomial(rng, n, LEVEL)
            rho = [rand_odd(rng, 3).lift(LEVEL) for _ in range(n)]
            law.add(berezin_full(translate_odd(v, rho)) - berezin_full(v))
    out.append(law.result())

    law = _Law("odd-integral.integration-by-parts")
    for n, share in zip((1, 2, 3), _split_cases(cases, 3)):
        rng = _rng(seed, f"{law.name}:{n}")
        for _ in range(share):
            want = Parity.ODD if rng.random() < 0.5 else Parity.EVEN
            coeffs = {}
            for amask in range(1 << n):
                if (amask.bit_count() % 2 == 0) != (want is Parity.EVEN):
                    continue
                coeffs[amask] = rand_fraction(rng)
            if not all(coeffs.values()):
                coeffs = {k: v or 1 for k, v in coeffs.items()}
            v = SupersmoothFn.from_odd_coeffs(0, n, LEVEL, coeffs)
            w = rand_odd_polynomial(rng, n, LEVEL)
            law.add(integration_by_parts_check(v, w, rng.randint(1, n)))
    out.append(law.result())

    law = _Law("odd-integral.linear-change")
    for n, share in zip((1, 2, 3), _split_cases(cases, 3)):
        rng = _rng(seed, f"{law.name}:{n}")
        for _ in range(share):
            v = rand_odd_polynomial(rng, n, LEVEL)
            a = rand_even_matrix(rng, n, LEVEL)
            got = odd_linear_change(v, a)
            law.add(got - berezin_full(v))
    out.append(law.result())

    law = _Law("odd-integral.iteration")
    for n, share in zip((2, 3, 3), _split_cases(cases, 3)):
        rng = _rng(seed, f"{law.name}:{n}")
        for _ in range(share):
            v = rand_odd_polynomial(rng, n, LEVEL)
            k = rng.randint(1, n - 1)
            inner = berezin_partial(v, list(range(1, k + 1)))
            outer = berezin_partial(inner, list(range(k + 1, n + 1)))
            law.add(outer.odd_coeff(0).constant_value() - berezin_full(v))
    out.append(law.result())

    law = _Law("odd-integral.nonlinear-change")
    for n, share in zip((2, 3, 3), _split_cases(cases, 3)):
        rng = _rng(seed, f"{law.name}:{n}")
        for _ in range(share):
            v = rand_odd_polynomial(rng, n, LEVEL)
            comps = []
            for k in range(1, n + 1):
                comp = SupersmoothFn.odd_coordinate(k, 0, n, LEVEL)
                i, j = rng.sample(range(1, n + 1), 2)
                cubic = (SupersmoothFn.odd_coordinate(i, 0, n, LEVEL)
                         * SupersmoothFn.odd_coordinate(j, 0, n, LEVEL)
                         * SupersmoothFn.odd_coordinate(k, 0, n, LEVEL))
                comps.append(comp + cubic * rand_element(rng, 2, Parity.EVEN).lift(LEVEL))
            law.add(odd_cov(v, SuperMap(even=(), odd=tuple(comps))) - berezin_full(v))
    out.append(law.result())

    law = _Law("odd-integral.delta-reproduces")
    for n, share in zip((1, 2, 3), _split_cases(cases, 3)):
        rng = _rng(seed, f"{law.name}:{n}")
        for _ in range(share):
            v = rand_odd_polynomial(rng, n, LEVEL)
            omega = [rand_odd(rng, 3).lift(LEVEL) for _ in range(n)]
            delta = odd_delta(omega, n, LEVEL)
            shift = SuperMap(even=(), odd=tuple(
                SupersmoothFn.constant(w, 0, n, LEVEL) for w in omega))
            want = compose(v, shift).odd_coeff(0).constant_value()
            law.add(berezin_full(delta * v) - want)
    out.append(law.result())

    law = _Law("direct-integral.order-interchange")
    rng = _rng(seed, law.name)
    dom = SuperDomain.from_box([(0, 1)], 2)
    for _ in range(max(cases // 4, 5)):
        u = rand_supersmooth(rng, 1, 2, LEVEL)
        law.add(fubini_check(u, dom))
    out.append(law.result())

    return out


# -- superdeterminant ----------------------------------------------------------


def suite_sdet(seed: int, cases: int) -> list[CheckResult]:
    from .supermatrix import _sdet_via_a, _sdet_via_b

    out = []
    dims = [(1, 2), (2, 2)]

    law = _Law("sdet.block-formula-agreement")
    for (m, n), share in zip(dims, _split_cases(cases, 2)):
        rng = _rng(seed, f"{law.name}:{m}{n}")
        for _ in range(share):
            mat = rand_supermatrix(rng, m, n, LEVEL)
            law.add(_sdet_via_a(mat) - _sdet_via_b(mat))
    out.append(law.result())

    law = _Law("sdet.multiplicative")
    for (m, n), share in zip(dims, _split_cases(cases, 2)):
        rng = _rng(seed, f"{law.name}:{m}{n}")
        for _ in range(share):
            p = rand_supermatrix(rng, m, n, LEVEL)
            q = rand_supermatrix(rng, m, n, LEVEL)
            law.add(sdet(sm_mul(p, q)) - sdet(p) * sdet(q))
    out.append(law.result())

    law = _Law("sdet.inverse-compatible")
    rng = _rng(seed, law.name)
    for _ in range(max(cases // 2, 10)):
        mat = rand_supermatrix(rng, 2, 2, LEVEL)
        law.add(sdet(sm_inverse(mat)) - sdet(mat).inverse_even())
    out.append(law.result())

    law = _Law("sdet.linear-map-jacobian")
    rng = _rng(seed, law.name)
    for _ in range(max(cases // 2, 10)):
        mat = rand_supermatrix(rng, 1, 2, LEVEL)
        lin = SuperMap.linear(mat, LEVEL)
        point = jacobian(lin).map_entries(
            lambda f: f.eval([0], [GrassmannElement.zero(LEVEL)] * 2))
        law.add_bool(sdet(point) == sdet(mat))
    out.append(law.result())

    law = _Law("sdet.bilinear-shear-value")
    rng = _rng(seed, law.name)
    for _ in range(max(cases // 5, 5)):
        p = rand_real_poly(rng, 1, 0, LEVEL, deg=3)
        p2 = SupersmoothFn(1, 2, LEVEL, terms=dict(p._terms))
        t1 = SupersmoothFn.odd_coordinate(1, 1, 2, LEVEL)
        t2 = SupersmoothFn.odd_coordinate(2, 1, 2, LEVEL)
        y = SupersmoothFn.coordinate(1, 1, 2, LEVEL)
        phi = SuperMap(even=(y + t1 * t2 * p2,), odd=(t1, t2))
        want = 1 + t1 * t2 * p2.d_even(1)
        law.add_bool(sdet(jacobian(phi)) == want)
        delta = SuperMap(even=(y - t1 * t2 * p2,), odd=(t1, t2))
        chain = sdet(jacobian(delta)) * compose(sdet(jacobian(phi)), delta)
        law.add_bool(chain == SupersmoothFn.constant(1, 1, 2, LEVEL))
    out.append(law.result())

    return out


# -- contour integration ----------------------------------------------------------


def suite_contour(seed: int, cases: int) -> list[CheckResult]:
    out = []
    t = SupersmoothFn.coordinate(1, 1, 0, LEVEL)

    law = _Law("contour.fundamental-theorem")
    rng = _rng(seed, law.name)
    for _ in range(cases):
        big_u = rand_real_poly(rng, 1, 0, LEVEL, deg=4)
        soul = rand_nilpotent_even(rng, LEVEL)
        curve = t + SupersmoothFn.constant(soul, 1, 0, LEVEL) * (t * t)
        g = Path.from_polynomial(0, 1, curve)
        law.add(fundamental_theorem_check(g, big_u))
    out.append(law.result())

    law = _Law("contour.nilpotent-endpoint-shift")
    rng = _rng(seed, law.name)
    for _ in range(max(cases // 2, 10)):
        a = rand_fraction(rng, -3, 1)
        b = a + rand_fraction(rng, 1, 3, 2, nonzero=True)
        nu = rand_nilpotent_even(rng, LEVEL)
        g = Path.straight(a + nu, b + nu)
        got = path_integral(g, SupersmoothFn.coordinate(1, 1, 0, LEVEL))
        want = Fraction(1, 2) * (b * b - a * a) + nu * (b - a)
        law.add(got - want)
    out.append(law.result())

    law = _Law("contour.additivity-and-orientation")
    rng = _rng(seed, law.name)
    from .contour import path_inverse

    for _ in range(max(cases // 2, 10)):
        u = rand_real_poly(rng, 1, 0, LEVEL, deg=3)
        soul = rand_nilpotent_even(rng, LEVEL)
        curve = t + SupersmoothFn.constant(soul, 1, 0, LEVEL) * t
        g = Path.from_polynomial(0, 2, curve)
        first = Path.from_polynomial(0, 1, curve)
        second = Path.from_polynomial(1, 2, curve)
        law.add(path_integral(g, u)
                - path_integral(first, u) - path_integral(second, u))
        law.add(path_integral(path_inverse(g), u) + path_integral(g, u))
    out.append(law.result())

    law = _Law("contour.path-independence", tol=QUAD_TOL)
    rng = _rng(seed, law.name)
    spec = QuadratureSpec()
    for _ in range(20):
        deg = rng.randint(1, 3)
        u = rand_real_poly(rng, 1, 0, LEVEL, deg=3)
        # two homotopic curves with shared endpoints: straight and a
        # polynomial bump that vanishes at both ends
        g1 = Path.from_callable(0.0, 1.0,
                                lambda s: GrassmannElement.scalar(s, LEVEL),
                                lambda s: GrassmannElement.scalar(1.0, LEVEL))
        amp = rng.uniform(-0.5, 0.5)

        def val(s, _a=amp):
            return GrassmannElement.scalar(s + _a * s * (1 - s), LEVEL)

        def der(s, _a=amp):
            return GrassmannElement.scalar(1 + _a * (1 - 2 * s), LEVEL)

        g2 = Path.from_callable(0.0, 1.0, val, der)
        r1 = path_integral(g1, u, spec)
        r2 = path_integral(g2, u, spec)
        law.add(r1 - r2)
    out.append(law.result())

    return out


# -- linear change of variables ------------------------------------------------------


def suite_linear_cvf(seed: int, cases: int) -> list[CheckResult]:
    out = []
    box = [(0, 1)]

    law = _Law("linear-change.four-step-chain")
    step_law = _Law("linear-change.step-factors")
    rng = _rng(seed, law.name)
    for _ in range(cases):
        mat = rand_box_preserving_supermatrix(rng, 1, 2, LEVEL)
        scale = mat.a[0][0].body
        image_box = [(0, scale)]
        u = rand_flat_supersmooth(rng, image_box, 2, LEVEL)
        total, steps = linear_cvf_check(mat, u, SuperDomain.from_box(box, 2),
                                        collect_steps=True)
        law.add(total)
        for r in steps:
            step_law.add(r)
    out.append(law.result())
    out.append(step_law.result())

    return out


# -- manifold change of variables ------------------------------------------------------


def suite_vv_cvf(seed: int, cases: int) -> list[CheckResult]:
    out = []

    law = _Law("manifold.change-of-variables-exact")
    rng = _rng(seed, law.name)
    mani = FoliatedManifold.trivial([(0, 1)], 2, LEVEL)
    for _ in range(cases):
        phi, phi_inv = rand_bilinear_shear_map(rng, 1, 2, LEVEL)
        u = rand_supersmooth(rng, 1, 2, LEVEL)
        law.add(cvf_residual(phi, phi_inv, mani, u))
    out.append(law.result())

    law = _Law("manifold.change-of-variables-quadrature", tol=QUAD_TOL)
    rng = _rng(seed, law.name)
    import math

    def osc(q, alpha):
        k = alpha[0] % 4
        fn = [math.sin, math.cos, lambda v: -math.sin(v), lambda v: -math.cos(v)][k]
        return fn(float(q[0]))

    for _ in range(max(cases // 5, 3)):
        u = SupersmoothFn.from_oracles(1, 2, LEVEL, {
            0: SmoothOracle(osc, 10),
            3: SmoothOracle(osc, 10),
        })
        p = rand_real_poly(rng, 1, 0, LEVEL, deg=2)
        p2 = SupersmoothFn(1, 2, LEVEL, terms=dict(p._terms))
        t1 = SupersmoothFn.odd_coordinate(1, 1, 2, LEVEL)
        t2 = SupersmoothFn.odd_coordinate(2, 1, 2, LEVEL)
        y = SupersmoothFn.coordinate(1, 1, 2, LEVEL)
        phi = SuperMap(even=(y + t1 * t2 * p2,), odd=(t1, t2))
        phi_inv = SuperMap(even=(y - t1 * t2 * p2,), odd=(t1, t2))
        law.add(cvf_residual(phi, phi_inv, mani, u, QuadratureSpec(order=12, panels=4)))
    out.append(law.result())

    law = _Law("manifold.shear-dichotomy")
    q = SupersmoothFn.coordinate(1, 1, 0, LEVEL)
    u = SupersmoothFn.from_odd_coeffs(1, 2, LEVEL, {(0, 0): q, (1, 1): 1})
    q2 = SupersmoothFn(1, 2, LEVEL, terms=dict(q._terms))
    t1 = SupersmoothFn.odd_coordinate(1, 1, 2, LEVEL)
    t2 = SupersmoothFn.odd_coordinate(2, 1, 2, LEVEL)
    y = SupersmoothFn.coordinate(1, 1, 2, LEVEL)
    phi = SuperMap(even=(y + t1 * t2 * q2,), odd=(t1, t2))
    phi_inv = SuperMap(even=(y - t1 * t2 * q2,), odd=(t1, t2))
    dom = SuperDomain.from_box([(0, 1)], 2)
    disc = naive_cvf_discrepancy(phi, dom, u)
    law.add(disc - GrassmannElement.scalar(1, LEVEL))
    law.add(cvf_residual(phi, phi_inv, mani, u))
    direct = naive_integral(u, dom)
    law.add(vv_integral(mani, u) - direct)
    out.append(law.result())

    law = _Law("manifold.pullback-composition")
    rng = _rng(seed, law.name)
    for _ in range(max(cases // 4, 5)):
        u = rand_supersmooth(rng, 1, 2, LEVEL)
        phi, _ = rand_bilinear_shear_map(rng, 1, 2, LEVEL)
        psi, _ = rand_bilinear_shear_map(rng, 1, 2, LEVEL)
        one_step = pullback_superform(compose_map(phi, psi), SuperForm(u)).density
        two_step = pullback_superform(psi, pullback_superform(phi, SuperForm(u))).density
        law.add_bool(one_step == two_step)
    out.append(law.result())

    law = _Law("manifold.total-derivative-witness")
    rng = _rng(seed, law.name)
    for m in (1, 2):
        for _ in range(max(cases // 2, 10)):
            evens = []
            for j in range(1, m + 1):
                bil = (SupersmoothFn.odd_coordinate(1, m, 2, LEVEL)
                       * SupersmoothFn.odd_coordinate(2, m, 2, LEVEL))
                pj = rand_real_poly(rng, m, 2, LEVEL, deg=2)
                evens.append(SupersmoothFn.coordinate(j, m, 2, LEVEL) + bil * pj)
            h = SuperMap(even=tuple(evens),
                         odd=tuple(SupersmoothFn.odd_coordinate(k, m, 2, LEVEL)
                                   for k in (1, 2)))
            u = rand_supersmooth(rng, m, 2, LEVEL, deg=2)
            report = total_derivative_decomposition(h, u)
            law.add_bool(report["verified"])
    out.append(law.result())

    return out


# -- reparametrization invariance --------------------------------------------------------


def suite_reparam(seed: int, cases: int) -> list[CheckResult]:
    out = []
    mani = FoliatedManifold.trivial([(0, 1)], 2, LEVEL)

    law = _Law("reparametrization.odd-linear-exact")
    rng = _rng(seed, law.name)
    for _ in range(cases):
        u = rand_supersmooth(rng, 1, 2, LEVEL)
        mix = rand_even_matrix(rng, 2, LEVEL)
        phi1 = []
        for k in range(2):
            acc = SupersmoothFn.zero(1, 2, LEVEL)
            for i in range(2):
                acc = acc + SupersmoothFn.odd_coordinate(i + 1, 1, 2, LEVEL) * mix[k][i]
            phi1.append(acc)
        res = reparam_invariance_check(
            mani, [SupersmoothFn.coordinate(1, 1, 2, LEVEL)], phi1, [(0, 1)], u)
        law.add(res)
    out.append(law.result())

    law = _Law("reparametrization.nonlinear-body", tol=QUAD_TOL)
    rng = _rng(seed, law.name)
    for _ in range(max(cases // 5, 3)):
        u = rand_supersmooth(rng, 1, 2, LEVEL, deg=2)
        q = SupersmoothFn.coordinate(1, 1, 2, LEVEL)
        res = reparam_invariance_check(
            mani, [q * q],
            [SupersmoothFn.odd_coordinate(k, 1, 2, LEVEL) for k in (1, 2)],
            [(0, 1)], u, QuadratureSpec(order=16, panels=8))
        law.add(res)
    out.append(law.result())

    return out


SUITES = {
    "berezin-axioms": suite_berezin,
    "sdet": suite_sdet,
    "contour": suite_contour,
    "linear-cvf": suite_linear_cvf,
    "vv-cvf": suite_vv_cvf,
    "reparam": suite_reparam,
}


def run_suite(name: str, seed: int, cases: int) -> list[CheckResult]:
    if name == "all":
        results = []
        for key in SUITES:
            results.extend(SUITES[key](seed, cases))
        return results
    if name not in SUITES:
        raise KeyError(name)
    return SUITES[name](seed, cases)


__all__ = ["CheckResult", "SUITES", "run_suite"]
