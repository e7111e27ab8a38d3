"""Seeded random generators for algebra and function test cases.

All draws go through ``random.Random`` (the Mersenne Twister), so a
fixed seed reproduces the same case list on any platform. Coefficients
are small exact rationals; generator words for constants stay on the
low generators so the default level leaves room for odd variables.
"""

from __future__ import annotations

import random
from fractions import Fraction
from itertools import combinations

from .algebra import GrassmannElement, Parity
from .supermatrix import EvenSuperMatrix
from .supersmooth import SuperMap, SupersmoothFn

Rng = random.Random


def rand_fraction(rng: Rng, lo: int = -4, hi: int = 4, den: int = 3,
                  nonzero: bool = False) -> Fraction:
    while True:
        f = Fraction(rng.randint(lo, hi), rng.randint(1, den))
        if f != 0 or not nonzero:
            return f


def rand_element(rng: Rng, level: int, parity: Parity | None = None,
                 max_terms: int = 3, max_support: int = 4,
                 with_body: bool | None = None) -> GrassmannElement:
    """Random element; optionally homogeneous and/or body-invertible."""
    support = min(max_support, level)
    words = []
    for grade in range(support + 1):
        if parity is Parity.EVEN and grade % 2:
            continue
        if parity is Parity.ODD and grade % 2 == 0:
            continue
        words.extend(combinations(range(1, support + 1), grade))
    terms: dict[int, Fraction] = {}
    for _ in range(rng.randint(1, max_terms)):
        word = words[rng.randrange(len(words))]
        mask = 0
        for i in word:
            mask |= 1 << (i - 1)
        terms[mask] = terms.get(mask, Fraction(0)) + rand_fraction(rng)
    x = GrassmannElement(level, terms)
    if with_body:
        x = x + (rand_fraction(rng, 1, 4, 2) - x.body + 1)
    elif with_body is False:
        x = x.soul
    return x


def rand_nilpotent_even(rng: Rng, level: int, max_terms: int = 2) -> GrassmannElement:
    return rand_element(rng, level, Parity.EVEN, max_terms, with_body=False)


def rand_odd(rng: Rng, level: int, max_terms: int = 2) -> GrassmannElement:
    return rand_element(rng, level, Parity.ODD, max_terms)


def rand_even_matrix(rng: Rng, size: int, level: int, *, positive_diag: bool = False,
                     nilpotent_offdiag: bool = True):
    """Body-invertible square matrix of even elements (triangular body
    plus nilpotent perturbations everywhere)."""
    rows = []
    for i in range(size):
        row = []
        for j in range(size):
            if i == j:
                body = rand_fraction(rng, 1, 3, 2, nonzero=True)
                if not positive_diag and rng.random() < 0.5:
                    body = -body
                entry = GrassmannElement.scalar(body, level) + rand_nilpotent_even(rng, level)
            elif j < i and not positive_diag:
                entry = GrassmannElement.scalar(rand_fraction(rng), level)
                if nilpotent_offdiag:
                    entry = entry + rand_nilpotent_even(rng, level)
            else:
                entry = (rand_nilpotent_even(rng, level) if nilpotent_offdiag
                         else GrassmannElement.zero(level))
            row.append(entry)
        rows.append(tuple(row))
    return tuple(rows)


def rand_supermatrix(rng: Rng, m: int, n: int, level: int, *,
                     positive_diag_a: bool = False) -> EvenSuperMatrix:
    a = rand_even_matrix(rng, m, level, positive_diag=positive_diag_a)
    b = rand_even_matrix(rng, n, level)
    c = tuple(tuple(rand_odd(rng, level) for _ in range(n)) for _ in range(m))
    d = tuple(tuple(rand_odd(rng, level) for _ in range(m)) for _ in range(n))
    return EvenSuperMatrix(a, c, d, b)


def rand_box_preserving_supermatrix(rng: Rng, m: int, n: int, level: int) -> EvenSuperMatrix:
    """Supermatrix whose even change maps boxes to boxes exactly: the A
    block is a real positive diagonal, the B block body-invertible with
    nilpotent parts, and the off-diagonal blocks random odd constants."""
    a = tuple(
        tuple(
            GrassmannElement.scalar(rand_fraction(rng, 1, 3, 2, nonzero=True), level)
            if i == j else GrassmannElement.zero(level)
            for j in range(m)
        )
        for i in range(m)
    )
    b = rand_even_matrix(rng, n, level)
    c = tuple(tuple(rand_odd(rng, level) for _ in range(n)) for _ in range(m))
    d = tuple(tuple(rand_odd(rng, level) for _ in range(m)) for _ in range(n))
    return EvenSuperMatrix(a, c, d, b)


def rand_real_poly(rng: Rng, m: int, n: int, level: int, deg: int = 2,
                   terms: int = 3) -> SupersmoothFn:
    """Random polynomial in the even variables with rational coefficients."""
    table: dict = {}
    for _ in range(terms):
        exp = tuple(rng.randint(0, deg) for _ in range(m))
        table[(exp, 0)] = table.get((exp, 0), Fraction(0)) + rand_fraction(rng)
    return SupersmoothFn(m, n, level, terms=table)


def rand_supersmooth(rng: Rng, m: int, n: int, level: int, deg: int = 2,
                     sigma_support: int = 2) -> SupersmoothFn:
    """Random supersmooth function with Grassmann-constant parts."""
    coeffs = {}
    for amask in range(1 << n):
        if rng.random() < 0.4 and amask != (1 << n) - 1:
            continue
        want = Parity.EVEN if amask.bit_count() % 2 == 0 else None
        const = rand_element(rng, min(sigma_support, level), want) if rng.random() < 0.5 \
            else rand_fraction(rng)
        poly = rand_real_poly(rng, m, 0, level, deg)
        if isinstance(const, GrassmannElement):
            coeffs[amask] = poly * SupersmoothFn.constant(const.lift(level), m, 0, level)
        else:
            coeffs[amask] = poly * const
    return SupersmoothFn.from_odd_coeffs(m, n, level, coeffs)


def rand_odd_polynomial(rng: Rng, n: int, level: int, sigma_support: int = 3) -> SupersmoothFn:
    """Random odd polynomial with Grassmann-constant coefficients."""
    coeffs = {}
    for amask in range(1 << n):
        if rng.random() < 0.3:
            continue
        coeffs[amask] = rand_element(rng, min(sigma_support, level), max_terms=2)
    if not coeffs:
        coeffs[(1 << n) - 1] = GrassmannElement.scalar(1, min(sigma_support, level))
    return SupersmoothFn.from_odd_coeffs(0, n, level, coeffs)


def boundary_flat_factor(box, n: int, level: int, order: int) -> SupersmoothFn:
    """Polynomial weight vanishing to the given order at every box face.

    Multiplying an integrand by this emulates compact support exactly:
    box-boundary terms produced by nilpotent shifts of the even
    variables die to all orders the level can generate.
    """
    m = len(box)
    w = SupersmoothFn.constant(1, m, n, level)
    for j, (lo, hi) in enumerate(box, start=1):
        xj = SupersmoothFn.coordinate(j, m, n, level)
        w = w * ((xj - Fraction(lo)) * (Fraction(hi) - xj)) ** order
    return w


def rand_flat_supersmooth(rng: Rng, box, n: int, level: int, deg: int = 2) -> SupersmoothFn:
    """Random integrand with all coefficients boundary-flat on the box."""
    m = len(box)
    order = (level + n) // 2 + 2
    return boundary_flat_factor(box, n, level, order) * rand_supersmooth(rng, m, n, level, deg)


def rand_bilinear_shear_map(rng: Rng, m: int, n: int, level: int, deg: int = 3):
    """Superdiffeomorphism x = y + (odd bilinear) p(y), theta = omega B,
    plus its exact inverse (B a constant invertible even matrix).

    The bilinear factor squares to zero, which makes the inverse a
    single reflection of the shear; the pair is verified by the caller.
    """
    if n < 2:
        raise ValueError("shear maps need at least two odd variables")
    k, l = sorted(rng.sample(range(1, n + 1), 2))
    c = rand_fraction(rng, 1, 3, 2, nonzero=True)
    b_mat = rand_even_matrix(rng, n, level, nilpotent_offdiag=False)

    def bilinear(fn_level):
        tk = SupersmoothFn.odd_coordinate(k, m, n, fn_level)
        tl = SupersmoothFn.odd_coordinate(l, m, n, fn_level)
        return tk * tl * c

    ps = [rand_real_poly(rng, m, 0, level, deg) for _ in range(m)]

    evens = []
    for j in range(1, m + 1):
        pj = SupersmoothFn(m, n, level, terms=dict(ps[j - 1]._terms))
        evens.append(SupersmoothFn.coordinate(j, m, n, level) + bilinear(level) * pj)
    odds = []
    for j in range(n):
        acc = SupersmoothFn.zero(m, n, level)
        for i in range(n):
            acc = acc + SupersmoothFn.odd_coordinate(i + 1, m, n, level) * b_mat[j][i]
        odds.append(acc)
    phi = SuperMap(even=tuple(evens), odd=tuple(odds))

    # inverse: omega = theta B^-1, y = x - bilinear(omega(theta)) p(x)
    from .supermatrix import even_matrix_inverse

    b_inv = even_matrix_inverse(b_mat)
    inv_odds = []
    for j in range(n):
        acc = SupersmoothFn.zero(m, n, level)
        for i in range(n):
            acc = acc + SupersmoothFn.odd_coordinate(i + 1, m, n, level) * b_inv[j][i]
        inv_odds.append(acc)
    omega_of_theta = SuperMap(
        even=tuple(SupersmoothFn.coordinate(j, m, n, level) for j in range(1, m + 1)),
        odd=tuple(inv_odds),
    )
    from .supersmooth import compose

    bilinear_in_theta = compose(bilinear(level), omega_of_theta)
    inv_evens = []
    for j in range(1, m + 1):
        pj = SupersmoothFn(m, n, level, terms=dict(ps[j - 1]._terms))
        inv_evens.append(SupersmoothFn.coordinate(j, m, n, level) - bilinear_in_theta * pj)
    phi_inv = SuperMap(even=tuple(inv_evens), odd=tuple(inv_odds))
    return phi, phi_inv


__all__ = [
    "rand_bilinear_shear_map",
    "rand_element",
    "rand_even_matrix",
    "rand_fraction",
    "rand_nilpotent_even",
    "rand_odd",
    "rand_odd_polynomial",
    "rand_real_poly",
    "rand_supermatrix",
    "rand_supersmooth",
]
