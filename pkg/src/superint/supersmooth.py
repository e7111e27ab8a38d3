"""Supersmooth functions, supersmooth maps, and their calculus.

A supersmooth function u(x, theta) = sum_a theta^a u_a(x) on m even and
n odd variables is stored in a unified sparse form: each term pairs a
monomial exponent tuple for the even variables with a bitmask over
``level + n`` anticommuting symbols. Bits below ``level`` are the
constant generators available to coefficients, bits ``level..level+n-1``
are the odd variables theta_1..theta_n. All products, derivatives,
substitutions and coefficient extractions are exact exterior-algebra
operations on this form; the association a -> u_a of the classic
definition is recovered by the ``odd_coeff`` accessor (coefficients
standing to the right of theta^a, which fixes all interleaving signs).

Coefficient functions are multivariate polynomials with exact scalars,
or - for the numeric pipeline only - derivative oracles: callbacks
returning any partial derivative of a scalar-valued smooth function at
a body point, up to a declared order. Polynomial data keeps every
identity zero-tolerance; oracles are evaluated by the finite nilpotent
Taylor sum, whose depth is computed from the actual soul, not guessed.

Values are immutable and operations pure; oracle callbacks must be pure
and reentrant.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction
from math import factorial
from typing import Callable, Mapping, Sequence

from ._backend import mul_keyed
from .algebra import (
    DEFAULT_LEVEL,
    GrassmannElement,
    Parity,
    Scalar,
    term_sort_key,
)
from .errors import (
    DimensionError,
    DomainError,
    ExactModeError,
    LevelBudgetError,
    LevelMismatchError,
    OracleOrderError,
    ParityError,
    ZeroBodyError,
)
from .supermatrix import EvenSuperMatrix


def _div_exact(c: Scalar, k: int) -> Scalar:
    if isinstance(c, float):
        return c / k
    return Fraction(c, k) if isinstance(c, int) else c / k


@dataclass(frozen=True)
class SuperDomain:
    """Product of open body intervals times all odd directions.

    Membership is decided on the body alone; souls are never
    constrained. Endpoints are held as exact rationals.
    """

    box: tuple[tuple[Fraction, Fraction], ...]
    n: int = 0

    @classmethod
    def from_box(cls, box: Sequence[Sequence], n: int = 0) -> "SuperDomain":
        conv = tuple((Fraction(lo), Fraction(hi)) for lo, hi in box)
        for lo, hi in conv:
            if not lo < hi:
                raise DimensionError(f"empty interval ({lo}, {hi})")
        return cls(conv, n)

    @property
    def m(self) -> int:
        return len(self.box)

    def contains_body(self, q: Sequence) -> bool:
        if len(q) != self.m:
            return False
        return all(lo < qi < hi for (lo, hi), qi in zip(self.box, q))


@dataclass(frozen=True)
class SmoothOracle:
    """Smooth coefficient known through its derivatives.

    ``derivs(q, alpha)`` returns the partial derivative of multi-order
    ``alpha`` at the body point ``q``; ``order`` is the largest total
    |alpha| the callback supports. Grassmann continuation needs order at
    least the soul nilpotency depth of the evaluation point.
    """

    derivs: Callable[[tuple, tuple], float]
    order: int

    def __post_init__(self):
        if self.order < 0:
            raise OracleOrderError("oracle order must be nonnegative")


@dataclass(frozen=True)
class _OracleTerm:
    oracle: SmoothOracle
    shift: tuple[int, ...]
    scale: Scalar = 1

    def remaining_order(self) -> int:
        return self.oracle.order - sum(self.shift)

    def deriv(self, q: tuple, alpha: tuple[int, ...]) -> float:
        total = tuple(s + a for s, a in zip(self.shift, alpha))
        if sum(total) > self.oracle.order:
            raise OracleOrderError(
                f"oracle supports order {self.oracle.order}, requested {sum(total)}"
            )
        return self.scale * self.oracle.derivs(q, total)

    def value(self, q: tuple) -> float:
        return self.deriv(q, tuple(0 for _ in self.shift))


class SupersmoothFn:
    """A function sum_a theta^a u_a(x) in the unified sparse form."""

    __slots__ = ("m", "n", "level", "_terms", "_oracles")

    def __init__(self, m: int, n: int, level: int = DEFAULT_LEVEL, *,
                 terms: dict | None = None, oracles: dict | None = None):
        if m < 0 or n < 0:
            raise DimensionError("dimensions must be nonnegative")
        if level + n > 64:
            raise LevelBudgetError(f"level {level} + odd dimension {n} exceeds 64 symbols")
        self.m = m
        self.n = n
        self.level = level
        if oracles is not None:
            if terms:
                raise ExactModeError("a function is polynomial or oracle-backed, not both")
            self._terms = None
            self._oracles = dict(oracles)
        else:
            self._terms = {} if terms is None else {k: c for k, c in terms.items() if c != 0}
            self._oracles = None

    # -- constructors --------------------------------------------------

    @classmethod
    def zero(cls, m: int, n: int, level: int = DEFAULT_LEVEL) -> "SupersmoothFn":
        return cls(m, n, level)

    @classmethod
    def constant(cls, value, m: int, n: int, level: int = DEFAULT_LEVEL) -> "SupersmoothFn":
        zero_exp = (0,) * m
        if isinstance(value, GrassmannElement):
            if value.level > level:
                raise LevelMismatchError("constant lives above the function level")
            return cls(m, n, level, terms={(zero_exp, ix.bits): c for ix, c in value.terms()})
        return cls(m, n, level, terms={(zero_exp, 0): value} if value != 0 else {})

    @classmethod
    def coordinate(cls, j: int, m: int, n: int, level: int = DEFAULT_LEVEL) -> "SupersmoothFn":
        """The even coordinate function x_j (1-based)."""
        if not 1 <= j <= m:
            raise DimensionError(f"even axis {j} out of range 1..{m}")
        exp = tuple(1 if i == j - 1 else 0 for i in range(m))
        return cls(m, n, level, terms={(exp, 0): 1})

    @classmethod
    def odd_coordinate(cls, k: int, m: int, n: int, level: int = DEFAULT_LEVEL) -> "SupersmoothFn":
        """The odd coordinate function theta_k (1-based)."""
        if not 1 <= k <= n:
            raise DimensionError(f"odd axis {k} out of range 1..{n}")
        return cls(m, n, level, terms={((0,) * m, 1 << (level + k - 1)): 1})

    @classmethod
    def from_odd_coeffs(cls, m: int, n: int, level: int, coeffs: Mapping) -> "SupersmoothFn":
        """Assemble sum_a theta^a u_a from an a -> u_a association.

        Keys are 0/1 tuples of length n (or bitmasks); values are
        scalars, GrassmannElements, polynomial dicts {exponents: scalar},
        or SupersmoothFn with n = 0. Coefficients stand to the right of
        theta^a; the interleaving sign with their constant generator
        words is inserted here.
        """
        total: dict = {}
        for key, coeff in coeffs.items():
            amask = _amask(key, n)
            theta_mask = amask << level
            adeg = amask.bit_count()
            for exp, smask, c in _coeff_terms(coeff, m, level):
                if smask >> level:
                    raise LevelBudgetError("coefficient uses generators above the level")
                sign = -1 if (adeg & smask.bit_count() & 1) else 1
                key2 = (exp, smask | theta_mask)
                acc = total.get(key2, 0) + sign * c
                if acc == 0:
                    total.pop(key2, None)
                else:
                    total[key2] = acc
        return cls(m, n, level, terms=total)

    @classmethod
    def from_oracles(cls, m: int, n: int, level: int, coeffs: Mapping) -> "SupersmoothFn":
        """Assemble an oracle-backed function from a -> SmoothOracle."""
        table = {}
        for key, oracle in coeffs.items():
            amask = _amask(key, n)
            table[amask] = _OracleTerm(oracle, (0,) * m)
        return cls(m, n, level, oracles=table)

    # -- inspection ----------------------------------------------------

    @property
    def is_polynomial(self) -> bool:
        return self._terms is not None

    def is_zero(self) -> bool:
        if self.is_polynomial:
            return not self._terms
        return not self._oracles

    def terms(self) -> list:
        """Polynomial terms in deterministic order."""
        self._need_poly()
        return sorted(self._terms.items(), key=lambda kv: (kv[0][0], term_sort_key(kv[0][1])))

    def parity(self) -> Parity:
        seen_even = seen_odd = False
        if self.is_polynomial:
            masks = self._terms.keys()
            for _, mask in masks:
                if mask.bit_count() & 1:
                    seen_odd = True
                else:
                    seen_even = True
        else:
            for amask in self._oracles:
                if amask.bit_count() & 1:
                    seen_odd = True
                else:
                    seen_even = True
        if seen_odd and seen_even:
            return Parity.MIXED
        return Parity.ODD if seen_odd else Parity.EVEN

    def odd_coeff(self, key) -> "SupersmoothFn":
        """The coefficient u_a (an n = 0 function, right of theta^a)."""
        amask = _amask(key, self.n)
        adeg = amask.bit_count()
        theta_mask = amask << self.level
        all_theta = ((1 << self.n) - 1) << self.level
        if not self.is_polynomial:
            term = self._oracles.get(amask)
            out = SupersmoothFn(self.m, 0, self.level,
                                oracles={0: term} if term is not None else {})
            return out
        picked = {}
        for (exp, mask), c in self._terms.items():
            if mask & all_theta != theta_mask:
                continue
            smask = mask & ~all_theta
            sign = -1 if (adeg & smask.bit_count() & 1) else 1
            picked[(exp, smask)] = sign * c
        return SupersmoothFn(self.m, 0, self.level, terms=picked)

    def odd_support(self) -> list[int]:
        """Sorted multi-index masks a with u_a not identically zero."""
        all_theta = ((1 << self.n) - 1) << self.level
        if not self.is_polynomial:
            return sorted(self._oracles)
        found = {(mask & all_theta) >> self.level for (_, mask) in self._terms}
        return sorted(found)

    def constant_value(self) -> GrassmannElement:
        """The value of a constant function as a Grassmann element."""
        self._need_poly()
        zero_exp = (0,) * self.m
        out = {}
        for (exp, mask), c in self._terms.items():
            if exp != zero_exp or mask >> self.level:
                raise ExactModeError("function is not a constant")
            out[mask] = c
        return GrassmannElement(self.level, out, _raw=True)

    def _need_poly(self):
        if not self.is_polynomial:
            raise ExactModeError("operation needs polynomial coefficients; "
                                 "oracle-backed functions support pointwise use only")

    # -- ring structure -------------------------------------------------

    def _coerce(self, other) -> "SupersmoothFn":
        if isinstance(other, SupersmoothFn):
            if (other.m, other.n) != (self.m, self.n):
                raise DimensionError("function dimensions differ")
            if other.level != self.level:
                raise LevelMismatchError("function levels differ")
            return other
        if isinstance(other, (int, Fraction, float, GrassmannElement)):
            return SupersmoothFn.constant(other, self.m, self.n, self.level)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        if not (self.is_polynomial and o.is_polynomial):
            return self._oracle_add(o)
        out = dict(self._terms)
        for key, c in o._terms.items():
            acc = out.get(key, 0) + c
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = acc
        return SupersmoothFn(self.m, self.n, self.level, terms=out)

    __radd__ = __add__

    def _oracle_add(self, other: "SupersmoothFn") -> "SupersmoothFn":
        raise ExactModeError("oracle-backed functions do not form a ring here; "
                             "combine them before wrapping or use pointwise evaluation")

    def __neg__(self):
        if self.is_polynomial:
            return SupersmoothFn(self.m, self.n, self.level,
                                 terms={k: -c for k, c in self._terms.items()})
        return self._scale_oracle(-1)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def _scale_oracle(self, s) -> "SupersmoothFn":
        table = {a: _OracleTerm(t.oracle, t.shift, t.scale * s)
                 for a, t in self._oracles.items()}
        return SupersmoothFn(self.m, self.n, self.level, oracles=table)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, float)):
            if not self.is_polynomial:
                return self._scale_oracle(other)
            if other == 0:
                return SupersmoothFn.zero(self.m, self.n, self.level)
            return SupersmoothFn(self.m, self.n, self.level,
                                 terms={k: c * other for k, c in self._terms.items()})
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        self._need_poly()
        o._need_poly()
        return SupersmoothFn(self.m, self.n, self.level,
                             terms=mul_keyed(self._terms, o._terms))

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, float)):
            return self.__mul__(other)
        if isinstance(other, GrassmannElement):
            return self._coerce(other).__mul__(self)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = SupersmoothFn.constant(1, self.m, self.n, self.level)
        for _ in range(k):
            out = out * self
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, float, GrassmannElement)):
            other = SupersmoothFn.constant(other, self.m, self.n, self.level)
        if not isinstance(other, SupersmoothFn):
            return NotImplemented
        if (self.m, self.n, self.level) != (other.m, other.n, other.level):
            return False
        if self.is_polynomial != other.is_polynomial:
            return False
        if self.is_polynomial:
            return self._terms == other._terms
        return self._oracles == other._oracles

    def __hash__(self):
        self._need_poly()
        return hash((self.m, self.n, self.level, tuple(sorted(self._terms.items()))))

    def one_like(self) -> "SupersmoothFn":
        return SupersmoothFn.constant(1, self.m, self.n, self.level)

    def zero_like(self) -> "SupersmoothFn":
        return SupersmoothFn.zero(self.m, self.n, self.level)

    # -- calculus -------------------------------------------------------

    def d_even(self, j: int) -> "SupersmoothFn":
        """Partial derivative along the even axis j (1-based)."""
        if not 1 <= j <= self.m:
            raise DimensionError(f"even axis {j} out of range 1..{self.m}")
        if not self.is_polynomial:
            table = {}
            for a, t in self._oracles.items():
                shift = tuple(s + (1 if i == j - 1 else 0) for i, s in enumerate(t.shift))
                if sum(shift) > t.oracle.order:
                    raise OracleOrderError("oracle order exhausted by differentiation")
                table[a] = _OracleTerm(t.oracle, shift, t.scale)
            return SupersmoothFn(self.m, self.n, self.level, oracles=table)
        out: dict = {}
        for (exp, mask), c in self._terms.items():
            e = exp[j - 1]
            if e == 0:
                continue
            new_exp = exp[: j - 1] + (e - 1,) + exp[j:]
            key = (new_exp, mask)
            acc = out.get(key, 0) + c * e
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = acc
        return SupersmoothFn(self.m, self.n, self.level, terms=out)

    def d_odd(self, k: int) -> "SupersmoothFn":
        """Left derivative along the odd axis k (1-based).

        The odd symbol is anticommuted to the front of its word and
        removed, which pins the normalization used by the odd-variable
        integral: integrating theta_1...theta_n in ascending axis order
        gives exactly 1.
        """
        if not 1 <= k <= self.n:
            raise DimensionError(f"odd axis {k} out of range 1..{self.n}")
        bit = 1 << (self.level + k - 1)
        if not self.is_polynomial:
            table = {}
            abit = 1 << (k - 1)
            for a, t in self._oracles.items():
                if not a & abit:
                    continue
                sign = -1 if (a & (abit - 1)).bit_count() & 1 else 1
                table[a & ~abit] = _OracleTerm(t.oracle, t.shift, t.scale * sign)
            return SupersmoothFn(self.m, self.n, self.level, oracles=table)
        out: dict = {}
        for (exp, mask), c in self._terms.items():
            if not mask & bit:
                continue
            sign = -1 if (mask & (bit - 1)).bit_count() & 1 else 1
            key = (exp, mask & ~bit)
            acc = out.get(key, 0) + sign * c
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = acc
        return SupersmoothFn(self.m, self.n, self.level, terms=out)

    def odd_part_at_zero(self) -> "SupersmoothFn":
        """Set all odd variables to zero (drop every theta-carrying term)."""
        if not self.is_polynomial:
            table = {a: t for a, t in self._oracles.items() if a == 0}
            return SupersmoothFn(self.m, self.n, self.level, oracles=table)
        all_theta = ((1 << self.n) - 1) << self.level
        kept = {k: c for k, c in self._terms.items() if not k[1] & all_theta}
        return SupersmoothFn(self.m, self.n, self.level, terms=kept)

    def antiderivative_even(self, j: int) -> "SupersmoothFn":
        """Exact antiderivative along even axis j (polynomial only)."""
        self._need_poly()
        if not 1 <= j <= self.m:
            raise DimensionError(f"even axis {j} out of range 1..{self.m}")
        out = {}
        for (exp, mask), c in self._terms.items():
            e = exp[j - 1]
            new_exp = exp[: j - 1] + (e + 1,) + exp[j:]
            out[(new_exp, mask)] = _div_exact(c, e + 1)
        return SupersmoothFn(self.m, self.n, self.level, terms=out)

    def substitute_even(self, j: int, value: Scalar) -> "SupersmoothFn":
        """Evaluate even variable j at a scalar, dropping that axis."""
        self._need_poly()
        if not 1 <= j <= self.m:
            raise DimensionError(f"even axis {j} out of range 1..{self.m}")
        out: dict = {}
        for (exp, mask), c in self._terms.items():
            e = exp[j - 1]
            new_exp = exp[: j - 1] + exp[j:]
            key = (new_exp, mask)
            acc = out.get(key, 0) + c * value**e
            if acc == 0:
                out.pop(key, None)
            else:
                out[key] = acc
        return SupersmoothFn(self.m - 1, self.n, self.level, terms=out)

    # -- evaluation -----------------------------------------------------

    def body_value(self, q: Sequence) -> Scalar:
        """Scalar part of the function at a real body point."""
        if len(q) != self.m:
            raise DimensionError("body point has wrong dimension")
        if not self.is_polynomial:
            t = self._oracles.get(0)
            return t.value(tuple(q)) if t is not None else 0.0
        acc: Scalar = 0
        for (exp, mask), c in self._terms.items():
            if mask:
                continue
            v = c
            for qi, e in zip(q, exp):
                if e:
                    v = v * qi**e
            acc = acc + v
        return acc

    def eval(self, xs: Sequence, thetas: Sequence = (),
             domain: SuperDomain | None = None) -> GrassmannElement:
        """Evaluate at Grassmann arguments (even xs, odd thetas).

        Polynomial coefficients are evaluated directly, which agrees
        exactly with the nilpotent Taylor continuation; oracle
        coefficients are continued by the finite Taylor sum around the
        body of the argument.
        """
        if len(xs) != self.m or len(thetas) != self.n:
            raise DimensionError("argument counts do not match function dimensions")
        pt_level = None
        for v in list(xs) + list(thetas):
            if isinstance(v, GrassmannElement):
                if pt_level is not None and v.level != pt_level:
                    raise LevelMismatchError("evaluation points mix levels")
                pt_level = v.level
        if pt_level is None:
            pt_level = self.level
        if pt_level < self.level:
            raise LevelBudgetError("evaluation level below the function's generator level")

        xs_g = [x if isinstance(x, GrassmannElement) else GrassmannElement.scalar(x, pt_level)
                for x in xs]
        th_g = [t if isinstance(t, GrassmannElement) else GrassmannElement.scalar(t, pt_level)
                for t in thetas]
        for x in xs_g:
            if x.parity() not in (Parity.EVEN,):
                raise ParityError("even arguments must be even elements")
        for t in th_g:
            if not t.is_zero() and t.parity() is not Parity.ODD:
                raise ParityError("odd arguments must be odd elements")
        if domain is not None and not domain.contains_body([x.body for x in xs_g]):
            raise DomainError("body of the evaluation point leaves the declared domain")

        if self.is_polynomial:
            return self._eval_poly(xs_g, th_g, pt_level)
        return self._eval_oracle(xs_g, th_g, pt_level)

    def _eval_poly(self, xs_g, th_g, pt_level) -> GrassmannElement:
        powers: list[dict[int, GrassmannElement]] = [
            {0: GrassmannElement.scalar(1, pt_level)} for _ in range(self.m)
        ]

        def xpow(j: int, e: int) -> GrassmannElement:
            cache = powers[j]
            if e not in cache:
                best = max(k for k in cache if k <= e)
                val = cache[best]
                while best < e:
                    val = val * xs_g[j]
                    best += 1
                    cache[best] = val
            return cache[e]

        total = GrassmannElement.zero(pt_level)
        for (exp, mask), c in self.terms():
            val = GrassmannElement.scalar(c, pt_level)
            for j, e in enumerate(exp):
                if e:
                    val = val * xpow(j, e)
            smask = mask & ((1 << self.level) - 1)
            if smask:
                val = val * GrassmannElement(pt_level, {smask: 1}, _raw=True)
            tbits = mask >> self.level
            k = 0
            while tbits:
                if tbits & 1:
                    val = val * th_g[k]
                tbits >>= 1
                k += 1
            total = total + val
        return total

    def _eval_oracle(self, xs_g, th_g, pt_level) -> GrassmannElement:
        bodies = tuple(x.body for x in xs_g)
        souls = [x.soul for x in xs_g]
        soul_powers: list[list[GrassmannElement]] = []
        for s in souls:
            plist = [GrassmannElement.scalar(1, pt_level)]
            p = GrassmannElement.scalar(1, pt_level)
            while True:
                p = p * s
                if p.is_zero():
                    break
                plist.append(p)
            soul_powers.append(plist)

        total = GrassmannElement.zero(pt_level)
        for amask in sorted(self._oracles):
            term = self._oracles[amask]
            cont = GrassmannElement.zero(pt_level)
            ranges = [range(len(p)) for p in soul_powers]
            for alpha in itertools.product(*ranges):
                depth = sum(alpha)
                if depth > term.remaining_order():
                    raise OracleOrderError(
                        f"continuation needs derivative order {depth}, oracle "
                        f"declares {term.remaining_order()}"
                    )
                coeff = term.deriv(bodies, alpha)
                if coeff == 0:
                    continue
                weight = coeff
                for a in alpha:
                    if a > 1:
                        weight = weight / factorial(a)
                mono = GrassmannElement.scalar(weight, pt_level)
                for j, a in enumerate(alpha):
                    if a:
                        mono = mono * soul_powers[j][a]
                cont = cont + mono
            k = 0
            abits = amask
            word = GrassmannElement.scalar(1, pt_level)
            while abits:
                if abits & 1:
                    word = word * th_g[k]
                abits >>= 1
                k += 1
            total = total + word * cont
        return total

    def inverse_even(self) -> "SupersmoothFn":
        """Pointwise inverse of an even function, exact when the scalar
        part is a nonzero constant (finite geometric series in the
        nilpotent remainder). A nonconstant scalar part has no
        polynomial inverse and raises ExactModeError."""
        self._need_poly()
        if self.parity() is not Parity.EVEN:
            raise ParityError("pointwise inverse needs an even function")
        zero_exp = (0,) * self.m
        const = 0
        for (exp, mask), c in self._terms.items():
            if mask == 0:
                if exp != zero_exp:
                    raise ExactModeError(
                        "scalar part is a nonconstant polynomial; its inverse is not "
                        "polynomial - evaluate pointwise (quadrature mode) instead"
                    )
                const = c
        if const == 0:
            raise ZeroBodyError("even function has zero scalar part, no inverse")
        cinv = Fraction(1, const) if isinstance(const, int) else 1 / const
        ratio = (self - const) * (-cinv)
        out = SupersmoothFn.constant(1, self.m, self.n, self.level)
        power = out
        while True:
            power = power * ratio
            if power.is_zero():
                break
            out = out + power
        return out * cinv

    def __repr__(self) -> str:
        kind = "poly" if self.is_polynomial else "oracle"
        return f"<SupersmoothFn {self.m}|{self.n} L{self.level} {kind}>"


def _amask(key, n: int) -> int:
    """Normalize an odd multi-index (bit tuple or mask) to a bitmask."""
    if isinstance(key, int):
        amask = key
    else:
        amask = 0
        if len(key) != n:
            raise DimensionError(f"odd multi-index length {len(key)} != n = {n}")
        for i, bit in enumerate(key):
            if bit not in (0, 1):
                raise DimensionError("odd multi-index entries must be 0 or 1")
            if bit:
                amask |= 1 << i
    if amask >> n:
        raise DimensionError("odd multi-index outside range")
    return amask


def _coeff_terms(coeff, m: int, level: int):
    """Yield (exponents, sigma-mask, scalar) triples from a coefficient
    given as scalar, GrassmannElement, polynomial dict, or n = 0 fn."""
    zero_exp = (0,) * m
    if isinstance(coeff, (int, Fraction, float)):
        if coeff != 0:
            yield zero_exp, 0, coeff
    elif isinstance(coeff, GrassmannElement):
        for ix, c in coeff.terms():
            yield zero_exp, ix.bits, c
    elif isinstance(coeff, SupersmoothFn):
        if coeff.n != 0 or coeff.m != m:
            raise DimensionError("coefficient functions must have n = 0 and matching m")
        for (exp, mask), c in coeff.terms():
            yield exp, mask, c
    elif isinstance(coeff, Mapping):
        for exp, c in coeff.items():
            e = tuple(exp)
            if len(e) != m:
                raise DimensionError("exponent tuple has wrong arity")
            if isinstance(c, GrassmannElement):
                for ix, cc in c.terms():
                    yield e, ix.bits, cc
            elif c != 0:
                yield e, 0, c
    else:
        raise TypeError(f"cannot interpret coefficient {coeff!r}")


@dataclass(frozen=True)
class SuperMap:
    """A supersmooth map given by its even and odd component functions.

    Components all live on the same source dimensions (m, n) and level;
    even components must be even, odd components odd. Under the
    row-vector convention the map (x, theta) = (y, omega) M of a
    supermatrix M has Jacobian exactly M.
    """

    even: tuple[SupersmoothFn, ...]
    odd: tuple[SupersmoothFn, ...]

    def __post_init__(self):
        object.__setattr__(self, "even", tuple(self.even))
        object.__setattr__(self, "odd", tuple(self.odd))
        comps = self.even + self.odd
        if not comps:
            raise DimensionError("a map needs at least one component")
        m, n, level = comps[0].m, comps[0].n, comps[0].level
        for f in comps:
            if (f.m, f.n, f.level) != (m, n, level):
                raise DimensionError("map components disagree on source dims or level")
        for f in self.even:
            if f.parity() not in (Parity.EVEN,):
                raise ParityError("even components must have even parity")
        for f in self.odd:
            if not f.is_zero() and f.parity() is not Parity.ODD:
                raise ParityError("odd components must have odd parity")

    @property
    def source_dims(self) -> tuple[int, int]:
        return (self.even + self.odd)[0].m, (self.even + self.odd)[0].n

    @property
    def target_dims(self) -> tuple[int, int]:
        return len(self.even), len(self.odd)

    @property
    def level(self) -> int:
        return (self.even + self.odd)[0].level

    @classmethod
    def identity(cls, m: int, n: int, level: int = DEFAULT_LEVEL) -> "SuperMap":
        return cls(
            even=tuple(SupersmoothFn.coordinate(j, m, n, level) for j in range(1, m + 1)),
            odd=tuple(SupersmoothFn.odd_coordinate(k, m, n, level) for k in range(1, n + 1)),
        )

    @classmethod
    def linear(cls, matrix: EvenSuperMatrix, level: int | None = None) -> "SuperMap":
        """The linear change (x, theta) = (y, omega) M for constant M."""
        rows = matrix.rows()
        mm, nn = matrix.dims
        lvl = level if level is not None else rows[0][0].level
        comps = []
        for j in range(mm + nn):
            acc = SupersmoothFn.zero(mm, nn, lvl)
            for i in range(mm + nn):
                entry = rows[i][j]
                if entry.is_zero():
                    continue
                var = (SupersmoothFn.coordinate(i + 1, mm, nn, lvl) if i < mm
                       else SupersmoothFn.odd_coordinate(i - mm + 1, mm, nn, lvl))
                acc = acc + var * entry.lift(lvl)
            comps.append(acc)
        return cls(even=tuple(comps[:mm]), odd=tuple(comps[mm:]))

    def eval(self, xs: Sequence, thetas: Sequence = ()):
        evens = tuple(f.eval(xs, thetas) for f in self.even)
        odds = tuple(f.eval(xs, thetas) for f in self.odd)
        return evens, odds

    def body_map(self, q: Sequence) -> tuple:
        return tuple(f.body_value(q) for f in self.even)


def ss_eval(u: SupersmoothFn, xs: Sequence, thetas: Sequence = (),
            domain: SuperDomain | None = None) -> GrassmannElement:
    return u.eval(xs, thetas, domain)


def d_even(u: SupersmoothFn, j: int) -> SupersmoothFn:
    return u.d_even(j)


def d_odd(u: SupersmoothFn, k: int) -> SupersmoothFn:
    return u.d_odd(k)


def compose(u: SupersmoothFn, phi: SuperMap) -> SupersmoothFn:
    """Substitute the components of phi into u (exact for polynomials).

    The expansion around the body of the inner map is the direct
    polynomial substitution, which coincides with the finite nilpotent
    Taylor sum term by term.
    """
    tm, tn = phi.target_dims
    if (u.m, u.n) != (tm, tn):
        raise DimensionError(f"function expects {u.m}|{u.n} arguments, map supplies {tm}|{tn}")
    if u.level != phi.level:
        raise LevelMismatchError("function and map levels differ")
    u._need_poly()
    for comp in phi.even + phi.odd:
        comp._need_poly()
    sm, sn = phi.source_dims
    lvl = u.level

    pow_cache: dict[tuple[int, int], SupersmoothFn] = {}

    def even_power(j: int, e: int) -> SupersmoothFn:
        key = (j, e)
        if key not in pow_cache:
            if e == 0:
                pow_cache[key] = SupersmoothFn.constant(1, sm, sn, lvl)
            else:
                pow_cache[key] = even_power(j, e - 1) * phi.even[j]
        return pow_cache[key]

    total = SupersmoothFn.zero(sm, sn, lvl)
    for (exp, mask), c in u.terms():
        val = SupersmoothFn.constant(c, sm, sn, lvl)
        for j, e in enumerate(exp):
            if e:
                val = val * even_power(j, e)
        smask = mask & ((1 << lvl) - 1)
        if smask:
            val = val * SupersmoothFn(sm, sn, lvl, terms={((0,) * sm, smask): 1})
        tbits = mask >> lvl
        k = 0
        while tbits:
            if tbits & 1:
                val = val * phi.odd[k]
            tbits >>= 1
            k += 1
        total = total + val
    return total


def compose_map(phi: SuperMap, psi: SuperMap) -> SuperMap:
    """The composite map phi o psi (apply psi first)."""
    return SuperMap(
        even=tuple(compose(f, psi) for f in phi.even),
        odd=tuple(compose(f, psi) for f in phi.odd),
    )


def jacobian(phi: SuperMap) -> EvenSuperMatrix:
    """Super-Jacobian as a matrix-valued function.

    Rows are indexed by source variables (even first), columns by
    target components, so for linear maps the Jacobian is the defining
    matrix and the chain rule reads J(phi o psi) = J(psi) . J(phi) o psi.
    Evaluate entries pointwise via ``map_entries`` when a constant
    matrix is needed.
    """
    sm, sn = phi.source_dims
    tm, tn = phi.target_dims
    if (sm, sn) != (tm, tn):
        raise DimensionError("Jacobian supermatrix needs a square map")
    a = tuple(tuple(phi.even[j].d_even(i + 1) for j in range(tm)) for i in range(sm))
    c = tuple(tuple(phi.odd[j].d_even(i + 1) for j in range(tn)) for i in range(sm))
    d = tuple(tuple(phi.even[j].d_odd(i + 1) for j in range(tm)) for i in range(sn))
    b = tuple(tuple(phi.odd[j].d_odd(i + 1) for j in range(tn)) for i in range(sn))
    return EvenSuperMatrix(a, c, d, b)


def is_superdiffeo(phi: SuperMap, dom: SuperDomain, samples: int = 16,
                   seed: int = 0) -> tuple[bool, dict | None]:
    """Sampling certificate that phi is a superdiffeomorphism on dom.

    Checks that the body of sdet J(phi) is nonzero at sampled body
    points and that the body map is injective on the sample set. This
    certifies nothing beyond the samples; the first violation is
    returned as a witness.
    """
    sm, sn = phi.source_dims
    if (sm, sn) != phi.target_dims:
        raise DimensionError("superdiffeomorphism check needs a square map")
    rng = random.Random(seed)
    points = []
    grid = min(max(samples // 2, 1), 9) | 1  # odd count puts the midpoint on the grid
    for i in range(1, grid + 1):
        frac = Fraction(i, grid + 1)
        points.append(tuple(lo + (hi - lo) * frac for lo, hi in dom.box))
    while len(points) < max(samples, 1):
        points.append(tuple(lo + (hi - lo) * Fraction(rng.randint(1, 999), 1000)
                            for lo, hi in dom.box))

    jac = jacobian(phi)
    body_a = [[entry for entry in row] for row in jac.a]
    body_b = [[entry for entry in row] for row in jac.b]
    for q in points:
        det_a = _real_det([[e.body_value(q) for e in row] for row in body_a]) if sm else 1
        det_b = _real_det([[e.body_value(q) for e in row] for row in body_b]) if sn else 1
        if det_a == 0 or det_b == 0:
            return False, {"reason": "body of sdet J vanishes", "point": q}
    images = []
    for q in points:
        img = phi.body_map(q)
        for q0, img0 in images:
            if img == img0 and q != q0:
                return False, {"reason": "body map not injective on samples",
                               "point": q, "collides_with": q0}
        images.append((q, img))
    return True, None


def _real_det(rows) -> Scalar:
    n = len(rows)
    if n == 0:
        return 1
    mat = [list(r) for r in rows]
    det = 1
    sign = 1
    for k in range(n):
        pivot = max(range(k, n), key=lambda i: abs(mat[i][k]))
        if mat[pivot][k] == 0:
            return 0
        if pivot != k:
            mat[k], mat[pivot] = mat[pivot], mat[k]
            sign = -sign
        det = det * mat[k][k]
        for i in range(k + 1, n):
            f = mat[i][k] / mat[k][k] if not isinstance(mat[i][k], int) or not isinstance(mat[k][k], int) \
                else Fraction(mat[i][k], mat[k][k])
            for j in range(k, n):
                mat[i][j] = mat[i][j] - f * mat[k][j]
    return det * sign


def integrate_box(u: SupersmoothFn, box: Sequence) -> GrassmannElement:
    """Exact integral of a polynomial n = 0 part over a body box.

    The function must have no odd variables left (n = 0 or no
    theta-carrying terms); iterated antiderivatives keep exact scalars.
    """
    u._need_poly()
    all_theta = ((1 << u.n) - 1) << u.level
    for (_, mask) in u._terms:
        if mask & all_theta:
            raise ParityError("box integration applies to functions of even variables only")
    dom = box if isinstance(box, SuperDomain) else SuperDomain.from_box(box)
    if dom.m != u.m:
        raise DimensionError("box dimension does not match the function")
    cur = u
    for j in range(u.m, 0, -1):
        anti = cur.antiderivative_even(j)
        lo, hi = dom.box[j - 1]
        cur = anti.substitute_even(j, hi) + (-(anti.substitute_even(j, lo)))
    return cur.constant_value()


__all__ = [
    "SmoothOracle",
    "SuperDomain",
    "SuperMap",
    "SupersmoothFn",
    "compose",
    "compose_map",
    "d_even",
    "d_odd",
    "integrate_box",
    "is_superdiffeo",
    "jacobian",
    "ss_eval",
]
