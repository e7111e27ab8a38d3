"""Exact arithmetic in the real exterior algebra on L anticommuting generators.

Elements are sparse sums of scalar coefficients over generator words.
Scalars are exact rationals (``int``/``Fraction``) for identity checking
and binary floats along quadrature paths; the two interoperate freely.
Values are immutable and every operation is a pure function, so elements
may be shared between threads without locking.

The canonical text form is ``"c0 + c1*s[1] + c2*s[1,3]"`` with generator
indices ascending inside each word and words ordered by (grade, indices).
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Union

from ._backend import merge_swaps, mul_masked
from .errors import (
    LevelBudgetError,
    LevelMismatchError,
    ParityError,
    ProblemFormatError,
    ZeroBodyError,
)

Scalar = Union[int, Fraction, float]

MAX_LEVEL = 64
DEFAULT_LEVEL = 8


class Parity(enum.Enum):
    EVEN = 0
    ODD = 1
    MIXED = 2


def mask_from_indices(indices: Iterable[int], level: int) -> int:
    """Bitmask of a strictly increasing generator word."""
    mask = 0
    prev = 0
    for i in indices:
        if i <= prev:
            raise ValueError(f"generator indices must be strictly increasing, got {tuple(indices)}")
        if i > level:
            raise LevelBudgetError(f"generator {i} exceeds level {level}")
        mask |= 1 << (i - 1)
        prev = i
    return mask


def indices_from_mask(mask: int) -> tuple[int, ...]:
    out = []
    i = 1
    while mask:
        if mask & 1:
            out.append(i)
        mask >>= 1
        i += 1
    return tuple(out)


@dataclass(frozen=True)
class IndexSet:
    """A strictly increasing word of generator labels, stored as a bitmask."""

    bits: int

    @classmethod
    def of(cls, *indices: int, level: int = MAX_LEVEL) -> "IndexSet":
        return cls(mask_from_indices(indices, level))

    @property
    def indices(self) -> tuple[int, ...]:
        return indices_from_mask(self.bits)

    @property
    def grade(self) -> int:
        return self.bits.bit_count()

    def __iter__(self):
        return iter(self.indices)

    def __repr__(self) -> str:
        return f"IndexSet{self.indices}"


def _check_level(level: int) -> int:
    if not 0 <= level <= MAX_LEVEL:
        raise LevelBudgetError(f"level must be in [0, {MAX_LEVEL}], got {level}")
    return level


def term_sort_key(mask: int):
    """Deterministic term order: by grade, then lexicographic word."""
    return (mask.bit_count(), indices_from_mask(mask))


class GrassmannElement:
    """Sparse multivector over the exterior algebra at a fixed level."""

    __slots__ = ("level", "_terms")

    def __init__(self, level: int, terms: dict | None = None, *, _raw: bool = False):
        self.level = _check_level(level)
        if terms is None:
            self._terms = {}
        elif _raw:
            self._terms = terms
        else:
            cleaned = {}
            full = (1 << level) - 1
            for mask, coeff in terms.items():
                if isinstance(mask, IndexSet):
                    mask = mask.bits
                if mask & ~full:
                    raise LevelBudgetError(f"term {indices_from_mask(mask)} exceeds level {level}")
                if coeff != 0:
                    cleaned[mask] = cleaned.get(mask, 0) + coeff
            self._terms = {m: c for m, c in cleaned.items() if c != 0}

    # -- constructors -------------------------------------------------

    @classmethod
    def scalar(cls, value: Scalar, level: int = DEFAULT_LEVEL) -> "GrassmannElement":
        return cls(level, {0: value})

    @classmethod
    def generator(cls, i: int, level: int = DEFAULT_LEVEL) -> "GrassmannElement":
        return cls(level, {mask_from_indices((i,), level): 1})

    @classmethod
    def monomial(cls, coeff: Scalar, indices: Iterable[int], level: int = DEFAULT_LEVEL) -> "GrassmannElement":
        return cls(level, {mask_from_indices(indices, level): coeff})

    @classmethod
    def zero(cls, level: int = DEFAULT_LEVEL) -> "GrassmannElement":
        return cls(level, {})

    # -- inspection ---------------------------------------------------

    def terms(self) -> list[tuple[IndexSet, Scalar]]:
        """Terms in canonical order."""
        return [(IndexSet(m), self._terms[m]) for m in sorted(self._terms, key=term_sort_key)]

    def coefficient(self, indices: Iterable[int]) -> Scalar:
        return self._terms.get(mask_from_indices(indices, self.level), 0)

    def is_zero(self) -> bool:
        return not self._terms

    @property
    def body(self) -> Scalar:
        """Coefficient of the empty word (0 if absent)."""
        return self._terms.get(0, 0)

    @property
    def soul(self) -> "GrassmannElement":
        """The nilpotent remainder x - body(x)."""
        t = dict(self._terms)
        t.pop(0, None)
        return GrassmannElement(self.level, t, _raw=True)

    def parity(self) -> Parity:
        """Even/Odd for homogeneous elements, Mixed otherwise; 0 is Even."""
        seen_even = seen_odd = False
        for mask in self._terms:
            if mask.bit_count() & 1:
                seen_odd = True
            else:
                seen_even = True
        if seen_odd and seen_even:
            return Parity.MIXED
        return Parity.ODD if seen_odd else Parity.EVEN

    def max_abs_coeff(self) -> Scalar:
        return max((abs(c) for c in self._terms.values()), default=0)

    # -- arithmetic ---------------------------------------------------

    def _coerce(self, other) -> "GrassmannElement":
        if isinstance(other, GrassmannElement):
            if other.level != self.level:
                raise LevelMismatchError(f"levels differ: {self.level} vs {other.level}")
            return other
        if isinstance(other, (int, Fraction, float)):
            return GrassmannElement(self.level, {0: other})
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        out = dict(self._terms)
        for mask, coeff in o._terms.items():
            acc = out.get(mask, 0) + coeff
            if acc == 0:
                out.pop(mask, None)
            else:
                out[mask] = acc
        return GrassmannElement(self.level, out, _raw=True)

    __radd__ = __add__

    def __neg__(self):
        return GrassmannElement(self.level, {m: -c for m, c in self._terms.items()}, _raw=True)

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, float)):
            if other == 0:
                return GrassmannElement.zero(self.level)
            return GrassmannElement(
                self.level, {m: c * other for m, c in self._terms.items()}, _raw=True
            )
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return GrassmannElement(self.level, mul_masked(self._terms, o._terms), _raw=True)

    def __rmul__(self, other):
        if isinstance(other, (int, Fraction, float)):
            return self.__mul__(other)
        return NotImplemented

    def __pow__(self, k: int):
        if not isinstance(k, int) or k < 0:
            raise ValueError("exponent must be a nonnegative integer")
        out = GrassmannElement.scalar(1, self.level)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base if k > 1 else base
            k >>= 1
        return out

    def __eq__(self, other):
        if isinstance(other, (int, Fraction, float)):
            other = GrassmannElement(self.level, {0: other})
        if not isinstance(other, GrassmannElement):
            return NotImplemented
        return self.level == other.level and self._terms == other._terms

    def __hash__(self):
        return hash((self.level, tuple(sorted(self._terms.items()))))

    def inverse_even(self) -> "GrassmannElement":
        """Multiplicative inverse of a body-invertible even element.

        Finite geometric series in the nilpotent part: with x = b + s,
        x^-1 = b^-1 * sum_k (-s/b)^k, which terminates by nilpotency.
        """
        p = self.parity()
        if p is not Parity.EVEN:
            raise ParityError(f"inverse requires an even element, got {p.name}")
        b = self.body
        if b == 0:
            raise ZeroBodyError("element has zero body, no inverse exists")
        binv = Fraction(1, b) if isinstance(b, int) else 1 / b
        ratio = self.soul * (-binv)
        out = GrassmannElement.scalar(1, self.level)
        power = GrassmannElement.scalar(1, self.level)
        while True:
            power = power * ratio
            if power.is_zero():
                break
            out = out + power
        return out * binv

    def one_like(self) -> "GrassmannElement":
        return GrassmannElement.scalar(1, self.level)

    def zero_like(self) -> "GrassmannElement":
        return GrassmannElement.zero(self.level)

    def lift(self, level: int) -> "GrassmannElement":
        """Embed into a larger algebra (identity on terms)."""
        if level < self.level:
            for mask in self._terms:
                if mask >> level:
                    raise LevelBudgetError("cannot lower level below occupied generators")
        return GrassmannElement(level, dict(self._terms), _raw=True)

    def map_coeffs(self, fn) -> "GrassmannElement":
        out = {m: fn(c) for m, c in self._terms.items()}
        return GrassmannElement(self.level, {m: c for m, c in out.items() if c != 0}, _raw=True)

    # -- rendering / parsing -------------------------------------------

    def __repr__(self) -> str:
        return f"<{render(self)} @L{self.level}>"

    def __str__(self) -> str:
        return render(self)

    def json_terms(self) -> list:
        """JSON-friendly term list: [[indices...], "coefficient"] pairs."""
        return [[list(ix.indices), _scalar_str(c)] for ix, c in self.terms()]


def body(x: GrassmannElement) -> Scalar:
    return x.body


def soul(x: GrassmannElement) -> GrassmannElement:
    return x.soul


def parity(x: GrassmannElement) -> Parity:
    return x.parity()


def even_inverse(x: GrassmannElement) -> GrassmannElement:
    return x.inverse_even()


def _scalar_str(c: Scalar) -> str:
    if isinstance(c, float):
        return repr(c)
    return str(c)


def render(x: GrassmannElement) -> str:
    """Canonical text form, e.g. ``"1/2 + 2*s[1] - 1/4*s[1,3]"``."""
    if x.is_zero():
        return "0"
    parts = []
    for ix, coeff in x.terms():
        if ix.bits == 0:
            text = _scalar_str(coeff)
        else:
            word = "s[" + ",".join(str(i) for i in ix.indices) + "]"
            if coeff == 1:
                text = word
            elif coeff == -1:
                text = "-" + word
            else:
                text = f"{_scalar_str(coeff)}*{word}"
        if not parts:
            parts.append(text)
        elif text.startswith("-"):
            parts.append("- " + text[1:])
        else:
            parts.append("+ " + text)
    return " ".join(parts)


_TERM_RE = re.compile(
    r"""^\s*
    (?P<coeff>[+-]?(?:\d+/\d+|\d+\.\d*(?:[eE][+-]?\d+)?|\.\d+(?:[eE][+-]?\d+)?|\d+(?:[eE][+-]?\d+)?))?
    \s*(?P<star>\*)?\s*
    (?:s\[(?P<word>[\d,\s]*)\])?
    \s*$""",
    re.VERBOSE,
)


def _parse_scalar(text: str) -> Scalar:
    if "/" in text:
        num, den = text.split("/")
        return Fraction(int(num), int(den))
    if "." in text or "e" in text or "E" in text:
        return float(text)
    return int(text)


def parse(text: str, level: int = DEFAULT_LEVEL) -> GrassmannElement:
    """Parse the canonical text form back into an element."""
    src = text.strip()
    if not src:
        raise ProblemFormatError("empty element text")
    # split into signed chunks at top level (no nesting to worry about,
    # brackets contain only digits and commas)
    chunks: list[str] = []
    depth = 0
    cur = ""
    for ch in src:
        if ch == "[":
            depth += 1
        elif ch == "]":
            depth -= 1
        if ch in "+-" and depth == 0 and cur.strip() and not cur.rstrip().endswith(("e", "E", "*", "/")):
            chunks.append(cur)
            cur = ch
        else:
            cur += ch
    chunks.append(cur)

    total = GrassmannElement.zero(level)
    for chunk in chunks:
        piece = chunk.strip()
        sign = 1
        while piece and piece[0] in "+-":
            if piece[0] == "-":
                sign = -sign
            piece = piece[1:].strip()
        m = _TERM_RE.match(piece)
        if not m or (m.group("coeff") is None and m.group("word") is None):
            raise ProblemFormatError(f"cannot parse term {chunk!r}")
        coeff: Scalar = _parse_scalar(m.group("coeff")) if m.group("coeff") else 1
        word = m.group("word")
        indices: tuple[int, ...] = ()
        if word is not None and word.strip():
            indices = tuple(int(t) for t in word.replace(" ", "").split(","))
        total = total + GrassmannElement.monomial(sign * coeff, indices, level)
    return total


def anticommutation_sign(a: GrassmannElement, b: GrassmannElement) -> int:
    """(-1)^{|a||b|} for homogeneous a, b (used by grading checks)."""
    pa, pb = a.parity(), b.parity()
    if Parity.MIXED in (pa, pb):
        raise ParityError("anticommutation sign needs homogeneous arguments")
    return -1 if (pa is Parity.ODD and pb is Parity.ODD) else 1


__all__ = [
    "DEFAULT_LEVEL",
    "MAX_LEVEL",
    "GrassmannElement",
    "IndexSet",
    "Parity",
    "Scalar",
    "anticommutation_sign",
    "body",
    "even_inverse",
    "indices_from_mask",
    "mask_from_indices",
    "merge_swaps",
    "parity",
    "parse",
    "render",
    "soul",
    "term_sort_key",
]
