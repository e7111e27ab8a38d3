"""Problem-file parsing (TOML) and deterministic JSON reporting.

A problem file names one integral to evaluate: a direct even x odd
integral, a contour integral along a path, or an integral over a
foliated singular manifold. Functions are tables of odd-multi-index
entries whose coefficients are monomial lists; scalars may be written
as strings ("3/2") to stay exact. See problems/ in the repository root
for annotated examples of the input and output schemas.
"""

from __future__ import annotations

import json
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib as _toml
else:
    import tomli as _toml

from .algebra import DEFAULT_LEVEL, GrassmannElement, Scalar, mask_from_indices
from .algebra import parse as alg_parse
from .contour import Path, QuadratureSpec
from .errors import ProblemFormatError
from .supermatrix import EvenSuperMatrix
from .supersmooth import SuperDomain, SuperMap, SupersmoothFn
from .vvintegral import FoliatedManifold, ParameterSet


def _scalar_from(value) -> Scalar:
    if isinstance(value, bool):
        raise ProblemFormatError("booleans are not scalars")
    if isinstance(value, int):
        return value
    if isinstance(value, float):
        return value
    if isinstance(value, str):
        text = value.strip()
        if "/" in text:
            num, den = text.split("/")
            return Fraction(int(num), int(den))
        try:
            return int(text)
        except ValueError:
            return float(text)
    raise ProblemFormatError(f"cannot read scalar {value!r}")


def parse_function(table: Mapping, level: int) -> SupersmoothFn:
    """Read a function table: m, n, and a list of term entries.

    Each term entry carries ``odd`` (0/1 list over the odd variables),
    ``powers`` (exponents of the even variables), and either ``coeff``
    (scalar or exact string) with an optional ``sigma`` generator word,
    or ``element`` (a Grassmann constant in the canonical text form,
    e.g. ``"1/2 + 2*s[1,3]"``).
    """
    try:
        m = int(table["m"])
        n = int(table["n"])
        entries = table["terms"]
    except KeyError as e:
        raise ProblemFormatError(f"function table misses key {e}") from e
    terms: dict = {}
    for entry in entries:
        odd = tuple(int(b) for b in entry.get("odd", [0] * n))
        if len(odd) != n or any(b not in (0, 1) for b in odd):
            raise ProblemFormatError(f"bad odd multi-index {odd}")
        powers = tuple(int(p) for p in entry.get("powers", [0] * m))
        if len(powers) != m:
            raise ProblemFormatError(f"bad exponent list {powers}")
        if "element" in entry:
            const = alg_parse(str(entry["element"]), level)
            fn = SupersmoothFn(m, 0, level, terms={
                (powers, ix.bits): c for ix, c in const.terms()})
        else:
            coeff = _scalar_from(entry.get("coeff", 1))
            sigma = tuple(int(i) for i in entry.get("sigma", ()))
            fn = SupersmoothFn(m, 0, level,
                               terms={(powers, mask_from_indices(sigma, level)): coeff})
        key = tuple(odd)
        if key in terms:
            terms[key] = terms[key] + fn
        else:
            terms[key] = fn
    return SupersmoothFn.from_odd_coeffs(m, n, level, terms)


def parse_map(table: Mapping, level: int, dims: tuple[int, int] | None = None) -> SuperMap:
    """Read a map table: either component lists or a constant matrix.

    ``even``/``odd`` list function tables per component; alternatively a
    ``matrix`` of canonical element strings (row-vector convention: the
    map is (x, theta) = (y, omega) M) with explicit ``m`` and ``n``.
    """
    if "matrix" in table:
        try:
            m = int(table["m"])
            n = int(table["n"])
        except KeyError as e:
            raise ProblemFormatError("matrix maps need explicit m and n") from e
        rows = [[alg_parse(str(cell), level) for cell in row] for row in table["matrix"]]
        if len(rows) != m + n or any(len(r) != m + n for r in rows):
            raise ProblemFormatError(f"matrix must be {(m + n)}x{(m + n)}")
        return SuperMap.linear(EvenSuperMatrix.from_rows(rows, m, n), level)
    evens = [parse_function(t, level) for t in table.get("even", [])]
    odds = [parse_function(t, level) for t in table.get("odd", [])]
    if not evens and not odds:
        raise ProblemFormatError("map table has no components")
    return SuperMap(even=tuple(evens), odd=tuple(odds))


def parse_domain(table: Mapping) -> SuperDomain:
    box = table.get("box")
    if not box:
        raise ProblemFormatError("domain table needs a box")
    parsed = [(_scalar_from(lo), _scalar_from(hi)) for lo, hi in box]
    return SuperDomain.from_box(parsed, int(table.get("odd", 0)))


def parse_quadrature(table: Mapping | None) -> QuadratureSpec:
    table = table or {}
    return QuadratureSpec(
        order=int(table.get("order", 16)),
        panels=int(table.get("panels", 8)),
        tol=float(table.get("tol", 1e-12)),
    )


@dataclass(frozen=True)
class ProblemSpec:
    """A parsed problem file."""

    mode: str
    level: int
    seed: int
    function: SupersmoothFn
    domain: SuperDomain | None = None
    manifold: FoliatedManifold | None = None
    path: Path | None = None
    map: SuperMap | None = None
    map_inverse: SuperMap | None = None
    quad: QuadratureSpec | None = None
    raw: dict = field(default_factory=dict, repr=False)

    @classmethod
    def from_file(cls, path) -> "ProblemSpec":
        with open(path, "rb") as fh:
            try:
                data = _toml.load(fh)
            except _toml.TOMLDecodeError as e:
                raise ProblemFormatError(f"problem file does not parse: {e}") from e
        return cls.from_dict(data)

    @classmethod
    def from_dict(cls, data: Mapping) -> "ProblemSpec":
        mode = data.get("mode")
        if mode not in ("naive", "contour", "vv", "cvf"):
            raise ProblemFormatError(
                f"mode must be naive, contour, vv or cvf, got {mode!r}")
        level = int(data.get("level", DEFAULT_LEVEL))
        seed = int(data.get("seed", 0))
        if "function" not in data:
            raise ProblemFormatError("problem needs a [function] table")
        fn = parse_function(data["function"], level)
        quad = parse_quadrature(data.get("quad")) if "quad" in data else None

        domain = parse_domain(data["domain"]) if "domain" in data else None
        manifold = None
        path = None
        phi = phi_inv = None
        if mode in ("vv", "cvf"):
            if domain is None:
                raise ProblemFormatError(f"{mode} mode needs a [domain] table")
            params = ParameterSet.from_box(domain.box, fn.n)
            if "manifold" in data:
                gamma = parse_map(data["manifold"], level)
            else:
                gamma = SuperMap.identity(fn.m, fn.n, level)
            manifold = FoliatedManifold(params, gamma)
            if mode == "cvf":
                if "map" not in data or "map_inverse" not in data:
                    raise ProblemFormatError(
                        "cvf mode needs [map] and [map_inverse] tables")
                phi = parse_map(data["map"], level)
                phi_inv = parse_map(data["map_inverse"], level)
        elif mode == "contour":
            ptab = data.get("path")
            if not ptab:
                raise ProblemFormatError("contour mode needs a [path] table")
            lo, hi = (_scalar_from(v) for v in ptab["interval"])
            comp = parse_function(ptab["component"], level)
            path = Path.from_polynomial(lo, hi, comp)
        elif domain is None:
            raise ProblemFormatError("naive mode needs a [domain] table")
        return cls(mode=mode, level=level, seed=seed, function=fn, domain=domain,
                   manifold=manifold, path=path, map=phi, map_inverse=phi_inv,
                   quad=quad, raw=dict(data))


class _PolyParser:
    """Recursive-descent parser for one-variable polynomial expressions.

    Grammar: sums/differences of products of powers of atoms; atoms are
    rationals (``3``, ``3/2``, ``0.25``), the variable, or parenthesized
    subexpressions. ``^`` and ``**`` both raise to integer powers.
    """

    def __init__(self, text: str, var: str, level: int):
        self.text = text
        self.pos = 0
        self.var = var
        self.level = level

    def parse(self) -> SupersmoothFn:
        value = self._expr()
        self._skip()
        if self.pos != len(self.text):
            raise ProblemFormatError(
                f"trailing input in polynomial at {self.text[self.pos:]!r}")
        return value

    def _skip(self):
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def _peek(self) -> str:
        self._skip()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def _expr(self) -> SupersmoothFn:
        value = self._term()
        while self._peek() in ("+", "-"):
            op = self.text[self.pos]
            self.pos += 1
            rhs = self._term()
            value = value + rhs if op == "+" else value - rhs
        return value

    def _term(self) -> SupersmoothFn:
        value = self._factor()
        while True:
            ch = self._peek()
            if ch == "*" and not self.text[self.pos:self.pos + 2] == "**":
                self.pos += 1
                value = value * self._factor()
            else:
                return value

    def _factor(self) -> SupersmoothFn:
        base = self._atom()
        ch = self._peek()
        if ch == "^" or self.text[self.pos:self.pos + 2] == "**":
            self.pos += 1 if ch == "^" else 2
            self._skip()
            start = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if start == self.pos:
                raise ProblemFormatError("exponent must be a nonnegative integer")
            return base ** int(self.text[start:self.pos])
        return base

    def _atom(self) -> SupersmoothFn:
        ch = self._peek()
        if ch == "-":
            self.pos += 1
            return -self._atom()
        if ch == "+":
            self.pos += 1
            return self._atom()
        if ch == "(":
            self.pos += 1
            value = self._expr()
            if self._peek() != ")":
                raise ProblemFormatError("unbalanced parenthesis in polynomial")
            self.pos += 1
            return value
        if self.text[self.pos:self.pos + len(self.var)] == self.var:
            self.pos += len(self.var)
            return SupersmoothFn.coordinate(1, 1, 0, self.level)
        start = self.pos
        while self.pos < len(self.text) and (self.text[self.pos].isdigit()
                                             or self.text[self.pos] == "."):
            self.pos += 1
        if start == self.pos:
            raise ProblemFormatError(
                f"cannot read polynomial at {self.text[start:]!r}")
        literal = self.text[start:self.pos]
        if self._peek() == "/":
            save = self.pos
            self.pos += 1
            dstart = self.pos
            while self.pos < len(self.text) and self.text[self.pos].isdigit():
                self.pos += 1
            if dstart == self.pos:
                self.pos = save
            else:
                frac = Fraction(int(literal), int(self.text[dstart:self.pos]))
                return SupersmoothFn.constant(frac, 1, 0, self.level)
        value: Scalar = float(literal) if "." in literal else int(literal)
        return SupersmoothFn.constant(value, 1, 0, self.level)


def parse_poly_expr(text: str, level: int, var: str = "q") -> SupersmoothFn:
    """Parse a one-variable polynomial expression such as ``2*q^2 - 1/3``."""
    return _PolyParser(text, var, level).parse()


def element_to_json(x: GrassmannElement) -> list:
    return x.json_terms()


def dump_report(report: Any) -> str:
    """Canonical JSON rendering: sorted keys, no whitespace drift, so a
    fixed input yields byte-identical bytes."""
    return json.dumps(report, sort_keys=True, separators=(",", ": "), indent=1) + "\n"


__all__ = [
    "ProblemSpec",
    "dump_report",
    "element_to_json",
    "parse_domain",
    "parse_function",
    "parse_map",
    "parse_quadrature",
]
