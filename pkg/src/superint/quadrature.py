"""Composite Gauss-Legendre quadrature over intervals and boxes.

Values may be floats or Grassmann elements (anything supporting addition
and multiplication by a float). Node placement is deterministic and the
reduction order is fixed, so results are bit-stable for a given spec.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Callable, Sequence

import numpy as np

from .errors import ToleranceError


@dataclass(frozen=True)
class QuadratureSpec:
    """Rule order, panel count per axis, and absolute tolerance."""

    order: int = 16
    panels: int = 8
    tol: float = 1e-12

    def __post_init__(self):
        if self.order < 2:
            raise ValueError("quadrature order must be at least 2")
        if self.panels < 1:
            raise ValueError("panel count must be positive")
        if not self.tol > 0:
            raise ValueError("tolerance must be positive")


@lru_cache(maxsize=32)
def _leggauss(order: int):
    nodes, weights = np.polynomial.legendre.leggauss(order)
    return tuple(float(x) for x in nodes), tuple(float(w) for w in weights)


def interval_nodes(a: float, b: float, order: int, panels: int) -> list[tuple[float, float]]:
    """Composite (node, weight) pairs on [a, b]."""
    xs, ws = _leggauss(order)
    out = []
    width = (b - a) / panels
    for p in range(panels):
        lo = a + p * width
        mid = lo + width / 2
        half = width / 2
        for x, w in zip(xs, ws):
            out.append((mid + half * x, w * half))
    return out


def _weighted_sum(pairs):
    acc = None
    for value, w in pairs:
        term = value * w
        acc = term if acc is None else acc + term
    return acc if acc is not None else 0.0


def integrate_interval(f: Callable[[float], object], a: float, b: float,
                       spec: QuadratureSpec, *, check_tol: bool = True):
    """Integrate f over [a, b]; optionally verify against doubled panels."""
    value = _weighted_sum((f(t), w) for t, w in interval_nodes(a, b, spec.order, spec.panels))
    if check_tol:
        refined = _weighted_sum(
            (f(t), w) for t, w in interval_nodes(a, b, spec.order, 2 * spec.panels)
        )
        if _deviation(value, refined) > spec.tol:
            raise ToleranceError(
                f"quadrature not converged to {spec.tol} on [{a}, {b}]"
            )
        value = refined
    return value


def box_nodes(box: Sequence[Sequence[float]], order: int, panels: int):
    """Tensor-product (point, weight) pairs over a box."""
    per_axis = [interval_nodes(float(lo), float(hi), order, panels) for lo, hi in box]
    for combo in itertools.product(*per_axis):
        point = tuple(t for t, _ in combo)
        weight = 1.0
        for _, w in combo:
            weight *= w
        yield point, weight


def integrate_box_quad(f: Callable[[tuple], object], box: Sequence,
                       spec: QuadratureSpec, *, check_tol: bool = True):
    """Tensor Gauss-Legendre integral of f over the box."""
    value = _weighted_sum((f(p), w) for p, w in box_nodes(box, spec.order, spec.panels))
    if check_tol:
        refined = _weighted_sum((f(p), w) for p, w in box_nodes(box, spec.order, 2 * spec.panels))
        if _deviation(value, refined) > spec.tol:
            raise ToleranceError(f"quadrature not converged to {spec.tol} on box")
        value = refined
    return value


def _deviation(a, b) -> float:
    diff = a - b
    if hasattr(diff, "max_abs_coeff"):
        return float(diff.max_abs_coeff())
    return abs(float(diff))


__all__ = ["QuadratureSpec", "box_nodes", "integrate_box_quad", "integrate_interval",
           "interval_nodes"]
