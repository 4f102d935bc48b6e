"""Strong Wolfe line search in ascent form, on arbitrary parametrized paths.

The search operates on a one-dimensional restriction phi(t) supplied as a
callable returning (value, slope, point, grad); it never sees the curve
itself, so the same routine serves the curved retraction of the warped
optimizer and the straight rays of the Euclidean baseline.

Conditions, for initial slope g'(0) > 0 (maximization):

    sufficient increase:  g(t) >= g(0) + c1 t g'(0)
    curvature:            |g'(t)| <= c2 g'(0)

Structure is the classic bracket-then-zoom scheme (Nocedal & Wright's
algorithms 3.5/3.6 mirrored through g -> -g), with cubic Hermite
interpolation in the zoom phase and bisection as the safeguard. Non-finite
trial values are treated as failing the sufficient-increase test, so the
bracket shrinks away from them instead of propagating NaNs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .errors import LineSearchFail, NonAscent

__all__ = ["WolfeResult", "strong_wolfe"]

#: phi(t) -> (value, slope, point, gradient-at-point)
PhiFn = Callable[[float], tuple[float, float, np.ndarray, np.ndarray]]


@dataclass(frozen=True, eq=False)
class WolfeResult:
    """An accepted step: parameter t, the path data there, and the number of
    phi evaluations spent."""

    t: float
    value: float
    slope: float
    point: np.ndarray
    grad: np.ndarray
    evals: int


@dataclass(frozen=True, eq=False)
class _Trial:
    t: float
    value: float
    slope: float
    point: np.ndarray | None
    grad: np.ndarray | None


def _cubic_min(a, fa, sa, b, fb, sb):
    """Argmin of the cubic Hermite interpolant of a scalar function with
    values/slopes (fa, sa) at a and (fb, sb) at b; None when degenerate."""
    if a == b:
        return None
    d1 = sa + sb - 3.0 * (fa - fb) / (a - b)
    disc = d1 * d1 - sa * sb
    if not np.isfinite(disc) or disc < 0.0:
        return None
    d2 = math.copysign(math.sqrt(disc), b - a)
    denom = sb - sa + 2.0 * d2
    if denom == 0.0:
        return None
    t = b - (b - a) * (sb + d2 - d1) / denom
    return t if np.isfinite(t) else None


def strong_wolfe(
    phi: PhiFn,
    f0: float,
    slope0: float,
    c1: float = 1e-4,
    c2: float = 0.1,
    t_init: float = 1.0,
    max_evals: int = 60,
    grow: float = 2.0,
) -> WolfeResult:
    """Find t > 0 satisfying the strong Wolfe conditions along phi.

    Raises NonAscent when slope0 <= 0 (there is nothing to search),
    LineSearchFail when the evaluation budget runs out or the zoom interval
    collapses without an acceptable point.
    """
    if not np.isfinite(slope0) or slope0 <= 0.0:
        raise NonAscent(f"initial slope must be positive, got {slope0}")
    if not (t_init > 0.0):
        raise ValueError(f"t_init must be positive, got {t_init}")
    if not (0.0 < c1 < c2 < 1.0):
        raise ValueError(f"need 0 < c1 < c2 < 1, got c1={c1}, c2={c2}")

    evals = 0

    def ev(t: float) -> _Trial:
        nonlocal evals
        if evals >= max_evals:
            raise LineSearchFail(f"line search budget of {max_evals} evaluations exhausted")
        evals += 1
        value, slope, point, grad = phi(t)
        return _Trial(t=t, value=value, slope=slope, point=point, grad=grad)

    def sufficient(tr: _Trial) -> bool:
        return np.isfinite(tr.value) and tr.value >= f0 + c1 * tr.t * slope0

    def accepted(tr: _Trial) -> WolfeResult:
        return WolfeResult(
            t=tr.t, value=tr.value, slope=tr.slope, point=tr.point, grad=tr.grad, evals=evals
        )

    def zoom(lo: _Trial, hi: _Trial) -> WolfeResult:
        # Invariants: lo satisfies the sufficient-increase condition, its
        # value is the best so far, and the interval brackets a Wolfe point.
        while True:
            width = abs(hi.t - lo.t)
            if width <= 1e-14 * max(1.0, abs(lo.t)):
                raise LineSearchFail("zoom interval collapsed without a Wolfe point")
            t = None
            if np.isfinite(hi.value) and np.isfinite(hi.slope):
                t = _cubic_min(lo.t, -lo.value, -lo.slope, hi.t, -hi.value, -hi.slope)
            left, right = min(lo.t, hi.t), max(lo.t, hi.t)
            margin = 0.1 * width
            if t is None or not (left + margin <= t <= right - margin):
                t = 0.5 * (lo.t + hi.t)
            tr = ev(t)
            if not sufficient(tr) or tr.value <= lo.value:
                hi = tr
            else:
                if np.isfinite(tr.slope) and abs(tr.slope) <= c2 * slope0:
                    return accepted(tr)
                if tr.slope * (hi.t - lo.t) <= 0.0:
                    hi = lo
                lo = tr

    prev = _Trial(t=0.0, value=f0, slope=slope0, point=None, grad=None)
    t = t_init
    first = True
    while True:
        tr = ev(t)
        if not sufficient(tr) or (not first and tr.value <= prev.value):
            return zoom(prev, tr)
        if np.isfinite(tr.slope) and abs(tr.slope) <= c2 * slope0:
            return accepted(tr)
        if tr.slope <= 0.0:
            # Crest passed: the maximum lies between the previous point and
            # this one, with the current point the higher shoulder.
            return zoom(tr, prev)
        prev = tr
        t *= grow
        first = False
