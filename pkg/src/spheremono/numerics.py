"""Numerical kernels: bracketed root isolation, endpoint-singular quadrature
and limit extrapolation of sequences sampled along a geometric grid."""

from __future__ import annotations

import heapq
import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import NonConvergent, TooManySignChanges, ToleranceNotMet

__all__ = [
    "find_roots",
    "bisect",
    "adaptive_quad",
    "SingularIntegral",
    "integrate_singular",
    "LimitEstimate",
    "extrapolate_limit",
    "richardson",
]

_EPS = np.finfo(float).eps


def _evaluate(f, x):
    try:
        y = np.asarray(f(x), dtype=float)
        if y.shape == x.shape:
            return y
    except (TypeError, ValueError):
        pass
    return np.array([float(f(xi)) for xi in x])


def bisect(f, lo, hi, flo=None, xtol=0.0, max_iter=200):
    """Shrink a sign-change bracket ``[lo, hi]`` of ``f``.

    Iterates until the bracket is narrower than ``xtol`` or cannot be split
    any further in floating point (``xtol=0`` means full machine precision).
    Returns ``(lo, hi, f(lo), f(hi))``.
    """
    if flo is None:
        flo = float(f(lo))
    fhi = float(f(hi))
    if flo == 0.0:
        return lo, lo, flo, flo
    if fhi == 0.0:
        return hi, hi, fhi, fhi
    if np.sign(flo) == np.sign(fhi):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]")
    for _ in range(max_iter):
        if hi - lo <= xtol:
            break
        mid = 0.5 * (lo + hi)
        if not lo < mid < hi:
            break
        fmid = float(f(mid))
        if fmid == 0.0:
            return mid, mid, 0.0, 0.0
        if np.sign(fmid) == np.sign(flo):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
    return lo, hi, flo, fhi


def find_roots(
    f: Callable,
    a: float,
    b: float,
    grid_n: int = 2048,
    tol: float = 1e-13,
    max_brackets: int = 64,
) -> list[float]:
    """Roots of ``f`` on ``[a, b]`` by uniform sampling and bisection.

    ``f`` is sampled on ``grid_n`` equally spaced points (vectorised if
    ``f`` accepts arrays); grid nodes where ``f`` vanishes exactly are roots,
    and every sign change between neighbours is refined by bisection to
    ``tol``. Infinite samples count with their sign, NaNs are skipped.
    Roots closer together than the grid spacing may be missed.
    """
    if grid_n < 2:
        raise ValueError("grid_n must be >= 2")
    if not a < b:
        raise ValueError("need a < b")
    x = np.linspace(a, b, grid_n)
    y = _evaluate(f, x)
    roots = [float(xi) for xi, yi in zip(x, y) if yi == 0.0]
    s = np.sign(y)
    idx = np.flatnonzero((s[:-1] * s[1:]) < 0)
    if len(idx) > max_brackets:
        raise TooManySignChanges(f"{len(idx)} sign changes on [{a}, {b}]")
    for i in idx:
        lo, hi, _, _ = bisect(f, x[i], x[i + 1], flo=y[i], xtol=tol)
        roots.append(0.5 * (lo + hi))
    return sorted(set(roots))


# Gauss-Kronrod 7/15 abscissae and weights (QUADPACK qk15).
_XGK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.0,
])
_WGK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XGK[:-1], _XGK[::-1]])
_KRONROD = np.concatenate([_WGK[:-1], _WGK[::-1]])
_GAUSS = np.zeros(15)
_GAUSS[[1, 3, 5, 7, 9, 11, 13]] = np.concatenate([_WG[:-1], _WG[::-1]])


def _gk15(f, a, b):
    half = 0.5 * (b - a)
    center = 0.5 * (a + b)
    fx = _evaluate(f, center + half * _NODES)
    k15 = half * np.dot(_KRONROD, fx)
    g7 = half * np.dot(_GAUSS, fx)
    resabs = abs(half) * np.dot(_KRONROD, np.abs(fx))
    mean = k15 / (2 * half) if half else 0.0
    resasc = abs(half) * np.dot(_KRONROD, np.abs(fx - mean))
    err = abs(k15 - g7)
    if resasc != 0.0 and err != 0.0:
        err = resasc * min(1.0, (200.0 * err / resasc) ** 1.5)
    if resabs > np.finfo(float).tiny / (50 * _EPS):
        err = max(50 * _EPS * resabs, err)
    return float(k15), float(err)


def adaptive_quad(f, a, b, tol=1e-10, atol=1e-15, max_depth=40, max_intervals=20000):
    """Globally adaptive Gauss-Kronrod quadrature by interval halving.

    The interval with the largest error estimate is bisected until the
    summed estimate drops below ``max(tol * |I|, atol)``. Raises
    ``ToleranceNotMet`` when an interval at depth ``max_depth`` would
    need another split.

    Returns ``(integral, error_estimate)``.
    """
    if a == b:
        return 0.0, 0.0
    val, err = _gk15(f, a, b)
    if not (math.isfinite(val) and math.isfinite(err)):
        raise ToleranceNotMet(f"non-finite integrand on [{a}, {b}]", val, err)
    heap = [(-err, a, b, 0, val)]
    total, total_err = val, err
    n = 1
    while total_err > max(tol * abs(total), atol):
        neg_err, lo, hi, depth, v = heapq.heappop(heap)
        if depth >= max_depth or n >= max_intervals:
            raise ToleranceNotMet(
                f"quadrature depth cap reached (error {total_err:.3g})", total, total_err
            )
        mid = 0.5 * (lo + hi)
        v1, e1 = _gk15(f, lo, mid)
        v2, e2 = _gk15(f, mid, hi)
        if not all(map(math.isfinite, (v1, v2, e1, e2))):
            raise ToleranceNotMet(f"non-finite integrand near [{lo}, {hi}]", total, total_err)
        total += v1 + v2 - v
        total_err += e1 + e2 + neg_err
        heapq.heappush(heap, (-e1, lo, mid, depth + 1, v1))
        heapq.heappush(heap, (-e2, mid, hi, depth + 1, v2))
        n += 1
        if n % 64 == 0:
            total = math.fsum(item[4] for item in heap)
            total_err = math.fsum(-item[0] for item in heap)
    return math.fsum(item[4] for item in heap), math.fsum(-item[0] for item in heap)


@dataclass(frozen=True)
class SingularIntegral:
    """Integration interval with optional inverse-power endpoint singularities.

    The integrand is assumed to behave like ``|x - end|**(-gamma)`` at each
    flagged endpoint.
    """

    lower: float
    upper: float
    singular_at_lower: bool = True
    singular_at_upper: bool = True
    gamma: float = 0.5
    tol: float = 1e-10

    def __post_init__(self):
        if not self.lower < self.upper:
            raise ValueError("need lower < upper")
        if not 0.0 <= self.gamma < 1.0:
            raise ValueError("gamma must lie in [0, 1)")


def integrate_singular(g: Callable, spec: SingularIntegral, max_depth: int = 40) -> float:
    """Integrate ``g`` over ``[spec.lower, spec.upper]``.

    The interval is split at its midpoint ``c``. A flagged lower endpoint
    is removed by ``x = a + t**p`` on ``[a, c]``, a flagged upper endpoint
    by ``x = b - t**p`` on ``[c, b]``, with ``p = 1 / (1 - gamma)``; for
    ``gamma = 1/2`` this is ``x = a + t**2`` with ``dx = 2 t dt``. Each
    piece is then integrated with :func:`adaptive_quad` at ``spec.tol``.
    """
    a, b = spec.lower, spec.upper
    c = 0.5 * (a + b)
    p = 1.0 / (1.0 - spec.gamma)
    q = spec.gamma / (1.0 - spec.gamma)

    def lower_piece(t):
        return p * t**q * g(a + t**p)

    def upper_piece(t):
        return p * t**q * g(b - t**p)

    total = 0.0
    if spec.singular_at_lower:
        total += adaptive_quad(lower_piece, 0.0, (c - a) ** (1.0 - spec.gamma),
                               tol=spec.tol, max_depth=max_depth)[0]
    else:
        total += adaptive_quad(g, a, c, tol=spec.tol, max_depth=max_depth)[0]
    if spec.singular_at_upper:
        total += adaptive_quad(upper_piece, 0.0, (b - c) ** (1.0 - spec.gamma),
                               tol=spec.tol, max_depth=max_depth)[0]
    else:
        total += adaptive_quad(g, c, b, tol=spec.tol, max_depth=max_depth)[0]
    return total


@dataclass(frozen=True)
class LimitEstimate:
    value: float
    uncertainty: float
    converged: bool
    samples_used: int


def richardson(samples: Sequence[tuple[float, float]]) -> list[float]:
    """Pairwise Richardson estimates assuming an error linear in ``j``."""
    out = []
    for (j0, v0), (j1, v1) in zip(samples[:-1], samples[1:]):
        out.append((j0 * v1 - j1 * v0) / (j0 - j1))
    return out


def extrapolate_limit(
    samples: Sequence[tuple[float, float]],
    step_tol: float = 1e-4,
    integer_band: float | None = 1e-2,
    strict: bool = True,
) -> LimitEstimate:
    """Estimate ``lim value(j)`` as ``j -> 0+`` from samples ordered by decreasing ``j``.

    Consecutive samples are combined by linear Richardson extrapolation; the
    final combined value is the estimate and the change between the last two
    combined values is its uncertainty. The estimate is converged when that
    change is below ``step_tol`` and, if ``integer_band`` is given, the value
    lies within ``integer_band`` of an integer.

    With ``strict`` a failed estimate raises ``NonConvergent``.
    """
    samples = [(float(j), float(v)) for j, v in samples]
    if len(samples) < 4:
        raise ValueError("need at least 4 samples")
    js = np.array([s[0] for s in samples])
    if np.any(js <= 0) or np.any(np.diff(js) >= 0):
        raise ValueError("j must be positive and strictly decreasing")
    if not all(math.isfinite(v) for _, v in samples):
        raise NonConvergent("non-finite sample")
    acc = richardson(samples)
    value = acc[-1]
    uncertainty = abs(acc[-1] - acc[-2])
    converged = uncertainty < step_tol
    if integer_band is not None:
        converged = converged and abs(value - round(value)) < integer_band
    est = LimitEstimate(value, uncertainty, bool(converged), len(samples))
    if strict and not converged:
        raise NonConvergent(
            f"limit estimate {value:.6g} +/- {uncertainty:.2g} did not converge", est
        )
    return est
