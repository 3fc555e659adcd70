"""Azimuthally symmetric potentials ``V(theta) = sum_k c_k cos(theta)**k``.

All algebra is carried out in ``x = cos(theta)``. The modified potential
for azimuthal momentum ``j`` is ``V_j = j**2 / (2 sin(theta)**2) + V``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping

import numpy as np
from numpy.polynomial import Polynomial
from numpy.polynomial.polynomial import polyder, polyval

from .errors import ConfigError, DegenerateCritical, PoleSingularity
from .numerics import find_roots

__all__ = [
    "Potential",
    "CriticalPoint",
    "modified_potential",
    "modified_potential_d2",
    "singular_poly",
    "critical_points",
    "ROOT_GRID",
    "ROOT_TOL",
    "DEGENERATE_TOL",
]

ROOT_GRID = 2048
ROOT_TOL = 1e-13
DEGENERATE_TOL = 1e-8


@dataclass(frozen=True)
class Potential:
    """``V(theta) = sum_{k=1..N} coeffs[k-1] * cos(theta)**k``."""

    coeffs: tuple[float, ...]

    def __post_init__(self):
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ConfigError("a potential needs at least one coefficient")
        if not all(math.isfinite(c) for c in coeffs):
            raise ConfigError("coefficients must be finite")
        if not any(coeffs):
            raise ConfigError("the potential must not be constant")
        object.__setattr__(self, "coeffs", coeffs)

    @classmethod
    def from_generic(cls, omega=0.0, eta=0.0, lam=0.0) -> "Potential":
        """``V = -omega cos - eta cos**2 - lam cos**3``."""
        coeffs = [-omega, -eta, -lam]
        while len(coeffs) > 1 and coeffs[-1] == 0:
            coeffs.pop()
        return cls(tuple(0.0 if c == 0 else c for c in coeffs))

    @classmethod
    def from_mapping(cls, cfg: Mapping) -> "Potential":
        """Build from ``coeffs`` or from ``omega``/``eta``/``lambda`` (exclusive)."""
        shorthand = {k: cfg[k] for k in ("omega", "eta", "lambda") if cfg.get(k) is not None}
        coeffs = cfg.get("coeffs")
        if coeffs is not None and shorthand:
            raise ConfigError("'coeffs' and omega/eta/lambda are mutually exclusive")
        if coeffs is not None:
            if isinstance(coeffs, (int, float)):
                coeffs = [coeffs]
            try:
                return cls(tuple(float(c) for c in coeffs))
            except (TypeError, ValueError) as exc:
                raise ConfigError(f"bad coeffs: {coeffs!r}") from exc
        if not shorthand:
            raise ConfigError("no potential given (need coeffs or omega/eta/lambda)")
        try:
            vals = {k: float(v) for k, v in shorthand.items()}
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"bad potential parameters: {shorthand!r}") from exc
        return cls.from_generic(vals.get("omega", 0.0), vals.get("eta", 0.0), vals.get("lambda", 0.0))

    @property
    def poly(self) -> Polynomial:
        return Polynomial(self._c0)

    @cached_property
    def _c0(self):
        return np.array((0.0,) + self.coeffs)

    @cached_property
    def _c1(self):
        return polyder(self._c0)

    @cached_property
    def _c2(self):
        return polyder(self._c0, 2)

    @cached_property
    def reflected(self) -> "Potential":
        """The potential seen from the south pole: ``V(pi - theta)``."""
        return Potential(tuple(c if k % 2 == 0 else -c for k, c in enumerate(self.coeffs, start=1)))

    def label(self) -> str:
        return "coeffs=[" + ",".join(f"{c:g}" for c in self.coeffs) + "]"

    def of_x(self, x):
        return polyval(x, self._c0)

    def dx(self, x):
        """``dV/dx`` at ``x = cos(theta)``."""
        return polyval(x, self._c1)

    def __call__(self, theta):
        return polyval(np.cos(theta), self._c0)

    def dtheta(self, theta):
        return -np.sin(theta) * self.dx(np.cos(theta))

    def d2theta(self, theta):
        x = np.cos(theta)
        return -x * self.dx(x) + np.sin(theta) ** 2 * polyval(x, self._c2)


@dataclass(frozen=True)
class CriticalPoint:
    x: float
    theta: float
    h_crit: float
    kind: str  # "minimum" | "maximum" | "degenerate"
    curvature: float


def modified_potential(pot: Potential, theta, j: float, derivative_order: int = 0):
    """``V_j(theta)`` or ``dV_j/dtheta``.

    Raises ``PoleSingularity`` when ``j != 0`` and a pole is requested.
    """
    theta_arr = np.asarray(theta, dtype=float)
    if j != 0 and np.any((theta_arr <= 0.0) | (theta_arr >= math.pi)):
        raise PoleSingularity("V_j is singular at the poles for j != 0")
    s = np.sin(theta_arr)
    if derivative_order == 0:
        out = pot(theta_arr) if j == 0 else 0.5 * j * j / s**2 + pot(theta_arr)
    elif derivative_order == 1:
        out = pot.dtheta(theta_arr)
        if j != 0:
            out = out - j * j * np.cos(theta_arr) / s**3
    else:
        raise ValueError("derivative_order must be 0 or 1")
    return out if np.ndim(out) else float(out)


def modified_potential_d2(pot: Potential, theta, j: float):
    theta = np.asarray(theta, dtype=float)
    out = pot.d2theta(theta)
    if j != 0:
        out = out + j * j * (1 + 2 * np.cos(theta) ** 2) / np.sin(theta) ** 4
    return out if np.ndim(out) else float(out)


def singular_poly(pot: Potential, j: float) -> Polynomial:
    """``S(x) = -V'(x) (1 - x**2)**2 - j**2 x``.

    Its roots in ``[-1, 1]`` are the critical points of ``V_j`` in ``x``.
    """
    one_minus = Polynomial([1.0, 0.0, -1.0])
    return -pot.poly.deriv() * one_minus**2 - Polynomial([0.0, j * j])


def _singular_eval(pot: Potential, j: float):
    # factored form keeps the j = 0 double roots at x = +-1 exact
    jj = j * j

    def s(x):
        return -pot.dx(x) * (1.0 - x * x) ** 2 - jj * x

    return s


def _h_at(pot, x, j):
    if j == 0:
        return float(pot.of_x(x))
    return float(0.5 * j * j / (1 - x * x) + pot.of_x(x))


def critical_points(pot: Potential, j: float, grid_n: int = ROOT_GRID,
                    tol: float = ROOT_TOL) -> list[CriticalPoint]:
    """Critical points of ``V_j`` sorted by ``x``.

    At ``j = 0`` the poles ``x = +-1`` are always included. A root whose
    curvature ``|V_j''|`` is below ``DEGENERATE_TOL`` is reported with
    ``kind = "degenerate"`` and a ``DegenerateCritical`` warning.
    """
    out = []
    for x in find_roots(_singular_eval(pot, j), -1.0, 1.0, grid_n=grid_n, tol=tol):
        if j != 0 and abs(x) >= 1.0:
            continue
        theta = math.acos(max(-1.0, min(1.0, x)))
        if j == 0 and abs(x) == 1.0:
            curv = float(-x * pot.dx(x))
        else:
            curv = modified_potential_d2(pot, theta, j)
        if abs(curv) < DEGENERATE_TOL:
            kind = "degenerate"
            warnings.warn(f"degenerate critical point at x={x:.12g}, j={j:g}", DegenerateCritical)
        else:
            kind = "minimum" if curv > 0 else "maximum"
        out.append(CriticalPoint(x=float(x), theta=theta, h_crit=_h_at(pot, x, j), kind=kind, curvature=curv))
    return out
