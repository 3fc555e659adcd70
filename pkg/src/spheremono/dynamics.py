"""Orbit structure of the reduced radial motion at fixed ``(h, j)``.

The radial motion obeys ``p_theta**2 / 2 + V_j(theta) = h``. Its closed
orbits (branches) are the connected components of ``{V_j < h}``; at
``j = 0`` a component may touch a pole, where the orbit reflects.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import minimize_scalar

from .errors import CriticalValue, IntegrationFailure, NoOrbit, SectionNotFound
from .numerics import SingularIntegral, bisect, integrate_singular
from .potential import CriticalPoint, Potential, critical_points, modified_potential

__all__ = [
    "CRITICAL_TOL",
    "OrbitBranch",
    "PhaseState",
    "TrajectoryRecord",
    "branches",
    "branch_count",
    "branch_integral",
    "period_T",
    "period_hat",
    "hamiltonian",
    "trajectory_oracle",
]

CRITICAL_TOL = 1e-9


@dataclass(frozen=True)
class OrbitBranch:
    """One closed orbit: ``V_j < h`` on ``]alpha_minus, alpha_plus[``.

    ``psi_plus`` is ``pi - alpha_plus`` carried at full relative precision,
    which matters when the orbit turns within ~``j`` of the south pole.
    """

    alpha_minus: float
    alpha_plus: float
    open_left: bool = False
    open_right: bool = False
    index: int = 0
    psi_plus: float | None = None

    @property
    def upper_gap(self) -> float:
        return math.pi - self.alpha_plus if self.psi_plus is None else self.psi_plus

    @property
    def closed(self) -> bool:
        return not (self.open_left or self.open_right)

    def contains(self, theta: float) -> bool:
        return self.alpha_minus <= theta <= self.alpha_plus

    def overlap(self, other: "OrbitBranch") -> float:
        return min(self.alpha_plus, other.alpha_plus) - max(self.alpha_minus, other.alpha_minus)


class PhaseState(NamedTuple):
    theta: float
    p_theta: float
    phi: float
    p_phi: float


@dataclass
class TrajectoryRecord:
    times: np.ndarray
    states: np.ndarray  # columns theta, p_theta, phi, p_phi
    period: float
    delta_phi: float
    energy_drift: float
    section_times: tuple[float, float]

    def state(self, i: int) -> PhaseState:
        return PhaseState(*map(float, self.states[i]))


def hamiltonian(pot: Potential, state) -> float:
    theta, p_theta, _, p_phi = state
    return 0.5 * (p_theta**2 + p_phi**2 / math.sin(theta) ** 2) + float(pot(theta))


def _shifted(pot, h, j):
    """``V_j(theta) - h``, extended by ``+inf`` at the poles when ``j != 0``."""

    def f(theta):
        if j != 0 and (theta <= 0.0 or theta >= math.pi):
            return math.inf
        return modified_potential(pot, theta, j) - h

    return f


def _check_energy(h, j, crit: list[CriticalPoint]):
    for c in crit:
        if abs(h - c.h_crit) < CRITICAL_TOL:
            raise CriticalValue(f"h={h!r} is a critical value of V_j at j={j!r} (x={c.x:.6g})")
    lowest = min(c.h_crit for c in crit)
    if h < lowest:
        raise NoOrbit(f"h={h!r} lies below min V_j = {lowest!r} at j={j!r}")


def _nodes(pot, h, j, crit):
    interior = sorted((c.theta, math.acos(-c.x)) for c in crit if 0.0 < c.theta < math.pi)
    nodes = [(0.0, math.pi)] + interior + [(math.pi, 0.0)]
    f = _shifted(pot, h, j)
    return [n[0] for n in nodes], [f(n[0]) for n in nodes], f, [n[1] for n in nodes]


def branch_count(pot: Potential, h: float, j: float, crit=None) -> int:
    """Number of components of ``{V_j < h}`` without locating turning points."""
    if crit is None:
        crit = critical_points(pot, j)
    _check_energy(h, j, crit)
    _, vals, _, _ = _nodes(pot, h, j, crit)
    neg = [v < 0 for v in vals]
    return int(neg[0]) + sum(1 for a, b in zip(neg[:-1], neg[1:]) if b and not a)


def branches(pot: Potential, h: float, j: float, crit=None) -> list[OrbitBranch]:
    """Closed orbits at the regular value ``(h, j)``, ordered by ``alpha_minus``.

    Between consecutive critical points ``V_j`` is monotone, so each sign
    change of ``V_j - h`` there holds exactly one turning point; it is
    bisected to machine precision and the bracket end lying inside the
    orbit is kept, which guarantees ``h - V_j >= 0`` on the branch.
    """
    if crit is None:
        crit = critical_points(pot, j)
    _check_energy(h, j, crit)
    nodes, vals, f, psis = _nodes(pot, h, j, crit)
    f_refl = _shifted(pot.reflected, h, j)

    out = []
    start = 0.0 if vals[0] < 0 else None
    for i in range(len(nodes) - 1):
        lo, hi, flo, fhi = nodes[i], nodes[i + 1], vals[i], vals[i + 1]
        if (flo < 0) == (fhi < 0):
            continue
        blo, bhi, _, _ = bisect(f, lo, hi, flo=flo)
        if flo > 0:
            start = bhi
        else:
            psi = None
            if blo > 0.5 * math.pi:
                # redo in psi = pi - theta, keeping the point inside the orbit
                _, psi, _, _ = bisect(f_refl, psis[i + 1], psis[i])
                blo = math.pi - psi
            out.append(OrbitBranch(start, blo, open_left=start == 0.0, index=len(out), psi_plus=psi))
            start = None
    if start is not None:
        out.append(OrbitBranch(start, math.pi, open_left=start == 0.0, open_right=True,
                               index=len(out), psi_plus=0.0))
    if not out:
        raise NoOrbit(f"no orbit at h={h!r}, j={j!r}")
    return out


def _kinetic_from(pot: Potential, h: float, j: float, base: float):
    """``delta -> 2 (h - V_j(base + delta))`` without cancellation near ``base``.

    ``V_j(base) - V_j(base + delta)`` is evaluated in factored form
    ``(x0 - x1) * Q(x0, x1)`` with ``x0 - x1 = 2 sin(base + delta/2) sin(delta/2)``,
    so the kinetic term keeps full relative precision as ``delta -> 0``.
    """
    x0, s0 = math.cos(base), math.sin(base)
    r0 = h - modified_potential(pot, base, j) if (j == 0 or 0.0 < base < math.pi) else math.nan
    jj = j * j

    def kin(delta):
        t = base + delta
        x1, s1 = np.cos(t), np.sin(t)
        dx = 2.0 * np.sin(base + 0.5 * delta) * np.sin(0.5 * delta)
        q = np.zeros_like(x1)
        for k, c in enumerate(pot.coeffs, start=1):
            q = q + c * sum(x0**i * x1 ** (k - 1 - i) for i in range(k))
        if j != 0:
            q = q + 0.5 * jj * (x0 + x1) / (s0 * s0 * s1 * s1)
        return 2.0 * (r0 + dx * q)

    return kin


def branch_integral(pot: Potential, h: float, j: float, branch: OrbitBranch,
                    kernel: Callable, tol: float = 1e-10) -> float:
    """``int kernel(sin(theta), 2 (h - V_j(theta))) dtheta`` over the branch.

    The branch is split at its midpoint ``c``. ``[alpha_minus, c]`` is
    integrated in ``theta`` and ``[c, alpha_plus]`` in ``psi = pi - theta``
    with the reflected potential, each as an offset from its outer end, so
    every turning point is approached from its nearest pole at full
    precision. Turning points are treated as inverse-square-root singular;
    pole endpoints of open branches are regular.
    """
    def piece(p, base, length, singular):
        kin = _kinetic_from(p, h, j, base)

        def g(delta):
            return kernel(np.sin(base + delta), np.maximum(kin(delta), 0.0))

        spec = SingularIntegral(0.0, length, singular_at_lower=singular, singular_at_upper=False, tol=tol)
        return integrate_singular(g, spec)

    c = 0.5 * (branch.alpha_minus + branch.alpha_plus)
    return (piece(pot, branch.alpha_minus, c - branch.alpha_minus, not branch.open_left)
            + piece(pot.reflected, branch.upper_gap, math.pi - c - branch.upper_gap, not branch.open_right))


def period_T(pot: Potential, h: float, j: float, branch: OrbitBranch, tol: float = 1e-10) -> float:
    """Radial period ``sqrt(2) int dtheta / sqrt(h - V_j)``, doubled for the return trip.

    At ``j = 0`` a branch touching exactly one pole is half of a planar
    swing through that pole, so the period is twice the out-and-back time.
    A branch touching both poles is a full rotation and is traversed once.
    """
    factor = 4.0 if branch.open_left != branch.open_right else 2.0
    return factor * branch_integral(pot, h, j, branch, lambda s, kin: 1.0 / np.sqrt(kin), tol)


def period_hat(pot: Potential, h: float, j: float, branch: OrbitBranch, tol: float = 1e-10) -> float:
    """Mean time for the azimuth to advance by ``2 pi``: ``2 pi T / |delta_phi|``."""
    from .actions import chi

    if j == 0:
        raise ValueError("period_hat needs j != 0")
    advance = 2.0 * math.pi * abs(chi(pot, h, j, branch, tol=tol))
    return 2.0 * math.pi * period_T(pot, h, j, branch, tol=tol) / advance


def _start_angle(pot, j, branch):
    mins = [c for c in critical_points(pot, j)
            if c.kind == "minimum" and branch.alpha_minus < c.theta < branch.alpha_plus]
    if mins:
        return min(mins, key=lambda c: c.h_crit).theta
    res = minimize_scalar(lambda t: modified_potential(pot, t, j),
                          bounds=(branch.alpha_minus, branch.alpha_plus), method="bounded",
                          options={"xatol": 1e-12})
    return float(res.x)


def trajectory_oracle(pot: Potential, h: float, j: float, branch: OrbitBranch,
                      tol: float = 1e-10, t_max: float = 1e4) -> TrajectoryRecord:
    """Integrate the equations of motion over one radial period.

    Starts at the minimum of ``V_j`` inside ``branch`` with ``p_theta > 0``
    and ``phi = 0``. The radial period and azimuthal advance are measured
    between the first two crossings of ``p_theta = 0`` from positive to
    negative (the outer turning point). ``p_phi = j`` is held fixed rather
    than integrated.
    """
    if j == 0:
        raise ValueError("the trajectory oracle needs j != 0")
    theta0 = _start_angle(pot, j, branch)
    kin0 = 2.0 * (h - modified_potential(pot, theta0, j))
    if kin0 <= 0:
        raise NoOrbit(f"no motion at h={h!r} from theta={theta0!r}")
    jj = j * j

    def rhs(t, y):
        theta, p, _ = y
        s = math.sin(theta)
        return [p, jj * math.cos(theta) / s**3 - float(pot.dtheta(theta)), j / (s * s)]

    def section(t, y):
        return y[1]

    section.direction = -1
    section.terminal = 2

    sol = solve_ivp(rhs, (0.0, t_max), [theta0, math.sqrt(kin0), 0.0], method="DOP853",
                    rtol=tol, atol=tol * 1e-2, events=section)
    if sol.status == -1:
        raise IntegrationFailure(sol.message)
    hits_t, hits_y = sol.t_events[0], sol.y_events[0]
    if len(hits_t) < 2:
        raise SectionNotFound(f"fewer than two section crossings before t={t_max}")

    states = np.column_stack([sol.y.T, np.full(sol.t.size, j)])
    energies = 0.5 * (states[:, 1] ** 2 + jj / np.sin(states[:, 0]) ** 2) + pot(states[:, 0])
    return TrajectoryRecord(
        times=sol.t,
        states=states,
        period=float(hits_t[1] - hits_t[0]),
        delta_phi=float(hits_y[1][2] - hits_y[0][2]),
        energy_drift=float(np.max(np.abs(energies - h))),
        section_times=(float(hits_t[0]), float(hits_t[1])),
    )
