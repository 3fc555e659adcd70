"""Classification of points of the energy-momentum plane ``(h, j)``.

``(h, j)`` is a regular value iff ``h`` is a regular value of ``V_j``; the
critical values of ``V_j`` traced over ``j`` form the critical curves, the
lowest of which bounds the image of the map.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .dynamics import CRITICAL_TOL, branch_count
from .errors import TrackingLost
from .potential import Potential, critical_points

__all__ = [
    "Status",
    "EMPoint",
    "EMClassification",
    "SingularValue",
    "CriticalCurve",
    "EMGrid",
    "classify",
    "singular_values_j0",
    "critical_curves",
    "em_grid",
]

TRACK_JUMP = 0.1


class Status(str, enum.Enum):
    REGULAR = "regular"
    CRITICAL = "critical"
    OUT_OF_RANGE = "out_of_range"


@dataclass(frozen=True)
class EMPoint:
    h: float
    j: float


@dataclass(frozen=True)
class EMClassification:
    status: Status
    r: int | None = None
    nearest_critical_h: float | None = None

    @property
    def regular(self) -> bool:
        return self.status is Status.REGULAR


@dataclass(frozen=True)
class SingularValue:
    h: float
    x: float
    kind: str  # "isolated" | "boundary"


@dataclass
class CriticalCurve:
    curve_id: int
    kind: str  # "boundary" | "interior"
    samples: list[tuple[float, float, float]] = field(default_factory=list)  # (j, h, x)
    end_reason: str = "grid_end"

    @property
    def js(self) -> np.ndarray:
        return np.array([s[0] for s in self.samples])

    @property
    def hs(self) -> np.ndarray:
        return np.array([s[1] for s in self.samples])


def _classify_with(pot, h, j, crit) -> EMClassification:
    hs = [c.h_crit for c in crit]
    nearest = min(hs, key=lambda v: abs(v - h))
    if abs(h - nearest) < CRITICAL_TOL:
        return EMClassification(Status.CRITICAL, None, nearest)
    if h < min(hs):
        return EMClassification(Status.OUT_OF_RANGE, None, nearest)
    return EMClassification(Status.REGULAR, branch_count(pot, h, j, crit), nearest)


def classify(pot: Potential, h: float, j: float) -> EMClassification:
    return _classify_with(pot, h, j, critical_points(pot, j))


def singular_values_j0(pot: Potential) -> list[SingularValue]:
    """Critical values of ``V`` at ``j = 0``, pole values included, sorted by ``x``.

    The global minimum lies on the boundary of the image; every other
    critical value is isolated in its interior.
    """
    crit = critical_points(pot, 0.0)
    lowest = min(c.h_crit for c in crit)
    return [SingularValue(c.h_crit, c.x, "boundary" if c.h_crit - lowest < CRITICAL_TOL else "isolated")
            for c in crit]


def _match(prev: list[float], cur: list[float]):
    """Greedy nearest-neighbour assignment; returns {prev_index: cur_index}."""
    pairs = sorted((abs(p - c), i, k) for i, p in enumerate(prev) for k, c in enumerate(cur))
    used_p, used_c, out = set(), set(), {}
    for d, i, k in pairs:
        if i in used_p or k in used_c or d > TRACK_JUMP:
            continue
        out[i] = k
        used_p.add(i)
        used_c.add(k)
    return out


def critical_curves(pot: Potential, j_max: float = 2.0, n_samples: int = 201,
                    j_values=None) -> list[CriticalCurve]:
    """Trace the critical points of ``V_j`` over ``j`` in ``[0, j_max]``.

    Roots of the singular-point polynomial are continued from ``j = 0`` by
    nearest-neighbour matching in ``x``. A curve ends where its root merges
    with another or leaves ``[-1, 1]``. When the root count is unchanged but
    a root cannot be matched within 0.1 in ``x``, the step is refined once
    and ``TrackingLost`` is raised if that does not help.

    A curve is labelled ``boundary`` when it carries the global minimum of
    ``V_j`` at every sample.
    """
    if j_values is None:
        if not j_max > 0 or n_samples < 2:
            raise ValueError("need j_max > 0 and n_samples >= 2")
        j_values = np.linspace(0.0, j_max, n_samples)
    j_values = [float(v) for v in j_values]

    curves: list[CriticalCurve] = []
    active: dict[int, CriticalCurve] = {}
    is_min: dict[int, bool] = {}

    def start(cp, jv):
        cv = CriticalCurve(len(curves), "interior", [(jv, cp.h_crit, cp.x)])
        curves.append(cv)
        return cv

    def advance(crit):
        prev_x = [cv.samples[-1][2] for cv in active.values()]
        m = _match(prev_x, [c.x for c in crit])
        if len(crit) == len(prev_x) and len(m) < len(prev_x):
            return None
        return m

    prev_j = None
    for jv in j_values:
        crit = critical_points(pot, jv)
        if prev_j is None:
            for c in crit:
                cv = start(c, jv)
                active[cv.curve_id] = cv
        else:
            m = advance(crit)
            if m is None:
                mid = 0.5 * (prev_j + jv)
                mid_crit = critical_points(pot, mid)
                m_mid = advance(mid_crit)
                if m_mid is not None:
                    keys = list(active)
                    for i, k in m_mid.items():
                        active[keys[i]].samples.append((mid, mid_crit[k].h_crit, mid_crit[k].x))
                    m = advance(crit)
                if m is None:
                    raise TrackingLost(f"root continuation jumped between j={prev_j:g} and j={jv:g}")
            keys = list(active)
            matched = set()
            for i, k in m.items():
                cv = active[keys[i]]
                cv.samples.append((jv, crit[k].h_crit, crit[k].x))
                matched.add(k)
            for i, key in enumerate(keys):
                if i not in m:
                    active[key].end_reason = "merged_or_exited"
                    del active[key]
            for k, c in enumerate(crit):
                if k not in matched:
                    cv = start(c, jv)
                    active[cv.curve_id] = cv
        lowest = min(c.h_crit for c in crit)
        for cv in active.values():
            if cv.samples[-1][0] == jv:
                is_min[cv.curve_id] = is_min.get(cv.curve_id, True) and cv.samples[-1][1] - lowest < CRITICAL_TOL
        prev_j = jv

    for cv in curves:
        if is_min.get(cv.curve_id) and len(cv.samples) > 1:
            cv.kind = "boundary"
    return curves


@dataclass
class EMGrid:
    h: np.ndarray
    j: np.ndarray
    cells: list[list[EMClassification]]  # cells[row for j][column for h]

    def status_array(self) -> np.ndarray:
        return np.array([[c.status.value for c in row] for row in self.cells])

    def rows(self):
        """Yield ``(h, j, classification)`` row-major (outer loop over ``j``)."""
        for jv, row in zip(self.j, self.cells):
            for hv, cell in zip(self.h, row):
                yield float(hv), float(jv), cell


def em_grid(pot: Potential, h_range=(-2.0, 2.0), j_range=(-2.0, 2.0), nh: int = 101,
            nj: int = 101) -> EMGrid:
    if nh < 2 or nj < 2:
        raise ValueError("nh and nj must be >= 2")
    hs = np.linspace(h_range[0], h_range[1], nh)
    js = np.linspace(j_range[0], j_range[1], nj)
    cells = []
    cache: dict[float, list] = {}
    for jv in js:
        key = abs(float(jv))
        if key not in cache:
            cache[key] = critical_points(pot, key)
        crit = cache[key]
        cells.append([_classify_with(pot, float(hv), float(jv), crit) for hv in hs])
    return EMGrid(hs, js, cells)
