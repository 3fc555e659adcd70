"""Monodromy test along a circuit crossing ``j = 0`` at ``h = a`` and ``h = b``.

At each crossing the limit ``Delta = lim_{j -> 0+} 2 chi(h, j)`` is an
integer; different integers at the two crossings mean that action-angle
variables cannot be defined globally along the circuit.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from .actions import TransferMatrix, chi, transfer_matrix
from .dynamics import OrbitBranch, branches
from .emmap import EMClassification, EMPoint, Status, classify
from .errors import BranchLost, CriticalValue, InvalidCircuit, NoOrbit, NonConvergent
from .numerics import LimitEstimate, extrapolate_limit
from .potential import Potential, critical_points

__all__ = [
    "Circuit",
    "Violation",
    "DeltaResult",
    "MonodromyReport",
    "j_sequence",
    "circuit_path",
    "circuit_check",
    "chi_scan",
    "delta_at",
    "monodromy_test",
]

J_START = 0.5
J_FLOOR = 1e-5


@dataclass(frozen=True)
class Circuit:
    """Rectangle through ``(a, 0)``, ``(a, +-J)``, ``(b, +-J)``, ``(b, 0)``."""

    a: float
    b: float
    j_amplitude: float = 0.5
    orientation: int = 1

    def __post_init__(self):
        if not self.a < self.b:
            raise ValueError("circuit needs a < b")
        if not self.j_amplitude > 0:
            raise ValueError("j_amplitude must be positive")
        if self.orientation != 1:
            raise ValueError("only counterclockwise circuits are supported")


@dataclass(frozen=True)
class Violation:
    point: EMPoint
    classification: EMClassification

    @property
    def nearest_critical_h(self):
        return self.classification.nearest_critical_h


@dataclass
class DeltaResult:
    value_real: float
    value_int: int
    residual: float
    side: int
    seed_theta: float | None
    h: float
    estimate: LimitEstimate
    samples: list[tuple[float, float]] = field(default_factory=list)  # (j, 2 chi)
    first_branch: OrbitBranch | None = None


@dataclass
class MonodromyReport:
    circuit: Circuit
    delta_a: DeltaResult
    delta_b: DeltaResult
    index: int
    has_monodromy: bool
    transfer_a: TransferMatrix | None = None
    transfer_b: TransferMatrix | None = None
    delta_a_minus: DeltaResult | None = None
    delta_b_minus: DeltaResult | None = None


def j_sequence(j0: float = J_START, floor: float = J_FLOOR) -> list[float]:
    """``j0 * 2**-k`` for ``k = 0, 1, ...`` while not below ``floor``."""
    out = []
    j = j0
    while j >= floor:
        out.append(j)
        j *= 0.5
    return out


def circuit_path(circuit: Circuit, n_points: int = 200) -> list[EMPoint]:
    """``n_points`` points evenly spaced (by perimeter) counterclockwise from ``(a, 0)``."""
    a, b, J = circuit.a, circuit.b, circuit.j_amplitude
    corners = [(a, 0.0), (a, -J), (b, -J), (b, 0.0), (b, J), (a, J), (a, 0.0)]
    lengths = [math.hypot(x1 - x0, y1 - y0) for (x0, y0), (x1, y1) in zip(corners[:-1], corners[1:])]
    total = sum(lengths)
    out = []
    for i in range(n_points):
        s = total * i / n_points
        for (x0, y0), (x1, y1), seg in zip(corners[:-1], corners[1:], lengths):
            if s <= seg:
                u = s / seg
                out.append(EMPoint(x0 + u * (x1 - x0), y0 + u * (y1 - y0)))
                break
            s -= seg
    return out


def _crossing(pot, p: EMPoint, q: EMPoint, rp: int) -> EMPoint:
    """Locate where the branch count changes on the segment ``p -> q``."""
    lo, hi = 0.0, 1.0
    for _ in range(50):
        mid = 0.5 * (lo + hi)
        pt = EMPoint(p.h + mid * (q.h - p.h), p.j + mid * (q.j - p.j))
        c = classify(pot, pt.h, pt.j)
        if c.regular and c.r == rp:
            lo = mid
        else:
            hi = mid
    u = 0.5 * (lo + hi)
    return EMPoint(p.h + u * (q.h - p.h), p.j + u * (q.j - p.j))


def circuit_check(pot: Potential, circuit: Circuit, n_points: int = 200) -> list[Violation]:
    """Points of the circuit that are not regular values; empty when it is valid.

    Besides the ``n_points`` sampled points themselves, every segment between
    neighbouring samples is checked for crossings of a critical curve: on
    constant-``j`` edges by comparing against the critical values of ``V_j``,
    elsewhere by a change in the number of orbit branches.
    """
    pts = circuit_path(circuit, n_points)
    classes = [classify(pot, pt.h, pt.j) for pt in pts]
    out = [Violation(pt, c) for pt, c in zip(pts, classes) if not c.regular]
    for i, (p, cp) in enumerate(zip(pts, classes)):
        q, cq = pts[(i + 1) % len(pts)], classes[(i + 1) % len(pts)]
        if not (cp.regular and cq.regular):
            continue
        if p.j == q.j:
            lo, hi = sorted((p.h, q.h))
            for c in critical_points(pot, p.j):
                if lo < c.h_crit < hi:
                    out.append(Violation(EMPoint(c.h_crit, p.j),
                                         EMClassification(Status.CRITICAL, None, c.h_crit)))
        elif cp.r != cq.r:
            pt = _crossing(pot, p, q, cp.r)
            near = classify(pot, pt.h, pt.j).nearest_critical_h
            out.append(Violation(pt, EMClassification(Status.CRITICAL, None, near)))
    return out


def _pick(candidates: list[OrbitBranch], seed_theta, previous) -> OrbitBranch | None:
    if previous is not None:
        best = max(candidates, key=lambda br: br.overlap(previous))
        return best if best.overlap(previous) > 0 else None
    if seed_theta is None:
        return candidates[0] if len(candidates) == 1 else None
    for br in candidates:
        if br.contains(seed_theta):
            return br
    return None


def chi_scan(pot: Potential, h: float, js, seed_theta: float | None = None,
             tol: float = 1e-10) -> tuple[list[tuple[float, float]], OrbitBranch | None]:
    """``chi(h, j)`` along ``js`` (ordered by decreasing ``|j|``) on one tracked branch.

    The branch is chosen at the first ``j`` where it exists, as the one
    containing ``seed_theta`` (or the only one, when ``seed_theta`` is
    omitted), and is then followed by maximal interval overlap. Leading
    ``j`` values without a usable branch are skipped. Returns the samples
    and the branch used for the first one.
    """
    previous = None
    first = None
    samples = []
    for jv in js:
        try:
            cands = branches(pot, h, jv)
        except (CriticalValue, NoOrbit):
            if previous is None:
                continue
            raise BranchLost(f"no regular orbit at h={h!r}, j={jv!r}")
        br = _pick(cands, seed_theta, previous)
        if br is None:
            if previous is None:
                if seed_theta is None and len(cands) > 1:
                    raise ValueError(f"{len(cands)} orbits at h={h!r}; pass seed_theta to choose one")
                continue
            raise BranchLost(f"tracked orbit vanished at h={h!r}, j={jv!r}")
        if first is None:
            first = br
        previous = br
        samples.append((float(jv), chi(pot, h, jv, br, tol=tol)))
    if first is None:
        raise BranchLost(f"no orbit containing theta={seed_theta!r} at h={h!r}")
    return samples, first


def delta_at(pot: Potential, a: float, side: int = 1, seed_theta: float | None = None,
             j0: float = J_START, j_floor: float = J_FLOOR, tol: float = 1e-10) -> DeltaResult:
    """``Delta(a, 0+-)``: extrapolated limit of ``2 chi(a, j)`` along ``j -> 0``.

    ``j`` runs over ``j0 * 2**-k`` down to ``j_floor`` (negated for
    ``side = -1``) on the branch selected as in :func:`chi_scan`.
    """
    if side not in (1, -1):
        raise ValueError("side must be +1 or -1")
    cls0 = classify(pot, a, 0.0)
    if not cls0.regular:
        raise CriticalValue(f"(h={a!r}, j=0) is not a regular value ({cls0.status.value})")

    js = j_sequence(j0, j_floor)
    raw, first = chi_scan(pot, a, [side * jv for jv in js], seed_theta, tol)
    samples = [(abs(jv), 2.0 * c) for jv, c in raw]
    if len(samples) < 4:
        raise NonConvergent(f"only {len(samples)} usable samples at h={a!r}")

    est = extrapolate_limit(samples, strict=False)
    value_int = int(round(est.value))
    result = DeltaResult(
        value_real=est.value,
        value_int=value_int,
        residual=abs(est.value - value_int),
        side=side,
        seed_theta=seed_theta,
        h=a,
        estimate=est,
        samples=samples,
        first_branch=first,
    )
    if not est.converged:
        raise NonConvergent(
            f"2*chi at h={a!r} did not converge (estimate {est.value:.6g}, "
            f"uncertainty {est.uncertainty:.2g})", result)
    return result


def monodromy_test(pot: Potential, circuit: Circuit, seed_a: float | None = None,
                   seed_b: float | None = None, both_sides: bool = False,
                   tol: float = 1e-10) -> MonodromyReport:
    """Validate ``circuit`` and compare ``Delta`` at its two ``j = 0`` crossings.

    ``index = Delta(b) - Delta(a)``; monodromy is reported when it is
    nonzero. With ``both_sides`` the limits from ``j < 0`` are computed as
    well, which must be the negatives of the ``j > 0`` ones.
    """
    violations = circuit_check(pot, circuit)
    if violations:
        v = violations[0]
        raise InvalidCircuit(
            f"{len(violations)} circuit points are not regular, first at "
            f"(h={v.point.h:.6g}, j={v.point.j:.6g}) [{v.classification.status.value}]",
            violations,
        )
    da = delta_at(pot, circuit.a, 1, seed_a, tol=tol)
    db = delta_at(pot, circuit.b, 1, seed_b, tol=tol)
    index = db.value_int - da.value_int
    report = MonodromyReport(circuit, da, db, index, index != 0)
    report.transfer_a = transfer_matrix(pot, circuit.a, da.samples[0][0], da.first_branch, tol)
    report.transfer_b = transfer_matrix(pot, circuit.b, db.samples[0][0], db.first_branch, tol)
    if both_sides:
        report.delta_a_minus = delta_at(pot, circuit.a, -1, seed_a, tol=tol)
        report.delta_b_minus = delta_at(pot, circuit.b, -1, seed_b, tol=tol)
    return report
