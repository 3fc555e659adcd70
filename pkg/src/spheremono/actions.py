"""Actions and their derivatives on one orbit branch.

``I1 = (1/pi) int sqrt(2 (h - V_j)) dtheta`` and ``I2 = j``. Their Jacobian
with respect to ``(h, j)`` is ``[[beta, chi], [0, 1]]`` where ``beta`` and
``chi`` are the integrals below; ``-chi`` is the azimuthal advance per
radial period in units of ``2 pi``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .dynamics import OrbitBranch, branch_integral
from .potential import Potential

__all__ = [
    "ActionValues",
    "TransferMatrix",
    "action_I1",
    "beta",
    "chi",
    "jacobian",
    "action_values",
    "transfer_matrix",
]


@dataclass(frozen=True)
class ActionValues:
    I1: float
    I2: float
    beta: float
    chi: float
    h: float
    j: float
    branch_index: int


@dataclass(frozen=True)
class TransferMatrix:
    m11: float
    m12: float
    m21: float
    m22: float

    @classmethod
    def from_array(cls, a) -> "TransferMatrix":
        return cls(float(a[0, 0]), float(a[0, 1]), float(a[1, 0]), float(a[1, 1]))

    def as_array(self) -> np.ndarray:
        return np.array([[self.m11, self.m12], [self.m21, self.m22]])

    @property
    def det(self) -> float:
        return self.m11 * self.m22 - self.m12 * self.m21


def chi(pot: Potential, h: float, j: float, branch: OrbitBranch, tol: float = 1e-10) -> float:
    """``-(j/pi) int dtheta / (sqrt(2 (h - V_j)) sin(theta)**2)``; needs ``j != 0``."""
    if j == 0:
        raise ValueError("chi is defined for j != 0 only")
    if not branch.closed:
        raise ValueError("chi needs a branch bounded away from the poles")
    val = branch_integral(pot, h, j, branch,
                          lambda s, kin: 1.0 / (np.sqrt(kin) * s**2), tol)
    return -j * val / math.pi


def beta(pot: Potential, h: float, j: float, branch: OrbitBranch, tol: float = 1e-10) -> float:
    return branch_integral(pot, h, j, branch, lambda s, kin: 1.0 / np.sqrt(kin), tol) / math.pi


def action_I1(pot: Potential, h: float, j: float, branch: OrbitBranch, tol: float = 1e-10) -> float:
    return branch_integral(pot, h, j, branch, lambda s, kin: np.sqrt(kin), tol) / math.pi


def jacobian(pot: Potential, h: float, j: float, branch: OrbitBranch, tol: float = 1e-10) -> np.ndarray:
    """``DI(h, j) = [[beta, chi], [0, 1]]``."""
    return np.array([[beta(pot, h, j, branch, tol), chi(pot, h, j, branch, tol)], [0.0, 1.0]])


def action_values(pot: Potential, h: float, j: float, branch: OrbitBranch,
                  tol: float = 1e-10) -> ActionValues:
    return ActionValues(
        I1=action_I1(pot, h, j, branch, tol),
        I2=float(j),
        beta=beta(pot, h, j, branch, tol),
        chi=chi(pot, h, j, branch, tol) if j != 0 else math.nan,
        h=float(h),
        j=float(j),
        branch_index=branch.index,
    )


def transfer_matrix(pot: Potential, h: float, j: float, branch: OrbitBranch,
                    tol: float = 1e-10) -> TransferMatrix:
    """``DI(h, j) DI(h, -j)^{-1}`` assembled from independent evaluations at ``+-j``.

    ``V_j`` depends on ``j**2`` only, so the same branch serves both signs.
    """
    if not j > 0:
        raise ValueError("transfer_matrix needs j > 0")
    plus = jacobian(pot, h, j, branch, tol)
    minus = jacobian(pot, h, -j, branch, tol)
    return TransferMatrix.from_array(plus @ np.linalg.inv(minus))
