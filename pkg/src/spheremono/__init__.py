"""Numerical detection of Hamiltonian monodromy for a particle on the sphere.

The potential is azimuthally symmetric, ``V(theta) = sum_k c_k cos(theta)**k``.
"""

from .actions import ActionValues, TransferMatrix, action_I1, action_values, beta, chi, jacobian, transfer_matrix
from .dynamics import (
    OrbitBranch,
    PhaseState,
    TrajectoryRecord,
    branch_count,
    branches,
    hamiltonian,
    period_hat,
    period_T,
    trajectory_oracle,
)
from .emmap import (
    CriticalCurve,
    EMClassification,
    EMGrid,
    EMPoint,
    SingularValue,
    Status,
    classify,
    critical_curves,
    em_grid,
    singular_values_j0,
)
from .errors import *  # noqa: F401,F403
from .monodromy import (
    Circuit,
    DeltaResult,
    MonodromyReport,
    Violation,
    chi_scan,
    circuit_check,
    circuit_path,
    delta_at,
    j_sequence,
    monodromy_test,
)
from .numerics import LimitEstimate, SingularIntegral, extrapolate_limit, find_roots, integrate_singular
from .potential import CriticalPoint, Potential, critical_points, modified_potential, singular_poly

__version__ = "0.1.0"
