import math

import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from spheremono.actions import (
    TransferMatrix,
    action_I1,
    action_values,
    beta,
    chi,
    jacobian,
    transfer_matrix,
)
from spheremono.dynamics import branches
from spheremono.emmap import classify

from conftest import EXAMPLES, LASER, PENDULUM

STEP = 1e-5
QTOL = 1e-11


def _branch_at(pot, h, j, seed):
    return next(b for b in branches(pot, h, j) if b.contains(seed))


def _i1(pot, h, j, seed):
    return action_I1(pot, h, j, _branch_at(pot, h, j, seed), tol=QTOL)


def check_gradient(pot, h, j, br):
    seed = 0.5 * (br.alpha_minus + br.alpha_plus)
    d_h = (_i1(pot, h + STEP, j, seed) - _i1(pot, h - STEP, j, seed)) / (2 * STEP)
    d_j = (_i1(pot, h, j + STEP, seed) - _i1(pot, h, j - STEP, seed)) / (2 * STEP)
    assert abs(beta(pot, h, j, br, QTOL) - d_h) < 1e-5
    assert abs(chi(pot, h, j, br, QTOL) - d_j) < 1e-5


@given(st.sampled_from(sorted(EXAMPLES)), st.floats(-3.0, 3.0), st.floats(0.1, 1.0))
def test_gradient_of_action(name, h, j):
    pot = EXAMPLES[name]
    c = classify(pot, h, j)
    assume(c.regular and abs(h - c.nearest_critical_h) > 1e-2)
    for br in branches(pot, h, j):
        check_gradient(pot, h, j, br)


@pytest.mark.parametrize("h,j", [(0.5, 0.3), (1.5, 0.6), (2.5, 1.0)])
def test_parity(h, j):
    (br,) = branches(PENDULUM, h, j)
    assert abs(chi(PENDULUM, h, j, br) + chi(PENDULUM, h, -j, br)) < 1e-9
    assert abs(beta(PENDULUM, h, j, br) - beta(PENDULUM, h, -j, br)) < 1e-9
    assert action_I1(PENDULUM, h, j, br) == action_I1(PENDULUM, h, -j, br)


def test_jacobian_shape():
    (br,) = branches(PENDULUM, 0.5, 0.3)
    m = jacobian(PENDULUM, 0.5, 0.3, br)
    assert m[1, 0] == 0.0 and m[1, 1] == 1.0
    assert m[0, 0] == beta(PENDULUM, 0.5, 0.3, br)


@pytest.mark.parametrize("pot,h,j,which", [(PENDULUM, 0.5, 0.5, 0), (PENDULUM, 1.5, 0.2, 0),
                                            (LASER, 0.0, 0.1, 0), (LASER, 0.0, 0.1, 1)])
def test_transfer_matrix_is_shear(pot, h, j, which):
    br = branches(pot, h, j)[which]
    m = transfer_matrix(pot, h, j, br)
    expect = np.array([[1.0, 2.0 * chi(pot, h, j, br)], [0.0, 1.0]])
    assert np.allclose(m.as_array(), expect, atol=1e-8, rtol=0)
    assert abs(m.det - 1.0) < 1e-8


def test_transfer_matrix_roundtrip():
    m = TransferMatrix.from_array(np.array([[1.0, 2.0], [3.0, 4.0]]))
    assert m == TransferMatrix(1.0, 2.0, 3.0, 4.0)
    assert m.det == -2.0


def test_action_values():
    (br,) = branches(PENDULUM, 0.5, 0.25)
    av = action_values(PENDULUM, 0.5, 0.25, br)
    assert av.I2 == 0.25 and av.branch_index == 0
    assert av.chi == chi(PENDULUM, 0.5, 0.25, br)
    (br0,) = branches(PENDULUM, 0.5, 0.0)
    assert math.isnan(action_values(PENDULUM, 0.5, 0.0, br0).chi)


def test_invalid_requests():
    (br,) = branches(PENDULUM, 0.5, 0.25)
    (open_br,) = branches(PENDULUM, 0.5, 0.0)
    with pytest.raises(ValueError):
        chi(PENDULUM, 0.5, 0.0, br)
    with pytest.raises(ValueError):
        chi(PENDULUM, 0.5, 0.25, open_br)
    with pytest.raises(ValueError):
        transfer_matrix(PENDULUM, 0.5, -0.25, br)


def test_chi_from_pole_contributions():
    # each pole passed within ~j contributes -1/2 as j -> 0
    h, j = 1.5, 1e-4
    (br,) = branches(PENDULUM, h, j)
    assert abs(chi(PENDULUM, h, j, br) + 1.0) < 1e-3
    (br,) = branches(PENDULUM, 0.5, j)
    assert abs(chi(PENDULUM, 0.5, j, br) + 0.5) < 1e-3
