import math

import numpy as np
import pytest

from spheremono.dynamics import branches, trajectory_oracle
from spheremono.errors import BranchLost, CriticalValue, InvalidCircuit
from spheremono.monodromy import (
    Circuit,
    chi_scan,
    circuit_check,
    circuit_path,
    delta_at,
    j_sequence,
    monodromy_test,
)

from conftest import LASER, PENDULUM, PERTURBED, TWO_COLOR


def test_j_sequence():
    js = j_sequence()
    assert js[0] == 0.5 and len(js) == 16 and js[-1] >= 1e-5
    assert all(b == a / 2 for a, b in zip(js[:-1], js[1:]))


def test_circuit_validation():
    with pytest.raises(ValueError):
        Circuit(1.0, 0.5)
    with pytest.raises(ValueError):
        Circuit(0.0, 1.0, j_amplitude=0.0)
    with pytest.raises(ValueError):
        Circuit(0.0, 1.0, orientation=-1)


def test_circuit_path_is_counterclockwise():
    pts = circuit_path(Circuit(0.0, 1.0, 0.5), 200)
    assert len(pts) == 200
    assert (pts[0].h, pts[0].j) == (0.0, 0.0)
    # first leg goes down in j at h = a
    assert pts[1].h == 0.0 and pts[1].j < 0.0
    area = sum(p.h * q.j - q.h * p.j for p, q in zip(pts, pts[1:] + pts[:1]))
    assert area > 0


@pytest.mark.parametrize("pot,a,seed,value", [
    (PENDULUM, 0.5, None, -1),
    (PENDULUM, 1.5, None, -2),
    (PERTURBED, 0.5, None, 0),
    (PERTURBED, 2.0, None, -1),
    (PERTURBED, 4.0, None, -2),
    (LASER, -1.5, None, -1),
    (LASER, 0.0, 0.3, -1),
    (LASER, 0.0, 3.0, -1),
    (LASER, 1.0, None, -2),
    (TWO_COLOR, 0.0, None, 0),
    (TWO_COLOR, 0.2, None, -1),
    (TWO_COLOR, 0.75, None, -2),
])
def test_delta_values(pot, a, seed, value):
    d = delta_at(pot, a, seed_theta=seed)
    assert d.value_int == value
    assert d.residual < 1e-2
    assert d.estimate.converged and d.h == a and d.side == 1
    minus = delta_at(pot, a, side=-1, seed_theta=seed)
    assert abs(minus.value_real + d.value_real) < 2e-4


def test_delta_agrees_with_winding_oracle():
    # -2 delta_phi / 2 pi from the equations of motion at small j
    for a, value in ((0.5, -1), (1.5, -2)):
        (br,) = branches(PENDULUM, a, 0.01)
        rec = trajectory_oracle(PENDULUM, a, 0.01, br)
        assert abs(-rec.delta_phi / math.pi - value) < 0.05


def test_delta_errors():
    with pytest.raises(CriticalValue):
        delta_at(PENDULUM, 1.0)
    with pytest.raises(CriticalValue):
        delta_at(PENDULUM, -3.0)
    with pytest.raises(ValueError):
        delta_at(LASER, 0.0)
    with pytest.raises(BranchLost):
        delta_at(PENDULUM, 0.5, seed_theta=3.1)
    with pytest.raises(ValueError):
        delta_at(PENDULUM, 0.5, side=0)


def test_chi_scan_tracks_one_orbit():
    samples, first = chi_scan(LASER, 0.0, [0.2, 0.1, 0.05], seed_theta=3.0)
    assert first.contains(3.0)
    # the south well holds no orbit at j = 0.2, so that leading sample is skipped
    assert [j for j, _ in samples] == [0.1, 0.05]
    assert all(c < 0 for _, c in samples)


def test_pendulum_report():
    rep = monodromy_test(PENDULUM, Circuit(0.5, 1.5), both_sides=True)
    assert (rep.delta_a.value_int, rep.delta_b.value_int) == (-1, -2)
    assert rep.index == -1 and rep.has_monodromy
    assert rep.delta_a_minus.value_int == 1 and rep.delta_b_minus.value_int == 2
    for m, d in ((rep.transfer_a, rep.delta_a), (rep.transfer_b, rep.delta_b)):
        assert np.allclose(m.as_array(), [[1, d.samples[0][1]], [0, 1]], atol=1e-8)


@pytest.mark.parametrize("pot,a,b", [(PENDULUM, 0.5, 1.5), (PENDULUM, 0.5, 0.9), (PENDULUM, 1.2, 1.8),
                                     (PERTURBED, 0.5, 4.0), (PERTURBED, 1.5, 2.5)])
def test_valid_circuits(pot, a, b):
    assert circuit_check(pot, Circuit(a, b, 0.5)) == []


@pytest.mark.parametrize("pot,a,b", [(PENDULUM, 0.5, 0.9), (PENDULUM, 1.2, 1.8), (PERTURBED, 1.5, 2.5)])
def test_null_circuits(pot, a, b):
    rep = monodromy_test(pot, Circuit(a, b))
    assert rep.index == 0 and not rep.has_monodromy


def test_additivity():
    def idx(a, b):
        return monodromy_test(PERTURBED, Circuit(a, b)).index

    assert idx(0.5, 4.0) == idx(0.5, 2.0) + idx(2.0, 4.0)
    assert abs(idx(0.5, 2.0)) == 1 and abs(idx(0.5, 4.0)) == 2


def test_laser_circuit_crosses_interior_curves():
    violations = circuit_check(LASER, Circuit(-1.5, 1.0, 0.1))
    assert violations
    near = sorted({round(v.nearest_critical_h, 6) for v in violations})
    assert any(abs(h - 0.125) < 0.05 for h in near)
    with pytest.raises(InvalidCircuit) as info:
        monodromy_test(LASER, Circuit(-1.5, 1.0, 0.1))
    assert info.value.violations


def test_circuit_through_out_of_range():
    v = circuit_check(PENDULUM, Circuit(-1.5, 0.5, 0.5))
    assert any(x.classification.status.value == "out_of_range" for x in v)
