import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from spheremono.errors import NonConvergent, ToleranceNotMet, TooManySignChanges
from spheremono.numerics import (
    SingularIntegral,
    adaptive_quad,
    bisect,
    extrapolate_limit,
    find_roots,
    integrate_singular,
    richardson,
)


def test_bisect_reaches_machine_precision():
    lo, hi, flo, fhi = bisect(lambda x: x * x - 2.0, 1.0, 2.0)
    assert flo < 0 < fhi
    assert hi == math.nextafter(lo, 3.0)
    assert lo <= math.sqrt(2.0) <= hi


def test_bisect_requires_sign_change():
    with pytest.raises(ValueError):
        bisect(lambda x: x * x + 1.0, -1.0, 1.0)


def test_find_roots_polynomial():
    roots = find_roots(lambda x: (x - 0.3) * (x + 0.7) * (x - 0.95), -1.0, 1.0)
    assert np.allclose(roots, [-0.7, 0.3, 0.95], atol=1e-13)


def test_find_roots_exact_zero_on_grid_node():
    # x = 0 is a grid node of an odd-sized grid and a double root of x**2
    assert find_roots(lambda x: x * x, -1.0, 1.0, grid_n=2049) == [0.0]


def test_find_roots_too_many_sign_changes():
    with pytest.raises(TooManySignChanges):
        find_roots(lambda x: np.sin(1000 * x), 0.0, 1.0)


@given(st.lists(st.floats(-0.99, 0.99), min_size=1, max_size=4, unique=True))
def test_find_roots_recovers_separated_roots(rs):
    rs = sorted(rs)
    if any(b - a < 0.01 for a, b in zip(rs[:-1], rs[1:])):
        return
    found = find_roots(lambda x: np.prod([x - r for r in rs], axis=0), -1.0, 1.0)
    assert np.allclose(found, rs, atol=1e-12)


def test_adaptive_quad_smooth():
    val, err = adaptive_quad(np.exp, 0.0, 1.0)
    assert abs(val - (math.e - 1.0)) < 1e-14
    assert err < 1e-10


def test_adaptive_quad_depth_cap():
    with pytest.raises(ToleranceNotMet):
        adaptive_quad(lambda x: np.sin(1.0 / x), 1e-4, 1.0, max_depth=3)


def test_adaptive_quad_rejects_non_finite():
    with pytest.raises(ToleranceNotMet):
        adaptive_quad(lambda x: np.full_like(x, np.nan), 0.0, 1.0)


def test_kernel_arcsine():
    spec = SingularIntegral(0.0, 1.0, tol=1e-12)
    val = integrate_singular(lambda x: 1.0 / np.sqrt(x * (1.0 - x)), spec)
    assert abs(val - math.pi) / math.pi < 1e-10


def test_kernel_semicircle():
    spec = SingularIntegral(-1.0, 1.0, tol=1e-12)
    val = integrate_singular(lambda x: 1.0 / np.sqrt((1.0 - x) * (1.0 + x)), spec)
    assert abs(val - math.pi) / math.pi < 1e-10


def test_general_exponent():
    spec = SingularIntegral(0.0, 1.0, singular_at_upper=False, gamma=0.75, tol=1e-12)
    assert abs(integrate_singular(lambda x: x**-0.75, spec) - 4.0) < 1e-10


@given(st.floats(0.05, 5.0), st.floats(-3.0, 3.0))
def test_inverse_sqrt_kernel_any_interval(width, a):
    b = a + width
    spec = SingularIntegral(a, b, tol=1e-12)
    val = integrate_singular(lambda x: 1.0 / np.sqrt((x - a) * (b - x)), spec)
    assert abs(val - math.pi) < 1e-9


@pytest.mark.parametrize("kw", [dict(lower=1.0, upper=1.0), dict(lower=0.0, upper=1.0, gamma=1.0)])
def test_singular_integral_validation(kw):
    with pytest.raises(ValueError):
        SingularIntegral(**kw)


def test_richardson_linear_exact():
    samples = [(0.5 * 2.0**-k, 3.0 - 2.0 * 0.5 * 2.0**-k) for k in range(5)]
    assert np.allclose(richardson(samples), 3.0, atol=1e-14)


def test_extrapolate_linear_approach():
    samples = [(2.0**-k, -1.0 + 2.0**-k) for k in range(1, 20)]
    est = extrapolate_limit(samples)
    assert est.converged
    assert abs(est.value + 1.0) < 1e-12
    assert est.samples_used == 19


@given(st.integers(-3, 3), st.floats(-2.0, 2.0), st.floats(-1.0, 1.0))
def test_extrapolate_quadratic_error(limit, c1, c2):
    samples = [(j, limit + c1 * j + c2 * j * j) for j in (0.5 * 2.0**-k for k in range(16))]
    est = extrapolate_limit(samples)
    assert est.converged and round(est.value) == limit


def test_extrapolate_non_integer_raises_with_estimate():
    samples = [(2.0**-k, 0.5 + 2.0**-k) for k in range(1, 10)]
    with pytest.raises(NonConvergent) as info:
        extrapolate_limit(samples)
    assert abs(info.value.estimate.value - 0.5) < 1e-12
    assert not extrapolate_limit(samples, strict=False).converged
    assert extrapolate_limit(samples, integer_band=None).converged


@pytest.mark.parametrize("samples", [
    [(0.5, 1.0), (0.25, 1.0), (0.125, 1.0)],
    [(0.5, 1.0), (0.25, 1.0), (0.25, 1.0), (0.1, 1.0)],
    [(0.5, 1.0), (0.25, 1.0), (0.125, 1.0), (-0.1, 1.0)],
])
def test_extrapolate_rejects_bad_samples(samples):
    with pytest.raises(ValueError):
        extrapolate_limit(samples)
