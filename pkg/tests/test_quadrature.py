"""Quadrature engine checks against hand-integrable functions."""

import math

import pytest

from convex_tail.errors import NumericalError
from convex_tail.quadrature import quad_unit


def test_interior_polynomial():
    assert quad_unit(lambda u: 3.0 * u * u, 0.25, 0.75) == pytest.approx(
        0.75 ** 3 - 0.25 ** 3, rel=1e-12)


def test_power_singularity_at_zero():
    # integral of u^-1/2 over (0, b) is 2 sqrt(b)
    for b in (1.0, 0.16, 1e-4):
        assert quad_unit(lambda u: u ** -0.5, 0.0, b) == pytest.approx(
            2.0 * math.sqrt(b), rel=1e-9)


def test_power_singularity_at_one():
    # 1 - u is ulp-starved near 1, which caps the achievable accuracy; the
    # reflected form (below) is the one the library uses for tail integrals
    assert quad_unit(lambda u: (1.0 - u) ** -0.5, 0.0, 1.0) == pytest.approx(
        2.0, rel=1e-7)
    assert quad_unit(lambda v: v ** -0.5, 0.0, 1.0) == pytest.approx(2.0, rel=1e-9)


def test_log_singularity_integrable_interior():
    # f(v) = 1/(v (1 - ln v)^2) has antiderivative 1/(1 - ln v)
    f = lambda v: 1.0 / (v * (1.0 - math.log(v)) ** 2)
    a, b = 2.0 ** -40, 0.5
    exact = 1.0 / (1.0 - math.log(b)) - 1.0 / (1.0 - math.log(a))
    assert quad_unit(f, a, b) == pytest.approx(exact, rel=1e-9)


def test_log_singularity_refused_at_endpoint():
    # the same integrand is integrable on (0, b) but converges so slowly that
    # no fixed dyadic depth resolves it; the engine must refuse, not truncate
    f = lambda v: 1.0 / (v * (1.0 - math.log(v)) ** 2)
    with pytest.raises(NumericalError):
        quad_unit(f, 0.0, 0.5)


def test_divergent_integral_refused():
    with pytest.raises(NumericalError):
        quad_unit(lambda u: 1.0 / u, 0.0, 1.0)


def test_bad_bounds():
    with pytest.raises(NumericalError):
        quad_unit(lambda u: u, 0.5, 0.25)
    with pytest.raises(NumericalError):
        quad_unit(lambda u: u, -0.1, 0.5)


def test_zero_function():
    assert quad_unit(lambda u: 0.0, 0.0, 1.0) == 0.0
