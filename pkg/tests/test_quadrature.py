import math

import numpy as np
import pytest

from mumimo.quadrature import (QuadratureSpec, QuadratureError, integrate,
                               integrate_semi_infinite)


def test_finite_intervals_match_antiderivatives():
    np.testing.assert_allclose(integrate(math.sin, 0.0, math.pi), 2.0,
                               rtol=1e-12)
    np.testing.assert_allclose(integrate(lambda x: x ** 3, -1.0, 2.0),
                               15.0 / 4.0, rtol=1e-12)
    np.testing.assert_allclose(
        integrate(lambda x: math.exp(-x * x), -8.0, 8.0), math.sqrt(math.pi),
        rtol=1e-12)


@pytest.mark.parametrize("f, exact", [
    (lambda x: math.exp(-x), 1.0),
    (lambda x: 1.0 / (1.0 + x) ** 2, 1.0),
    (lambda x: x ** 3 * math.exp(-x), 6.0),
    (lambda x: math.exp(-0.01 * x), 100.0),
])
def test_semi_infinite(f, exact):
    np.testing.assert_allclose(integrate_semi_infinite(f), exact, rtol=1e-10)


def test_semi_infinite_scale_is_only_a_change_of_variables():
    for scale in (0.01, 1.0, 250.0):
        got = integrate_semi_infinite(lambda x: x * math.exp(-x), 0.0,
                                      scale=scale)
        np.testing.assert_allclose(got, 1.0, rtol=1e-9)


def test_shifted_lower_limit():
    got = integrate_semi_infinite(lambda t: math.exp(-t), 3.0)
    np.testing.assert_allclose(got, math.exp(-3.0), rtol=1e-11)


def test_vectorized_integrands_take_the_fast_path():
    got = integrate_semi_infinite(lambda t: np.exp(-t) * t, 0.0)
    np.testing.assert_allclose(got, 1.0, rtol=1e-11)


def test_peaked_integrand_found_by_subdivision():
    # bump centered far from the origin; the scale hint puts nodes near it
    f = lambda x: math.exp(-((x - 37.0) / 2.0) ** 2)
    got = integrate_semi_infinite(f, 0.0, scale=37.0)
    np.testing.assert_allclose(got, 2.0 * math.sqrt(math.pi), rtol=1e-8)


def test_spec_validation():
    with pytest.raises(ValueError):
        QuadratureSpec(relative_tolerance=0.0)
    with pytest.raises(ValueError):
        QuadratureSpec(max_subdivisions=0)
    with pytest.raises(ValueError):
        integrate(math.sin, 0.0, math.inf)


def test_unreachable_tolerance_raises():
    spec = QuadratureSpec(relative_tolerance=1e-15,
                          absolute_tolerance=1e-300, max_subdivisions=3)
    with pytest.raises(QuadratureError):
        integrate(lambda x: math.sqrt(abs(x - 0.3717)), 0.0, 1.0, spec)
