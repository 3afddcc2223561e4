import math

import mpmath
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from fracreg.specialfn import (
    DomainError,
    FractionalOrder,
    NonConvergenceError,
    PrecisionLossError,
    SeriesEvalConfig,
    gamma,
    log_gamma,
    ml_second_time_derivative,
    ml_time_derivative,
    mittag_leffler,
)

# {{{ types


@pytest.mark.parametrize("delta", [0.0, 1.0, 2.0, -0.5, 2.5, math.nan])
def test_fractional_order_rejects(delta):
    with pytest.raises(DomainError):
        FractionalOrder(delta)


@pytest.mark.parametrize(("delta", "ceiling"), [(0.01, 1), (0.5, 1), (0.999, 1), (1.001, 2), (1.5, 2)])
def test_fractional_order_ceiling(delta, ceiling):
    assert FractionalOrder(delta).ceiling == ceiling


@pytest.mark.parametrize(
    "kwargs",
    [{"abs_tol": 0.0}, {"max_terms": 0}, {"arg_bound": -1.0}, {"max_rounding": 0.0}],
)
def test_series_config_rejects(kwargs):
    with pytest.raises(ValueError):
        SeriesEvalConfig(**kwargs)


# }}}


# {{{ gamma


def test_gamma_examples():
    assert gamma(1.0) == pytest.approx(1.0, rel=1e-15)
    assert gamma(5.0) == pytest.approx(24.0, rel=1e-14)
    assert gamma(0.5) == pytest.approx(math.sqrt(math.pi), rel=1e-14)


def test_gamma_relative_accuracy():
    x = np.concatenate([np.linspace(1e-3, 50.0, 2001), np.logspace(-8, 0, 50)])
    rel = [abs(gamma(xi) / float(mpmath.gamma(xi)) - 1.0) for xi in x]
    assert max(rel) <= 1e-13


def test_log_gamma_matches_gamma():
    for x in [0.1, 0.5, 1.7, 12.3, 49.0]:
        assert log_gamma(x) == pytest.approx(math.log(gamma(x)), abs=1e-13)
    assert log_gamma(500.0) == pytest.approx(float(mpmath.loggamma(500)), rel=1e-14)


@pytest.mark.parametrize("x", [0.0, -1.0, -0.5])
def test_gamma_domain(x):
    with pytest.raises(DomainError):
        gamma(x)


# }}}


# {{{ Mittag-Leffler


def test_mittag_leffler_examples():
    assert mittag_leffler(1.0, 1.0) == pytest.approx(math.e, abs=1e-14)
    assert mittag_leffler(2.0, 1.0) == pytest.approx(math.cosh(1.0), abs=1e-14)
    assert mittag_leffler(0.7, 0.0) == 1.0


def test_mittag_leffler_half_closed_form():
    # E_{1/2}(-z) = exp(z^2) erfc(z)
    assert mittag_leffler(0.5, -1.0) == pytest.approx(math.e * math.erfc(1.0), abs=1e-14)


@pytest.mark.parametrize(
    ("alpha", "z", "expected"),
    [
        # mpmath series at 40 digits
        (0.7, -2.0, 0.21378672701529726519),
        (1.5, -1.0, 0.39662936531808808449),
    ],
)
def test_mittag_leffler_frozen(alpha, z, expected):
    assert mittag_leffler(alpha, z) == pytest.approx(expected, abs=1e-14)


def test_mittag_leffler_reductions():
    z = np.linspace(-5, 5, 101)
    assert np.max(np.abs(mittag_leffler(1.0, z) - np.exp(z))) <= 1e-12
    z = np.linspace(0, 5, 101)
    assert np.max(np.abs(mittag_leffler(2.0, z) - np.cosh(np.sqrt(z)))) <= 1e-12


def test_mittag_leffler_array_matches_scalar():
    z = np.array([-1.5, 0.0, 0.25, 2.0])
    values = mittag_leffler(0.6, z)
    assert isinstance(values, np.ndarray)
    for zi, vi in zip(z, values):
        assert mittag_leffler(0.6, float(zi)) == vi


def test_mittag_leffler_errors():
    with pytest.raises(DomainError):
        mittag_leffler(0.0, 1.0)
    with pytest.raises(DomainError):
        mittag_leffler(0.5, -51.0)
    with pytest.raises(NonConvergenceError):
        mittag_leffler(1.0, 3.0, SeriesEvalConfig(max_terms=5))


@settings(max_examples=60, deadline=None)
@given(
    alpha=st.floats(0.5, 2.0),
    z=st.floats(-2.0, 2.0),
    old_tol=st.floats(1e-10, 1e-4),
)
def test_monotone_truncation(alpha, z, old_tol):
    coarse = mittag_leffler(alpha, z, SeriesEvalConfig(abs_tol=old_tol))
    fine = mittag_leffler(alpha, z, SeriesEvalConfig(abs_tol=old_tol * 1e-6))
    longer = mittag_leffler(alpha, z, SeriesEvalConfig(abs_tol=old_tol, max_terms=5000))
    assert abs(fine - coarse) <= old_tol
    assert longer == coarse


# }}}


# {{{ time derivatives


def _central(f, t, h):
    return (f(t + h) - f(t - h)) / (2 * h)


def test_time_derivative_finite_difference():
    def E(t):
        return mittag_leffler(0.5, -(t**0.5))

    assert ml_time_derivative(0.5, 1.0) == pytest.approx(_central(E, 1.0, 1e-6), abs=1e-8)


@pytest.mark.parametrize(
    ("delta", "t", "lam", "expected"),
    [
        # mpmath series at 40 digits
        (0.5, 1.0, 1.0, -0.13660600739194928254),
        (0.3, 1e-3, 4.0, -72.024789003367207564),
    ],
)
def test_time_derivative_frozen(delta, t, lam, expected):
    assert ml_time_derivative(delta, t, lam=lam) == pytest.approx(expected, rel=1e-13)


def test_time_derivative_cancellation_guard():
    # |terms| peak near 1e15 while the sum is O(0.1)
    with pytest.raises(PrecisionLossError):
        ml_time_derivative(0.3, 0.5, lam=4.0)


def test_time_derivative_leading_term():
    t = 1e-8
    lead = -(t**-0.5) / math.sqrt(math.pi)
    value = ml_time_derivative(0.5, t)
    assert value == pytest.approx(lead, rel=1e-3)
    assert abs(value) == pytest.approx(5641.9, rel=2e-4)

    lead = -(t**0.5) / gamma(1.5)
    assert ml_time_derivative(1.5, t) == pytest.approx(lead, rel=1e-6)


def test_time_derivative_domain():
    with pytest.raises(DomainError):
        ml_time_derivative(0.5, 0.0)
    with pytest.raises(DomainError):
        ml_time_derivative(0.5, -1.0)


def test_second_derivative_finite_difference():
    def E(t):
        return mittag_leffler(1.5, -(t**1.5))

    h = 1e-4
    fd = (E(1.0 + h) - 2 * E(1.0) + E(1.0 - h)) / h**2
    assert ml_second_time_derivative(1.5, 1.0) == pytest.approx(fd, abs=1e-6)


@pytest.mark.parametrize(
    ("delta", "t", "lam", "expected"),
    [
        # mpmath series at 40 digits
        (1.5, 1.0, 1.0, 0.17329266435413842723),
        (1.2, 0.1, 9.0, 13.153577211194192854),
    ],
)
def test_second_derivative_frozen(delta, t, lam, expected):
    assert ml_second_time_derivative(delta, t, lam=lam) == pytest.approx(expected, rel=1e-12)


def test_second_derivative_asymptotics():
    t = 1e-6
    assert abs(ml_second_time_derivative(1.5, t)) == pytest.approx(
        t**-0.5 / math.sqrt(math.pi), rel=1e-5
    )

    t1, t2 = 1e-4, 5e-5
    v1, v2 = ml_second_time_derivative(1.2, t1), ml_second_time_derivative(1.2, t2)
    assert v1 < 0 and v2 < 0
    slope = math.log(abs(v1) / abs(v2)) / math.log(t1 / t2)
    assert slope == pytest.approx(1.2 - 2.0, abs=5e-3)


def test_second_derivative_rejects_heat_orders():
    with pytest.raises(DomainError):
        ml_second_time_derivative(0.5, 1.0)


# }}}
