import math

import numpy as np
import pytest

from fracreg.caputo import (
    QuadratureError,
    SampledFunction,
    TimeGrid,
    caputo_quadrature,
    catalog_function,
    l1_operator,
    l1_weights,
    l2_operator,
    lemma1_bound_check,
)
from fracreg.fitting import loglog_slope
from fracreg.specialfn import DomainError, FractionalOrder


def power_rule(beta, delta, t):
    return math.gamma(beta + 1) / math.gamma(beta + 1 - delta) * t ** (beta - delta)


# {{{ grids


@pytest.mark.parametrize("grading", [1.0, 1.5, 3.0])
def test_time_grid_nodes(grading):
    grid = TimeGrid(2.0, 37, grading)
    t = grid.nodes
    assert t[0] == 0.0
    assert t[-1] == 2.0
    assert np.all(np.diff(t) > 0)
    assert not t.flags.writeable


def test_time_grid_uniform_ratio():
    steps = TimeGrid(1.0, 100).steps
    assert np.max(steps) / np.min(steps) == pytest.approx(1.0, abs=1e-12)


@pytest.mark.parametrize("args", [(0.0, 4), (1.0, 0), (1.0, 2.5), (1.0, 4, 0.5)])
def test_time_grid_rejects(args):
    with pytest.raises(ValueError):
        TimeGrid(*args)


def test_sampled_function_length():
    with pytest.raises(ValueError):
        SampledFunction(TimeGrid(1.0, 4), np.zeros(4))


# }}}


# {{{ quadrature


@pytest.mark.parametrize("delta", [0.2, 0.5, 0.9])
def test_quadrature_constant(delta):
    assert caputo_quadrature(lambda s: np.zeros_like(s), delta, 0.7) == 0.0


@pytest.mark.parametrize(
    ("beta", "delta", "t"),
    [(2.0, 0.5, 1.0), (2.0, 0.5, 1e-4), (3.0, 1.5, 0.8), (2.0, 1.8, 2.0), (1.0, 0.3, 0.5)],
)
def test_quadrature_power_rule(beta, delta, t):
    m = FractionalOrder(delta).ceiling
    coeff = math.prod(beta - i for i in range(m))

    def dg(s):
        return coeff * s ** (beta - m)

    assert caputo_quadrature(dg, delta, t) == pytest.approx(
        power_rule(beta, delta, t), abs=1e-10
    )


@pytest.mark.parametrize(
    ("dg", "delta", "t", "expected"),
    [
        # closed-form series sum_k (-1)^k t^(2k+1-delta) / Gamma(2k+2-delta), mpmath 40 digits
        (np.cos, 0.3, 1.0, 0.87420888176872975617),
        (np.cos, 0.7, 0.5, 0.83069665756004262810),
        # mpmath quad of (t - s)^(0.5 - 1) e^s / Gamma(0.5), 30 digits
        (np.exp, 1.5, 1.0, 2.2906982523032382093),
    ],
)
def test_quadrature_frozen(dg, delta, t, expected):
    assert caputo_quadrature(dg, delta, t, 1e-12) == pytest.approx(expected, abs=1e-12)


def test_quadrature_singular_integrand():
    # g = t^delta: g' = delta t^(delta - 1) is integrable but unbounded at 0
    d = 0.4

    def dg(s):
        return d * s ** (d - 1)

    assert caputo_quadrature(dg, d, 0.3) == pytest.approx(math.gamma(1 + d), abs=1e-9)


def test_quadrature_accepts_scalar_callables():
    assert caputo_quadrature(math.cos, 0.3, 1.0) == pytest.approx(
        0.87420888176872975617, abs=1e-10
    )


def test_quadrature_errors():
    with pytest.raises(DomainError):
        caputo_quadrature(np.cos, 0.5, 0.0)
    with pytest.raises(ValueError):
        caputo_quadrature(np.cos, 0.5, 1.0, tol=0.0)
    with pytest.raises(QuadratureError):
        caputo_quadrature(np.cos, 0.5, 1.0, 1e-14, max_panels=2)


# }}}


# {{{ L1


@pytest.mark.parametrize("grading", [1.0, 2.0])
def test_l1_constants(grading):
    grid = TimeGrid(1.0, 50, grading)
    out = l1_operator(SampledFunction(grid, np.full(51, 3.7)), 0.4)
    assert np.all(out.values == 0.0)


def test_l1_linearity():
    grid = TimeGrid(1.5, 40, 2.0)
    f = SampledFunction.from_callable(grid, np.sin)
    g = SampledFunction.from_callable(grid, lambda s: s**2.5)
    lhs = l1_operator(2.0 * f + (-3.0) * g, 0.6).values
    rhs = 2.0 * l1_operator(f, 0.6).values - 3.0 * l1_operator(g, 0.6).values
    assert np.max(np.abs(lhs - rhs)) <= 1e-13


def test_l1_node_zero_and_weights_read_only():
    grid = TimeGrid(1.0, 8)
    f = SampledFunction.from_callable(grid, np.sin)
    assert l1_operator(f, 0.5).values[0] == 0.0
    W = l1_weights(grid, FractionalOrder(0.5))
    assert not W.flags.writeable
    assert np.all(np.triu(W[:, 1:], k=1) == 0.0)


def test_l1_linear_function_is_exact():
    # for piecewise linear data the L1 formula integrates the kernel exactly
    grid = TimeGrid(1.0, 16, 2.0)
    f = SampledFunction.from_callable(grid, lambda s: s)
    out = l1_operator(f, 0.5).values
    expected = grid.nodes**0.5 / math.gamma(1.5)
    assert np.max(np.abs(out - expected)) <= 1e-13


def test_l1_tdelta_approaches_gamma():
    errs = []
    for M in (64, 256, 1024):
        f = SampledFunction.from_callable(TimeGrid(1.0, M), lambda s: s**0.5)
        errs.append(abs(l1_operator(f, 0.5).values[-1] - math.gamma(1.5)))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 1e-3


@pytest.mark.parametrize("delta", [0.3, 0.5, 0.7])
@pytest.mark.parametrize("name", ["t2", "t3", "sin", "expm1mt"])
def test_l1_converges_to_quadrature(name, delta):
    g = catalog_function(name)
    ref = caputo_quadrature(g.derivatives[0], delta, 1.0)
    Ms = [32, 64, 128, 256]
    errs = []
    for M in Ms:
        f = SampledFunction.from_callable(TimeGrid(1.0, M), g.value)
        errs.append(abs(l1_operator(f, delta).values[-1] - ref))
    order = -loglog_slope(Ms, errs)
    assert order >= 2 - delta - 0.1


def test_l1_rejects_wave_orders():
    f = SampledFunction.from_callable(TimeGrid(1.0, 4), np.sin)
    with pytest.raises(DomainError):
        l1_operator(f, 1.5)


# }}}


# {{{ L2


def test_l2_linear_is_zero():
    grid = TimeGrid(2.0, 30)
    f = SampledFunction.from_callable(grid, lambda s: 1.5 - 0.25 * s)
    out = l2_operator(f, 1.3, phi1=-0.25).values
    assert np.max(np.abs(out)) <= 1e-12


def test_l2_constants_exact():
    grid = TimeGrid(1.0, 30)
    out = l2_operator(SampledFunction(grid, np.full(31, -2.0)), 1.7, phi1=0.0)
    assert np.all(out.values == 0.0)


def test_l2_quadratic_is_exact():
    # second differences of t^2 are exact, including the ghost level
    grid = TimeGrid(1.0, 64)
    f = SampledFunction.from_callable(grid, lambda s: s**2)
    out = l2_operator(f, 1.5, 0.0).values
    assert np.max(np.abs(out - 2.0 * grid.nodes**0.5 / math.gamma(1.5))) <= 1e-12
    assert out[-1] == pytest.approx(2.25676, abs=1e-5)


def test_l2_cubic_example():
    expected = 6.0 / math.gamma(2.5)
    errs = []
    for M in (64, 256, 1024):
        f = SampledFunction.from_callable(TimeGrid(1.0, M), lambda s: s**3)
        errs.append(abs(l2_operator(f, 1.5, 0.0).values[-1] - expected))
    assert errs[0] > errs[1] > errs[2]
    assert errs[-1] < 5e-3


@pytest.mark.parametrize("delta", [1.2, 1.5, 1.8])
@pytest.mark.parametrize("name", ["t3", "sin", "expm1mt"])
def test_l2_converges_to_quadrature(name, delta):
    g = catalog_function(name)
    ref = caputo_quadrature(g.derivatives[1], delta, 1.0)
    phi1 = float(g.derivatives[0](np.array([0.0]))[0])
    Ms = [32, 64, 128, 256]
    errs = []
    for M in Ms:
        f = SampledFunction.from_callable(TimeGrid(1.0, M), g.value)
        errs.append(abs(l2_operator(f, delta, phi1).values[-1] - ref))
    assert -loglog_slope(Ms, errs) > 0.0


def test_l2_rejects():
    f = SampledFunction.from_callable(TimeGrid(1.0, 8, 2.0), np.sin)
    with pytest.raises(ValueError):
        l2_operator(f, 1.5, 1.0)
    g = SampledFunction.from_callable(TimeGrid(1.0, 8), np.sin)
    with pytest.raises(DomainError):
        l2_operator(g, 0.5, 1.0)


# }}}


# {{{ vanishing limit


def test_lemma1_t2_example():
    r = lemma1_bound_check("t2", 0.5, [1e-4], T=1.0)
    expected = 2 * 1e-4**1.5 / math.gamma(2.5)
    assert r.values[0] == pytest.approx(expected, abs=r.tol)
    assert expected == pytest.approx(1.504e-6, rel=1e-3)
    assert r.bound_holds


def test_lemma1_sin_exponent():
    r = lemma1_bound_check("sin", 0.3, np.logspace(-4, -1, 13))
    assert r.in_class and r.bound_holds
    assert r.fitted_exponent == pytest.approx(0.7, abs=0.05)
    assert np.all(np.diff(r.values) > 0)


@pytest.mark.parametrize("delta", [0.3, 0.5, 0.7, 1.2, 1.5, 1.8])
def test_lemma1_t3_leading_power(delta):
    r = lemma1_bound_check("t3", delta, np.logspace(-4, -1, 13))
    assert r.bound_holds
    assert r.fitted_exponent == pytest.approx(3.0 - delta, abs=1e-4)
    assert r.expected_exponent == pytest.approx(3.0 - delta)


def test_lemma1_counterexample():
    r = lemma1_bound_check("tdelta", 0.5, np.logspace(-4, -1, 7))
    assert not r.in_class
    assert np.max(np.abs(r.values - 0.886226925452758)) <= 1e-6


def test_catalog_unknown():
    with pytest.raises(KeyError):
        catalog_function("cosh")
    with pytest.raises(DomainError):
        lemma1_bound_check("t2", 0.5, [0.0, 0.1])


# }}}
