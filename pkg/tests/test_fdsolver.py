import math
import warnings

import numpy as np
import pytest

from fracreg.caputo import SampledFunction, TimeGrid, l1_operator, l2_operator
from fracreg.exactsol import example1_problem, exact_value
from fracreg.expressions import parse
from fracreg.fdsolver import (
    MeshPecletWarning,
    ProblemSpec,
    SpaceGrid,
    convergence_study,
    fitted_order,
    solve,
)
from fracreg.problems import example1, manufactured


def make_spec(delta=0.5, T=1.0, **kwargs):
    data = {"p": "1", "q": "0", "r": "0", "f": "0", "psi": "0", "phi0": "0"}
    if delta > 1:
        data["phi1"] = "0"
    data.update(kwargs)
    fields = {k: parse(v) for k, v in data.items()}
    return ProblemSpec(a=0.0, b=math.pi, T=T, delta=delta, **fields)


# {{{ problem validation


def test_spec_records_p_min():
    spec = make_spec(p="2 + sin(x)*t")
    assert spec.p_min == pytest.approx(2.0)


@pytest.mark.parametrize(
    ("delta", "kwargs"),
    [
        (0.5, {"phi0": "1"}),                 # phi0(0) != psi(0, 0)
        (0.5, {"p": "x - 1"}),                # not elliptic
        (0.5, {"p": "1 - t"}),                # degenerates at t = T
        (0.5, {"phi1": "0"}),                 # velocity for a heat order
    ],
)
def test_spec_rejects(delta, kwargs):
    with pytest.raises(ValueError):
        make_spec(delta, **kwargs)


def test_spec_requires_velocity_for_wave_orders():
    with pytest.raises(ValueError):
        ProblemSpec(0.0, 1.0, 1.0, 1.5, *(parse("1"),) + (parse("0"),) * 5)


def test_space_grid():
    grid = SpaceGrid(0.0, 2.0, 8)
    assert grid.h == 0.25
    assert grid.nodes[-1] == 2.0
    assert grid.refined(2).N == 16
    with pytest.raises(ValueError):
        SpaceGrid(0.0, 1.0, 1)


def test_solve_rejects_mismatched_grids():
    spec = make_spec()
    with pytest.raises(ValueError):
        solve(spec, SpaceGrid(0.0, 1.0, 8), TimeGrid(1.0, 8))
    with pytest.raises(ValueError):
        solve(spec, SpaceGrid(0.0, math.pi, 8), TimeGrid(2.0, 8))
    with pytest.raises(ValueError):
        solve(make_spec(1.5), SpaceGrid(0.0, math.pi, 8), TimeGrid(1.0, 8, 2.0))


# }}}


# {{{ solve


@pytest.mark.parametrize(("delta", "grading"), [(0.5, 1.0), (0.3, 2.0), (1.5, 1.0)])
def test_zero_data_gives_zero(delta, grading):
    sol = solve(make_spec(delta), SpaceGrid(0.0, math.pi, 16), TimeGrid(1.0, 32, grading))
    assert np.all(sol.values == 0.0)


def test_rows_are_pinned():
    spec = make_spec(
        0.6,
        p="1 + x/4",
        q="cos(x)",
        r="1",
        f="exp(-t)*x",
        psi="x/pi + t**2",
        phi0="x/pi + sin(2*x)",
    )
    space = SpaceGrid(0.0, math.pi, 20)
    time = TimeGrid(1.0, 25, 1.7)
    sol = solve(spec, space, time)
    assert np.all(sol.values[0] == spec.phi0(space.nodes))
    for i, xb in ((0, 0.0), (-1, math.pi)):
        assert np.all(sol.values[1:, i] == [spec.psi(xb, t) for t in time.nodes[1:]])
    assert sol.values[-1, -1] == pytest.approx(2.0, abs=1e-15)


def test_l1_scheme_equation_holds():
    # the computed field satisfies the discrete equation it was built from
    spec = make_spec(0.4, p="1 + x/4", q="1/2", r="x", f="t*sin(x)", phi0="sin(x)")
    space = SpaceGrid(0.0, math.pi, 24)
    time = TimeGrid(1.0, 40, 2.5)
    U = solve(spec, space, time).values
    x, h = space.nodes[1:-1], space.h

    dtu = np.column_stack([
        l1_operator(SampledFunction(time, U[:, i]), 0.4).values for i in range(1, space.N)
    ])
    for n in range(1, time.M + 1):
        u = U[n]
        uxx = (u[2:] - 2 * u[1:-1] + u[:-2]) / h**2
        ux = (u[2:] - u[:-2]) / (2 * h)
        residual = dtu[n] - (1 + x / 4) * uxx + 0.5 * ux + x * u[1:-1] - time.nodes[n] * np.sin(x)
        assert np.max(np.abs(residual)) <= 1e-9


def test_l2_scheme_equation_holds():
    spec = make_spec(1.4, phi0="sin(x)", phi1="sin(2*x)", f="t*sin(x)")
    space = SpaceGrid(0.0, math.pi, 16)
    time = TimeGrid(1.0, 30)
    U = solve(spec, space, time).values
    x, h = space.nodes[1:-1], space.h

    for i in range(1, space.N):
        d = l2_operator(SampledFunction(time, U[:, i]), 1.4, math.sin(2 * x[i - 1])).values
        uxx = (U[:, i + 1] - 2 * U[:, i] + U[:, i - 1]) / h**2
        residual = d[1:] - uxx[1:] - time.nodes[1:] * math.sin(x[i - 1])
        assert np.max(np.abs(residual)) <= 1e-9


def test_example1_heat_error():
    # DERIVED thresholds: oracle = exact Mittag-Leffler solution;
    # measured 6.085e-04, 3.287e-04, 1.907e-04 for M = 128, 256, 512
    P = example1(0.5)
    space = SpaceGrid(0.0, math.pi, 64)
    errors = []
    for M in (128, 256, 512):
        sol = solve(P.spec, space, TimeGrid(1.0, M))
        errors.append(np.max(np.abs(sol.final - P.exact(space.nodes, 1.0))))
    assert errors[0] > errors[1] > errors[2]
    assert errors[-1] < 5e-2


def test_example1_wave_error_decreases():
    P = example1(1.5)
    space = SpaceGrid(0.0, math.pi, 64)
    errors = []
    for M in (32, 64, 128):
        sol = solve(P.spec, space, TimeGrid(1.0, M))
        errors.append(np.max(np.abs(sol.final - P.exact(space.nodes, 1.0))))
    assert errors[0] > errors[1] > errors[2]


@pytest.mark.parametrize("grading", [1.0, 2.0])
def test_discrete_maximum_principle(grading):
    spec = make_spec(
        0.7,
        p="1 + sin(x)/2",
        q="3/10",
        r="1 + x",
        f="-(1 + t)*x",
        psi="-t*x/pi",
        phi0="-sin(x)",
    )
    sol = solve(spec, SpaceGrid(0.0, math.pi, 40), TimeGrid(1.0, 60, grading))
    assert np.max(sol.values) <= 1e-12


def test_peclet_warning():
    spec = make_spec(q="100")
    with pytest.warns(MeshPecletWarning):
        solve(spec, SpaceGrid(0.0, math.pi, 8), TimeGrid(1.0, 4))
    with warnings.catch_warnings():
        warnings.simplefilter("error")
        solve(spec, SpaceGrid(0.0, math.pi, 512), TimeGrid(1.0, 4))


def test_manufactured_spatial_order():
    # temporal error is over-resolved: dt^(2 - delta) ~ 3e-5 at M = 1024
    P = manufactured(0.5)
    hs, errs = [], []
    for N in (8, 16, 32):
        space = SpaceGrid(0.0, math.pi, N)
        sol = solve(P.spec, space, TimeGrid(1.0, 1024))
        hs.append(space.h)
        errs.append(np.max(np.abs(sol.final - P.exact(space.nodes, 1.0))))
    assert fitted_order(hs, errs) >= 1.9


def test_difference_quotients():
    P = example1(0.5)
    space = SpaceGrid(0.0, math.pi, 16)
    sol = solve(P.spec, space, TimeGrid(1.0, 20, 2.0))
    t1, d1 = sol.difference_quotients(8, 1)
    t2, d2 = sol.difference_quotients(8, 2)
    assert t1.shape == d1.shape == (20,)
    assert t2.shape == d2.shape == (19,)
    assert np.all(d1 < 0)
    with pytest.raises(ValueError):
        sol.difference_quotients(8, 3)


def test_problem_catalog_matches_exactsol():
    # the problem catalog and the exact-solution module agree
    P = example1(0.7)
    x = np.linspace(0, math.pi, 9)
    assert np.array_equal(P.exact(x, 0.5), exact_value(example1_problem(0.7), x, 0.5))


# }}}


# {{{ convergence


def test_convergence_study_validation():
    P = example1(0.5)
    space = SpaceGrid(0.0, math.pi, 8)
    with pytest.raises(ValueError):
        convergence_study(P.spec, space, [8, 16])
    with pytest.raises(ValueError):
        convergence_study(P.spec, space, [8, 16, 16])
    with pytest.raises(ValueError):
        convergence_study(P.spec, space, [3, 5, 7])


def test_convergence_study_fine_reference():
    P = example1(0.5)
    report = convergence_study(P.spec, SpaceGrid(0.0, math.pi, 16), [8, 16, 32])
    assert report.reference.startswith("fine mesh M = 128")
    assert np.all(np.diff(report.errors) < 0)
    assert 0.3 < report.order < 1.2
    assert "fitted order" in report.table()


def test_manufactured_temporal_order():
    P = manufactured(0.5)
    report = convergence_study(
        P.spec, SpaceGrid(0.0, math.pi, 512), [16, 32, 64, 128], exact=P.exact
    )
    assert report.order >= 2 - 0.5 - 0.1
    assert report.errors_final.shape == (4,)


def test_fitted_order_exact_power():
    dt = np.array([0.1, 0.05, 0.025])
    assert fitted_order(dt, 3.0 * dt**1.5) == pytest.approx(1.5, abs=1e-12)


# }}}
