"""Scripted reproductions that print PASS/FAIL lines with measured values.

Each scenario returns a list of :class:`Check`. The tolerances are the
ones the test suite enforces.
"""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from fracreg.caputo import TimeGrid, caputo_quadrature, lemma1_bound_check
from fracreg.exactsol import example1_problem, exact_dt, exact_dtt
from fracreg.fdsolver import SpaceGrid, convergence_study, solve
from fracreg.problems import example1, example2, manufactured
from fracreg.regdiag import (
    SteadyOperator,
    corollary1_limit_check,
    estimate_singularity_exponent,
    forced_initial_condition,
    theorem_residual,
)
from fracreg.specialfn import (
    FractionalOrder,
    ml_second_time_derivative,
    ml_time_derivative,
    mittag_leffler,
)

__all__ = ["Check", "SCENARIOS", "run_scenario"]

HEAT_ORDERS = (0.3, 0.5, 0.7)
WAVE_ORDERS = (1.2, 1.5, 1.8)


@dataclass(frozen=True)
class Check:
    anchor: str
    description: str
    passed: bool
    measured: str

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return f"{status} [{self.anchor}] {self.description}: {self.measured}"


def _zero(x, t=0.0):
    return np.zeros_like(np.asarray(x, dtype=np.float64))


def _one(x, t=0.0):
    return np.ones_like(np.asarray(x, dtype=np.float64))


# {{{ scenarios


def initial_layer() -> list[Check]:
    checks = []
    t = np.logspace(-6, -3, 31)
    x = math.pi / 2

    for d in HEAT_ORDERS + WAVE_ORDERS:
        p = example1_problem(d)
        derivative = exact_dt if p.delta.ceiling == 1 else exact_dtt
        slope = estimate_singularity_exponent(np.column_stack([t, derivative(p, x, t)]))
        target = d - p.delta.ceiling
        checks.append(Check(
            "initial-layer example",
            f"blow-up exponent, delta = {d}",
            abs(slope - target) <= 0.02,
            f"fitted {slope:.4f}, target {target:.4f}, tol 0.02",
        ))

    report = corollary1_limit_check(example1_problem(0.5), x, [1e-1, 1e-2, 1e-3, 1e-4])
    checks.append(Check(
        "initial-layer example",
        "Caputo derivative does not vanish as t -> 0+",
        not report.vanishes and abs(report.limit_estimate + 1.0) < 0.05,
        f"D^delta v(pi/2, 1e-4) = {report.limit_estimate:.6f}",
    ))

    P = example1(0.5)
    space = SpaceGrid(0.0, math.pi, 64)
    errors = []
    for M in (128, 256, 512):
        sol = solve(P.spec, space, TimeGrid(1.0, M))
        errors.append(float(np.max(np.abs(sol.final - P.exact(space.nodes, 1.0)))))
    monotone = all(b < a for a, b in zip(errors, errors[1:]))
    checks.append(Check(
        "initial-layer example",
        "solver error at t = 1, N = 64, M = 128/256/512",
        monotone and errors[-1] < 5.0e-2,
        ", ".join(f"{e:.3e}" for e in errors),
    ))
    return checks


def zero_collapse() -> list[Check]:
    space = SpaceGrid(0.0, math.pi, 64)
    op = SteadyOperator(0.0, math.pi, _one, _zero, _zero)
    w = forced_initial_condition(op, _zero, (0.0, 0.0), space)
    w_max = float(np.max(np.abs(w)))

    P = example2(0.5)
    sol = solve(P.spec, space, TimeGrid(1.0, 256))
    u_max = float(np.max(np.abs(sol.values)))

    return [
        Check("zero-collapse example", "forced phi0 max-norm", w_max <= 1e-12,
              f"{w_max:.3e} <= 1e-12"),
        Check("zero-collapse example", "solver max-norm on the forced data (N=64, M=256)",
              u_max <= 1e-10, f"{u_max:.3e} <= 1e-10"),
    ]


def order_reduction() -> list[Check]:
    space = SpaceGrid(0.0, math.pi, 1024)
    M_list = (64, 128, 256, 512, 1024)
    checks = []
    cases = [
        ("initial layer, uniform mesh", example1(0.5), 1.0, (0.40, 0.60)),
        ("smooth manufactured solution", manufactured(0.5), 1.0, (1.35, 1.60)),
        ("initial layer, graded mesh r = 3", example1(0.5), 3.0, (1.2, math.inf)),
    ]
    for label, P, grading, (lo, hi) in cases:
        report = convergence_study(P.spec, space, M_list, grading, exact=P.exact)
        checks.append(Check(
            "order-reduction remark",
            f"temporal order, {label}",
            lo <= report.order <= hi,
            f"{report.order:.4f} in [{lo}, {hi}]",
        ))
    return checks


def vanishing_limit() -> list[Check]:
    checks = []
    z = np.linspace(-5, 5, 100)
    e1 = float(np.max(np.abs(mittag_leffler(1.0, z) - np.exp(z))))
    z = np.linspace(0, 5, 100)
    e2 = float(np.max(np.abs(mittag_leffler(2.0, z) - np.cosh(np.sqrt(z)))))
    checks.append(Check("Mittag-Leffler reductions", "|E_1 - exp|, |E_2 - cosh sqrt|",
                        max(e1, e2) <= 1e-12, f"{e1:.2e}, {e2:.2e} <= 1e-12"))

    worst = 0.0
    for d in HEAT_ORDERS + WAVE_ORDERS:
        o = FractionalOrder(d)
        dg: Callable = (
            (lambda s, d=d: ml_time_derivative(d, s)) if o.ceiling == 1
            else (lambda s, d=d: ml_second_time_derivative(d, s))
        )
        for t in (0.25, 0.5, 1.0, 2.0):
            value = caputo_quadrature(dg, o, t, 1e-9)
            worst = max(worst, abs(value + mittag_leffler(d, -t**d)))
    checks.append(Check("Mittag-Leffler eigenfunction identity",
                        "D^delta E(-t^delta) = -E(-t^delta)", worst <= 1e-6,
                        f"max deviation {worst:.2e} <= 1e-6"))

    t = np.logspace(-4, -1, 13)
    pairs = [("sin", d) for d in HEAT_ORDERS]
    pairs += [(g, d) for g in ("t2", "expm1mt") for d in WAVE_ORDERS]
    for g, d in pairs:
        r = lemma1_bound_check(g, d, t, T=0.1)
        target = math.ceil(d) - d
        checks.append(Check(
            "vanishing-limit lemma",
            f"{r.name}, delta = {d}",
            r.bound_holds and abs(r.fitted_exponent - target) <= 0.05,
            f"exponent {r.fitted_exponent:.4f} (target {target:.4f}), "
            f"bound violations {r.violations.size}",
        ))

    r = lemma1_bound_check("tdelta", 0.5, t)
    dev = float(np.max(np.abs(r.values - math.gamma(1.5))))
    checks.append(Check("vanishing-limit lemma", "t^delta keeps D^delta = Gamma(delta + 1)",
                        dev <= 1e-6, f"max deviation {dev:.2e}"))
    return checks


def forced_equation() -> list[Check]:
    space = SpaceGrid(0.0, math.pi, 256)
    h2 = space.h**2
    r1 = theorem_residual(example1(0.5).spec, space)
    r2 = theorem_residual(manufactured(0.5).spec, space)
    return [
        Check("forced-equation theorem", "residual of the initial-layer data",
              abs(r1 - 1.0) <= h2, f"{r1:.6f} = 1 +- {h2:.2e}"),
        Check("forced-equation theorem", "residual of compatible data",
              r2 <= 10 * h2, f"{r2:.3e} <= {10 * h2:.2e}"),
    ]


# }}}


SCENARIOS: dict[str, Callable[[], list[Check]]] = {
    "initial-layer": initial_layer,
    "collapse": zero_collapse,
    "order-reduction": order_reduction,
    "vanishing-limit": vanishing_limit,
    "forced-equation": forced_equation,
}

ALIASES = {"example1": "initial-layer", "example2": "collapse", "remark24": "order-reduction"}


def run_scenario(name: str) -> list[Check]:
    if name == "all":
        return [c for fn in SCENARIOS.values() for c in fn()]
    key = ALIASES.get(name, name)
    try:
        return SCENARIOS[key]()
    except KeyError:
        raise KeyError(f"unknown scenario '{name}'") from None
