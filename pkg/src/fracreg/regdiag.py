r"""Diagnostics for solutions that are assumed smooth up to ``t = 0``.

If the :math:`\lceil\delta\rceil`-th time derivative of ``u`` is continuous
on the closed domain, then :math:`D^\delta_t u(x, t) \to 0` as
:math:`t \to 0^+`, and letting ``t -> 0`` in the equation forces

.. math::

    L_0 \phi_0 := -p(\cdot, 0) \phi_0'' + q(\cdot, 0) \phi_0' + r(\cdot, 0) \phi_0
        = f(\cdot, 0).

Together with the boundary data this two-point problem pins down
:math:`\phi_0` whenever it has at most one solution. The functions here
measure how far given data are from that forced equation, compute the
forced initial value, and fit the blow-up exponent of the time derivatives
near ``t = 0``.
"""

from __future__ import annotations

import enum
import logging
import math
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass

import numpy as np

from fracreg import expressions
from fracreg.caputo import TimeGrid, caputo_quadrature
from fracreg.exactsol import ExactProblem, exact_dt, exact_dtt
from fracreg.fdsolver import (
    ProblemSpec,
    SingularSystemError,
    SpaceGrid,
    _eval,
    _solve_tridiagonal,
    solve,
)
from fracreg.fitting import DegenerateFitError, loglog_slope
from fracreg.specialfn import FractionalOrder, as_order

__all__ = [
    "Assumption1",
    "Corollary1Report",
    "DiagnosticsReport",
    "NonUniquenessWarning",
    "SteadyOperator",
    "assumption1_check",
    "corollary1_limit_check",
    "diagnose",
    "discrete_residual",
    "estimate_singularity_exponent",
    "forced_initial_condition",
    "steady_operator",
    "theorem_residual",
]

logger = logging.getLogger(__name__)

Function1D = Callable[[np.ndarray], "np.ndarray | float"]

#: number of sampling points used by :func:`assumption1_check`
SAMPLING_RESOLUTION = 10_000


class NonUniquenessWarning(UserWarning):
    """No sufficient condition for uniqueness of the forced initial value holds."""


class Assumption1(enum.Enum):
    """Which sufficient condition guarantees at most one forced initial value."""

    MaxPrinciple = "max-principle"
    EnergyCondition = "energy-condition"
    Undetermined = "undetermined"


# {{{ steady operator


@dataclass(frozen=True)
class SteadyOperator:
    """``L0 w = -p0 w'' + q0 w' + r0 w`` on ``[a, b]``.

    ``dq0`` is the derivative of ``q0``; when omitted it is approximated by
    central differences wherever it is needed.
    """

    a: float
    b: float
    p0: Function1D
    q0: Function1D
    r0: Function1D
    dq0: Function1D | None = None

    def __post_init__(self) -> None:
        if not self.b > self.a:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")
        xs = np.linspace(self.a, self.b, 257)
        p_min = float(np.min(_eval(self.p0, xs)))
        if not p_min > 0:
            raise ValueError(f"L0 is not elliptic: min p0 = {p_min:.3e}")

    def derivative_q0(self, x: np.ndarray) -> np.ndarray:
        if self.dq0 is not None:
            return _eval(self.dq0, x)
        eps = 1.0e-6 * (self.b - self.a)
        return (_eval(self.q0, x + eps) - _eval(self.q0, x - eps)) / (2.0 * eps)

    def apply(self, w: np.ndarray, space: SpaceGrid) -> np.ndarray:
        """Apply the difference operator to grid values *w* at interior nodes."""
        x = space.nodes[1:-1]
        h = space.h
        wxx = (w[2:] - 2.0 * w[1:-1] + w[:-2]) / h**2
        wx = (w[2:] - w[:-2]) / (2.0 * h)
        return -_eval(self.p0, x) * wxx + _eval(self.q0, x) * wx + _eval(self.r0, x) * w[1:-1]


def _freeze(fn, t: float) -> Function1D:
    if isinstance(fn, expressions.Expr):
        return fn.at_time(t)
    return lambda x: fn(x, t)


def steady_operator(spec: ProblemSpec) -> SteadyOperator:
    """Freeze the spatial operator of *spec* at ``t = 0``."""
    q0 = _freeze(spec.q, 0.0)
    dq0 = q0.diff("x") if isinstance(q0, expressions.Expr) else None
    return SteadyOperator(
        spec.a, spec.b, _freeze(spec.p, 0.0), q0, _freeze(spec.r, 0.0), dq0
    )


def assumption1_check(
    op: SteadyOperator,
    samples: int = SAMPLING_RESOLUTION,
) -> Assumption1:
    """Check the two sufficient conditions for uniqueness on a dense sample.

    The maximum-principle condition ``r0 >= 0`` is tried first, then the
    energy condition ``p0 == 1`` and ``r0 - q0' / 2 > 0``. A result of
    :attr:`Assumption1.Undetermined` does not mean uniqueness fails.
    """
    # midpoints of a uniform partition: the open interval
    x = op.a + (op.b - op.a) * (np.arange(samples) + 0.5) / samples
    r0 = _eval(op.r0, x)
    if np.all(r0 >= 0.0):
        return Assumption1.MaxPrinciple

    p0 = _eval(op.p0, x)
    if np.all(p0 == 1.0) and np.all(r0 - 0.5 * op.derivative_q0(x) > 0.0):
        return Assumption1.EnergyCondition

    return Assumption1.Undetermined


# }}}


# {{{ forced initial value


def theorem_residual(spec: ProblemSpec, space: SpaceGrid) -> float:
    """Max over interior nodes of ``|L0 phi0 - f(., 0)|``.

    Analytic derivatives are used when ``phi0`` is a catalog expression,
    second differences of the sampled ``phi0`` otherwise (which adds an
    ``O(h^2)`` floor). A clearly positive value means a solution with
    continuous time derivatives up to ``t = 0`` cannot exist.
    """
    return _theorem_residual(spec, space)[0]


def _theorem_residual(spec: ProblemSpec, space: SpaceGrid) -> tuple[float, str]:
    op = steady_operator(spec)
    x = space.nodes
    f0 = _eval(spec.f, x[1:-1], 0.0)

    if isinstance(spec.phi0, expressions.Expr):
        xi = x[1:-1]
        phi0 = spec.phi0
        L0phi0 = (
            -_eval(op.p0, xi) * _eval(phi0.diff("x", 2), xi)
            + _eval(op.q0, xi) * _eval(phi0.diff("x"), xi)
            + _eval(op.r0, xi) * _eval(phi0, xi)
        )
        method = "analytic"
    else:
        L0phi0 = op.apply(_eval(spec.phi0, x), space)
        method = "second-difference"

    return float(np.max(np.abs(L0phi0 - f0))), method


def discrete_residual(
    op: SteadyOperator,
    w: np.ndarray,
    f0: Function1D,
    space: SpaceGrid,
) -> float:
    """Max over interior nodes of ``|L0_h w - f0|`` with difference quotients."""
    return float(np.max(np.abs(op.apply(w, space) - _eval(f0, space.nodes[1:-1]))))


def forced_initial_condition(
    op: SteadyOperator,
    f0: Function1D,
    psi0: tuple[float, float],
    space: SpaceGrid,
) -> np.ndarray:
    """Solve ``L0 w = f0`` on the grid with ``w(a), w(b) = psi0``.

    This is the only initial value compatible with a solution that is
    smooth up to ``t = 0`` when :func:`assumption1_check` certifies
    uniqueness. A singular system is reported as
    :class:`~fracreg.fdsolver.SingularSystemError`.
    """
    if assumption1_check(op) is Assumption1.Undetermined:
        warnings.warn(
            "neither sufficient condition for uniqueness holds; "
            "the forced initial value may not be unique",
            NonUniquenessWarning,
            stacklevel=2,
        )

    x = space.nodes
    xi = x[1:-1]
    h = space.h
    p0 = _eval(op.p0, xi)
    q0 = _eval(op.q0, xi)

    lower = -p0 / h**2 - q0 / (2.0 * h)
    diag = 2.0 * p0 / h**2 + _eval(op.r0, xi)
    upper = -p0 / h**2 + q0 / (2.0 * h)

    rhs = _eval(f0, xi)
    rhs[0] -= lower[0] * psi0[0]
    rhs[-1] -= upper[-1] * psi0[1]

    w = np.empty_like(x)
    w[0], w[-1] = psi0
    w[1:-1] = _solve_tridiagonal(lower, diag, upper, rhs)
    return w


# }}}


# {{{ limits and exponents


@dataclass(frozen=True)
class Corollary1Report:
    x: float
    t: np.ndarray
    values: np.ndarray
    """Quadrature values of ``D^delta_t u(x, t)`` at the samples."""
    limit_estimate: float
    """Value at the smallest sample."""
    vanishes: bool


def corollary1_limit_check(
    source: ExactProblem | Callable[[float, np.ndarray], np.ndarray],
    x: float,
    t_samples: Sequence[float],
    *,
    delta: FractionalOrder | float | None = None,
    tol: float = 1.0e-10,
    vanish_tol: float = 1.0e-3,
) -> Corollary1Report:
    r"""Evaluate :math:`D^\delta_t u(x, t)` at decreasing times.

    *source* is either an :class:`~fracreg.exactsol.ExactProblem` or a
    callable ``(x, t) -> d^m u / dt^m`` with ``m = ceil(delta)``; in the
    latter case *delta* is required. The limit is judged to vanish when
    the value at the smallest sample is at most *vanish_tol* in magnitude.
    """
    t = np.asarray(t_samples, dtype=np.float64)
    if np.any(t <= 0) or np.any(np.diff(t) >= 0):
        raise ValueError("samples must be positive and strictly decreasing")

    if isinstance(source, ExactProblem):
        d = source.delta
        if np.any(t > source.T):
            raise ValueError(f"samples must lie in (0, {source.T}]")
        derivative = exact_dt if d.ceiling == 1 else exact_dtt

        def dg(s):
            return derivative(source, x, s)
    else:
        if delta is None:
            raise ValueError("delta is required for a callable source")
        d = as_order(delta)

        def dg(s):
            return source(x, s)

    values = np.array([caputo_quadrature(dg, d, ti, tol) for ti in t])
    limit = float(values[-1])
    return Corollary1Report(float(x), t, values, limit, abs(limit) <= vanish_tol)


def estimate_singularity_exponent(
    samples: Sequence[tuple[float, float]] | np.ndarray,
) -> float:
    """Least-squares slope of ``log |value|`` against ``log t``.

    Needs at least four samples with positive ``t`` and nonzero values. Fits
    over less than one decade raise :class:`DegenerateFitError`; less than
    two decades is accepted with a warning.
    """
    arr = np.asarray(samples, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != 2 or arr.shape[0] < 4:
        raise DegenerateFitError("need at least four (t, value) samples")

    t, v = arr[:, 0], arr[:, 1]
    if np.any(t <= 0):
        raise DegenerateFitError("sample times must be positive")
    decades = math.log10(np.max(t) / np.min(t))
    if decades < 1.0:
        raise DegenerateFitError(f"samples span only {decades:.2f} decades")
    if decades < 2.0:
        warnings.warn(
            f"samples span only {decades:.2f} decades; the fit may be biased",
            RuntimeWarning,
            stacklevel=2,
        )

    return loglog_slope(t, v)


# }}}


# {{{ report


@dataclass(frozen=True)
class DiagnosticsReport:
    incompat_residual: float
    residual_method: str
    h2_floor: float
    """``h^2`` of the grid the residual was measured on."""
    assumption1: Assumption1
    sampling_resolution: int
    forced_phi0: np.ndarray | None
    """Forced initial value on the space grid; absent when undetermined."""
    forced_phi0_max: float | None
    collapse: bool
    """True when the data vanish once ``phi0`` is replaced by the forced value."""
    fitted_exponent: float | None
    reference_exponent: float
    fit_samples: np.ndarray | None
    """``(t, |d^m u / dt^m|)`` pairs used for the exponent fit."""

    @property
    def smooth_start_possible(self) -> bool:
        """Whether the forced equation holds up to the discretisation floor."""
        return self.incompat_residual <= 10.0 * self.h2_floor

    def summary(self) -> str:
        lines = [
            f"incompat_residual   {self.incompat_residual:.6e} ({self.residual_method})",
            f"h^2 floor           {self.h2_floor:.6e}",
            f"smooth start        {'possible' if self.smooth_start_possible else 'impossible'}",
            f"uniqueness          {self.assumption1.value} "
            f"(sampled at {self.sampling_resolution} points)",
        ]
        if self.forced_phi0_max is not None:
            lines.append(f"forced phi0 max     {self.forced_phi0_max:.6e}")
        lines.append(f"collapse            {str(self.collapse).lower()}")
        if self.fitted_exponent is not None:
            lines.append(
                f"fitted exponent     {self.fitted_exponent:.6f} "
                f"(reference {self.reference_exponent:.6f})"
            )
        return "\n".join(lines)


def _vanishes(fn, x: np.ndarray, times: Sequence[float]) -> bool:
    return all(np.all(_eval(fn, x, t) == 0.0) for t in times)


def _numerical_fit_samples(spec: ProblemSpec, space: SpaceGrid, i: int, M: int) -> np.ndarray:
    d = spec.delta
    if d.ceiling == 1:
        time = TimeGrid(spec.T, M, grading=max(1.0, 2.0 / d.delta))
        sol = solve(spec, space, time)
        t, dq = sol.difference_quotients(i, order=1)
    else:
        time = TimeGrid(spec.T, M)
        sol = solve(spec, space, time)
        t, dq = sol.difference_quotients(i, order=2)

    # skip the first steps, which carry the largest discretisation error
    keep = (t >= t[min(8, t.size - 1)]) & (t <= 0.1 * spec.T) & (dq != 0)
    return np.column_stack([t[keep], np.abs(dq[keep])])


def diagnose(
    spec: ProblemSpec,
    space: SpaceGrid,
    *,
    exact: ExactProblem | None = None,
    fit: str = "auto",
    M: int = 512,
    t_range: tuple[float, float] = (1.0e-6, 1.0e-3),
    n_fit: int = 31,
) -> DiagnosticsReport:
    """Run every diagnostic on *spec*.

    The singularity exponent is fitted from the exact time derivatives of
    *exact* on *t_range* when given (``fit="auto"`` or ``"exact"``), from
    difference quotients of a numerical solve with *M* steps when
    ``fit="numerical"`` (or ``"auto"`` without *exact*), and skipped for
    ``fit="none"``. The fit is taken at the interior node where
    ``|L0 phi0 - f(., 0)|`` is largest.
    """
    residual, method = _theorem_residual(spec, space)
    op = steady_operator(spec)
    status = assumption1_check(op)
    d = spec.delta

    forced = None
    forced_max = None
    if status is not Assumption1.Undetermined:
        psi0 = (spec._psi(spec.a, 0.0), spec._psi(spec.b, 0.0))
        try:
            forced = forced_initial_condition(op, _freeze(spec.f, 0.0), psi0, space)
            forced_max = float(np.max(np.abs(forced)))
        except SingularSystemError:
            logger.warning("forced initial value: singular system")

    x = space.nodes
    times = np.linspace(0.0, spec.T, 9)
    collapse = (
        forced is not None
        and forced_max == 0.0
        and _vanishes(spec.f, x, times)
        and all(spec._psi(xb, t) == 0.0 for xb in (spec.a, spec.b) for t in times)
        and (spec.phi1 is None or np.all(_eval(spec.phi1, x) == 0.0))
    )

    which = "first" if d.ceiling == 1 else "second"
    reference = d.delta - d.ceiling
    xi = x[1:-1]
    f0 = _eval(spec.f, xi, 0.0)
    phi0 = _eval(spec.phi0, x)
    # the node where the forced equation fails most; the midpoint if it holds
    mismatch = np.abs(op.apply(phi0, space) - f0)
    i = int(np.argmax(mismatch)) + 1 if np.max(mismatch) > 0 else space.N // 2

    samples = None
    if fit == "auto":
        fit = "exact" if exact is not None else "numerical"
    if fit == "exact":
        if exact is None:
            raise ValueError("fit='exact' needs an exact problem")
        t = np.logspace(math.log10(t_range[0]), math.log10(t_range[1]), n_fit)
        derivative = exact_dt if which == "first" else exact_dtt
        samples = np.column_stack([t, np.abs(derivative(exact, float(x[i]), t))])
    elif fit == "numerical":
        samples = _numerical_fit_samples(spec, space, i, M)
    elif fit != "none":
        raise ValueError(f"unknown fit mode: {fit!r}")

    fitted = None
    if samples is not None:
        samples = samples[samples[:, 1] > 0]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", RuntimeWarning)
                fitted = estimate_singularity_exponent(samples)
        except DegenerateFitError as exc:
            logger.warning("singularity exponent not fitted: %s", exc)

    return DiagnosticsReport(
        incompat_residual=residual,
        residual_method=method,
        h2_floor=space.h**2,
        assumption1=status,
        sampling_resolution=SAMPLING_RESOLUTION,
        forced_phi0=forced,
        forced_phi0_max=forced_max,
        collapse=bool(collapse),
        fitted_exponent=fitted,
        reference_exponent=reference,
        fit_samples=samples,
    )


# }}}
