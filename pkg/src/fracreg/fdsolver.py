r"""Implicit finite differences for the 1D problem

.. math::

    D^\delta_t u - p u_{xx} + q u_x + r u = f \quad \text{on } (a, b) \times (0, T],

with Dirichlet data :math:`u = \psi` at :math:`x \in \{a, b\}`, the initial
value :math:`u(\cdot, 0) = \phi_0` and, for :math:`1 < \delta < 2`, the
initial velocity :math:`u_t(\cdot, 0) = \phi_1`.

Time is discretised by the L1 operator (:math:`\delta < 1`, any graded
mesh) or the L2 operator (:math:`\delta > 1`, uniform mesh) from
:mod:`fracreg.caputo`; space by second-order central differences. All
spatial terms are taken at the new time level.
"""

from __future__ import annotations

import logging
import warnings
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
import scipy.linalg

from fracreg.caputo import TimeGrid, l1_weights, l2_weights
from fracreg.specialfn import FractionalOrder, as_order

__all__ = [
    "ConvergenceReport",
    "MeshPecletWarning",
    "ProblemSpec",
    "SingularSystemError",
    "SolutionField",
    "SpaceGrid",
    "convergence_study",
    "solve",
]

logger = logging.getLogger(__name__)

Coefficient = Callable[..., "np.ndarray | float"]

COMPATIBILITY_TOL = 1.0e-12


class SingularSystemError(np.linalg.LinAlgError):
    """Raised when a linear system of the scheme is singular."""


class MeshPecletWarning(UserWarning):
    """Central differencing of the convection term may oscillate."""


def _eval(fn: Coefficient, x: np.ndarray, *args: float) -> np.ndarray:
    value = np.asarray(fn(x, *args), dtype=np.float64)
    return np.broadcast_to(value, x.shape).astype(np.float64, copy=True)


# {{{ problem and grids


@dataclass(frozen=True)
class ProblemSpec:
    """Data of the initial-boundary value problem on ``[a, b] x [0, T]``.

    Coefficients ``p, q, r, f`` are called as ``fn(x, t)`` with an array
    ``x`` and a scalar ``t``; ``psi(x, t)`` is only called with ``x`` equal
    to ``a`` or ``b``; ``phi0(x)`` and ``phi1(x)`` take arrays.
    """

    a: float
    b: float
    T: float
    delta: FractionalOrder
    p: Coefficient
    q: Coefficient
    r: Coefficient
    f: Coefficient
    psi: Coefficient
    phi0: Coefficient
    phi1: Coefficient | None = None
    ellipticity_samples: int = 64
    p_min: float = field(init=False, default=float("nan"))

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", as_order(self.delta))
        if not self.b > self.a:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")
        if not self.T > 0:
            raise ValueError(f"horizon must be positive: {self.T}")

        if (self.phi1 is None) != (self.delta.ceiling == 1):
            raise ValueError(
                "an initial velocity phi1 is required exactly when delta lies in (1, 2)"
            )

        # compatibility of initial and boundary data at the corners
        for xb in (self.a, self.b):
            gap = abs(float(_eval(self.phi0, np.array([xb]))[0]) - self._psi(xb, 0.0))
            if gap > COMPATIBILITY_TOL:
                raise ValueError(
                    f"incompatible data: phi0({xb}) differs from psi({xb}, 0) by {gap:.3e}"
                )

        # uniform ellipticity, checked on a sampling of the closed rectangle
        n = self.ellipticity_samples
        xs = np.linspace(self.a, self.b, n + 1)
        p_min = min(float(np.min(_eval(self.p, xs, t))) for t in np.linspace(0, self.T, n + 1))
        if not p_min > 0:
            raise ValueError(f"operator is not uniformly elliptic: min p = {p_min:.3e}")
        object.__setattr__(self, "p_min", p_min)

    def _psi(self, xb: float, t: float) -> float:
        return float(np.asarray(self.psi(xb, t), dtype=np.float64))


@dataclass(frozen=True)
class SpaceGrid:
    """Uniform partition of ``[a, b]`` into ``N`` cells."""

    a: float
    b: float
    N: int

    def __post_init__(self) -> None:
        if int(self.N) != self.N or self.N < 2:
            raise ValueError(f"need at least two cells: N = {self.N}")
        if not self.b > self.a:
            raise ValueError(f"empty interval [{self.a}, {self.b}]")

    @classmethod
    def for_problem(cls, spec: ProblemSpec, N: int) -> SpaceGrid:
        return cls(spec.a, spec.b, N)

    @cached_property
    def nodes(self) -> np.ndarray:
        x = np.linspace(self.a, self.b, self.N + 1)
        x.flags.writeable = False
        return x

    @property
    def h(self) -> float:
        return (self.b - self.a) / self.N

    def refined(self, factor: int) -> SpaceGrid:
        return SpaceGrid(self.a, self.b, self.N * factor)


@dataclass(frozen=True)
class SolutionField:
    """Discrete solution; ``values[n, i]`` approximates ``u(x_i, t_n)``."""

    space: SpaceGrid
    time: TimeGrid
    values: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        shape = (self.time.M + 1, self.space.N + 1)
        if self.values.shape != shape:
            raise ValueError(f"expected values of shape {shape}, got {self.values.shape}")

    @property
    def final(self) -> np.ndarray:
        return self.values[-1]

    def difference_quotients(self, i: int, order: int = 1) -> tuple[np.ndarray, np.ndarray]:
        """Temporal difference quotients at spatial node *i*.

        ``order=1`` returns ``(u_j - u_{j-1}) / tau_j`` at the midpoints
        ``(t_{j-1} + t_j) / 2``; ``order=2`` returns the second difference
        quotients on the nonuniform mesh at the interior nodes ``t_j``.
        """
        t = self.time.nodes
        u = self.values[:, i]
        tau = np.diff(t)
        if order == 1:
            return 0.5 * (t[1:] + t[:-1]), np.diff(u) / tau
        if order == 2:
            slopes = np.diff(u) / tau
            return t[1:-1], 2.0 * np.diff(slopes) / (tau[1:] + tau[:-1])
        raise ValueError(f"order must be 1 or 2: {order}")


# }}}


# {{{ solve


def _check_peclet(spec: ProblemSpec, space: SpaceGrid) -> None:
    x = space.nodes
    qmax = max(
        float(np.max(np.abs(_eval(spec.q, x, t)))) for t in np.linspace(0, spec.T, 9)
    )
    peclet = space.h * qmax / (2.0 * spec.p_min)
    if peclet >= 1.0:
        warnings.warn(
            f"mesh Peclet number {peclet:.3f} >= 1; central differences may oscillate",
            MeshPecletWarning,
            stacklevel=3,
        )


def _spatial_bands(spec: ProblemSpec, x: np.ndarray, h: float, t: float):
    p = _eval(spec.p, x, t)
    q = _eval(spec.q, x, t)
    r = _eval(spec.r, x, t)

    lower = -p / h**2 - q / (2.0 * h)
    diag = 2.0 * p / h**2 + r
    upper = -p / h**2 + q / (2.0 * h)
    return lower, diag, upper


def _solve_tridiagonal(lower, diag, upper, rhs) -> np.ndarray:
    ab = np.zeros((3, diag.size))
    ab[0, 1:] = upper[:-1]
    ab[1] = diag
    ab[2, :-1] = lower[1:]
    try:
        return scipy.linalg.solve_banded((1, 1), ab, rhs, check_finite=True)
    except np.linalg.LinAlgError as exc:
        raise SingularSystemError(f"singular tridiagonal system: {exc}") from exc


def solve(spec: ProblemSpec, space: SpaceGrid, time: TimeGrid) -> SolutionField:
    """Advance the scheme over all time levels and return the full field.

    The boundary columns are pinned to ``psi`` and row 0 to ``phi0``; only
    interior unknowns are solved for.
    """
    if (space.a, space.b) != (spec.a, spec.b):
        raise ValueError("space grid does not match the problem interval")
    if time.T != spec.T:
        raise ValueError(f"time grid horizon {time.T} does not match T = {spec.T}")
    if spec.delta.ceiling == 2 and not time.is_uniform:
        raise ValueError("the wave case (delta > 1) needs a uniform time grid")
    if spec.delta.ceiling == 2 and time.M < 2:
        raise ValueError("the wave case needs at least two time steps")

    _check_peclet(spec, space)

    x = space.nodes
    xi = x[1:-1]
    h = space.h
    t = time.nodes
    M = time.M

    U = np.empty((M + 1, space.N + 1))
    U[0] = _eval(spec.phi0, x)
    for n in range(1, M + 1):
        U[n, 0] = spec._psi(spec.a, t[n])
        U[n, -1] = spec._psi(spec.b, t[n])

    if spec.delta.ceiling == 1:
        _march_l1(spec, time, xi, h, U)
    else:
        _march_l2(spec, time, xi, h, U)

    return SolutionField(space, time, U)


def _boundary_rhs(rhs, lower, upper, U, n) -> None:
    rhs[0] -= lower[0] * U[n, 0]
    rhs[-1] -= upper[-1] * U[n, -1]


def _march_l1(spec: ProblemSpec, time: TimeGrid, xi, h, U) -> None:
    W = l1_weights(time, spec.delta)
    t = time.nodes
    # dU[j] = U[j] - U[j - 1] on interior nodes
    dU = np.zeros((time.M + 1, xi.size))

    for n in range(1, time.M + 1):
        lower, diag, upper = _spatial_bands(spec, xi, h, t[n])
        diag = diag + W[n, n]

        rhs = _eval(spec.f, xi, t[n]) + W[n, n] * U[n - 1, 1:-1]
        if n > 1:
            rhs -= W[n, 1:n] @ dU[1:n]
        _boundary_rhs(rhs, lower, upper, U, n)

        U[n, 1:-1] = _solve_tridiagonal(lower, diag, upper, rhs)
        dU[n] = U[n, 1:-1] - U[n - 1, 1:-1]


def _march_l2(spec: ProblemSpec, time: TimeGrid, xi, h, U) -> None:
    a = l2_weights(time, spec.delta)
    t = time.nodes
    tau = time.nominal_step
    phi1 = _eval(spec.phi1, xi)
    # s[j] = second difference on interval j, see caputo.second_differences
    s = np.zeros((time.M + 1, xi.size))

    for n in range(1, time.M + 1):
        lower, diag, upper = _spatial_bands(spec, xi, h, t[n])
        rhs = _eval(spec.f, xi, t[n])

        if n == 1:
            c = 2.0 * a[0] / tau**2
            rhs += c * (U[0, 1:-1] + tau * phi1)
        else:
            c = a[0] / tau**2
            rhs += c * (2.0 * U[n - 1, 1:-1] - U[n - 2, 1:-1])
            rhs -= a[n - 1 : 0 : -1] @ s[1:n]
        diag = diag + c
        _boundary_rhs(rhs, lower, upper, U, n)

        U[n, 1:-1] = _solve_tridiagonal(lower, diag, upper, rhs)
        if n == 1:
            s[1] = 2.0 * (U[1, 1:-1] - U[0, 1:-1] - tau * phi1) / tau**2
        else:
            s[n] = (U[n, 1:-1] - 2.0 * U[n - 1, 1:-1] + U[n - 2, 1:-1]) / tau**2


# }}}


# {{{ convergence


@dataclass(frozen=True)
class ConvergenceReport:
    M: tuple[int, ...]
    dt: np.ndarray
    """Nominal step ``T / M``."""
    errors: np.ndarray
    """Max-norm error over all space-time nodes."""
    errors_final: np.ndarray
    """Max-norm error at ``t = T``."""
    order: float
    """Least-squares slope of ``log(errors)`` against ``log(dt)``."""
    order_final: float
    grading: float
    N: int
    reference: str

    def table(self) -> str:
        lines = [
            f"# reference: {self.reference}; N = {self.N}; grading = {self.grading:g}",
            f"{'M':>8} {'dt':>12} {'max error':>14} {'error at T':>14}",
        ]
        for M, dt, e, ef in zip(self.M, self.dt, self.errors, self.errors_final):
            lines.append(f"{M:8d} {dt:12.4e} {e:14.6e} {ef:14.6e}")
        lines.append(f"fitted order (max error):  {self.order:.4f}")
        lines.append(f"fitted order (error at T): {self.order_final:.4f}")
        return "\n".join(lines)


def fitted_order(dt: Sequence[float], errors: Sequence[float]) -> float:
    slope, _ = np.polyfit(np.log(dt), np.log(errors), 1)
    return float(slope)


def convergence_study(
    spec: ProblemSpec,
    space: SpaceGrid,
    M_list: Sequence[int],
    grading: float = 1.0,
    *,
    exact: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None,
) -> ConvergenceReport:
    """Measure temporal errors of :func:`solve` over a sequence of meshes.

    Errors are taken against ``exact(x, t)`` when given (broadcasting over
    a column of times and a row of nodes); otherwise against a reference
    solve with four times the largest ``M`` and twice ``N``.
    """
    M_list = tuple(int(M) for M in M_list)
    if len(M_list) < 3:
        raise ValueError("a convergence study needs at least three meshes")
    if any(b <= a for a, b in zip(M_list, M_list[1:])):
        raise ValueError(f"mesh sizes must increase strictly: {M_list}")

    if exact is None:
        M_ref = 4 * M_list[-1]
        bad = [M for M in M_list if M_ref % M]
        if bad:
            raise ValueError(f"mesh sizes {bad} do not divide the reference size {M_ref}")
        fine = solve(spec, space.refined(2), TimeGrid(spec.T, M_ref, grading))
        reference = f"fine mesh M = {M_ref}, N = {2 * space.N}"
    else:
        reference = "exact solution"

    errors, errors_final = [], []
    for M in M_list:
        time = TimeGrid(spec.T, M, grading)
        sol = solve(spec, space, time)
        if exact is None:
            ref = fine.values[:: M_ref // M, ::2]
        else:
            ref = np.asarray(exact(space.nodes[None, :], time.nodes[:, None]))
        err = np.abs(sol.values - ref)
        errors.append(float(np.max(err)))
        errors_final.append(float(np.max(err[-1])))
        logger.info("M = %d: max error %.6e, error at T %.6e", M, errors[-1], errors_final[-1])

    dt = np.array([spec.T / M for M in M_list])
    errors = np.array(errors)
    errors_final = np.array(errors_final)

    return ConvergenceReport(
        M=M_list,
        dt=dt,
        errors=errors,
        errors_final=errors_final,
        order=fitted_order(dt, errors),
        order_final=fitted_order(dt, errors_final),
        grading=grading,
        N=space.N,
        reference=reference,
    )


# }}}
