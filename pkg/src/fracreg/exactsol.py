r"""Closed-form solutions of :math:`D^\delta_t v = v_{xx}` on :math:`(0, \pi)`
with homogeneous Dirichlet data.

For initial data :math:`\sum_k c_k \sin(k x)` (and zero initial velocity
when :math:`\delta > 1`) the solution is

.. math::

    v(x, t) = \sum_k c_k E_\delta(-k^2 t^\delta) \sin(k x).
"""

from __future__ import annotations

import math
from collections.abc import Sequence
from dataclasses import dataclass
from typing import Literal

import numpy as np

from fracreg.specialfn import (
    DEFAULT_CONFIG,
    DomainError,
    FractionalOrder,
    SeriesEvalConfig,
    as_order,
    ml_second_time_derivative,
    ml_time_derivative,
    mittag_leffler,
)

__all__ = [
    "EigenMode",
    "ExactProblem",
    "example1_problem",
    "exact_dt",
    "exact_dtt",
    "exact_value",
    "singular_exponent_reference",
]


@dataclass(frozen=True)
class EigenMode:
    """A single Dirichlet eigenfunction ``coefficient * sin(k x)``."""

    k: int
    coefficient: float = 1.0

    def __post_init__(self) -> None:
        if int(self.k) != self.k or self.k < 1:
            raise ValueError(f"wavenumber must be a positive integer: {self.k}")

    @property
    def eigenvalue(self) -> float:
        return float(self.k**2)


@dataclass(frozen=True)
class ExactProblem:
    delta: FractionalOrder
    modes: tuple[EigenMode, ...]
    T: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "delta", as_order(self.delta))
        object.__setattr__(self, "modes", tuple(self.modes))
        if not self.modes:
            raise ValueError("at least one mode is required")
        if not self.T > 0:
            raise ValueError(f"horizon must be positive: {self.T}")

    def initial_value(self, x: float | np.ndarray) -> float | np.ndarray:
        return _sines(self, x, lambda mode: mode.coefficient)


def example1_problem(
    delta: FractionalOrder | float,
    T: float = 1.0,
    modes: Sequence[EigenMode] = (EigenMode(1),),
) -> ExactProblem:
    """The single-mode problem with initial data ``sin x``, by default."""
    return ExactProblem(as_order(delta), tuple(modes), T)


def _check_domain(p: ExactProblem, x: np.ndarray, t: np.ndarray, *, open_t: bool) -> None:
    if np.any(x < 0) or np.any(x > math.pi):
        raise DomainError("x must lie in [0, pi]")
    if np.any(t > p.T) or np.any(t < 0):
        raise DomainError(f"t must lie in [0, {p.T}]")
    if open_t and np.any(t == 0):
        raise DomainError("time derivatives of the solution blow up at t = 0")


def _sines(p: ExactProblem, x, amplitude) -> float | np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    total = sum(amplitude(mode) * np.sin(mode.k * x) for mode in p.modes)
    # sin(k pi) is not exactly zero in floating point
    total = np.where((x == 0.0) | (x == math.pi), 0.0, total)
    return float(total) if total.ndim == 0 else total


def _evaluate(p: ExactProblem, x, t, series, *, open_t: bool):
    x = np.asarray(x, dtype=np.float64)
    t = np.asarray(t, dtype=np.float64)
    _check_domain(p, x, t, open_t=open_t)

    x, t = np.broadcast_arrays(x, t)
    total = np.zeros(x.shape)
    for mode in p.modes:
        total += mode.coefficient * series(mode, t.ravel()).reshape(t.shape) * np.sin(mode.k * x)

    total = np.where((x == 0.0) | (x == math.pi), 0.0, total)
    return float(total) if total.ndim == 0 else total


def exact_value(
    p: ExactProblem,
    x: float | np.ndarray,
    t: float | np.ndarray,
    cfg: SeriesEvalConfig = DEFAULT_CONFIG,
) -> float | np.ndarray:
    """Evaluate the solution; *x* and *t* broadcast against each other."""
    d = p.delta.delta

    def series(mode: EigenMode, t: np.ndarray) -> np.ndarray:
        return np.asarray(mittag_leffler(d, -mode.eigenvalue * t**d, cfg))

    return _evaluate(p, x, t, series, open_t=False)


def exact_dt(
    p: ExactProblem,
    x: float | np.ndarray,
    t: float | np.ndarray,
    cfg: SeriesEvalConfig = DEFAULT_CONFIG,
) -> float | np.ndarray:
    """First time derivative of the solution, for ``t > 0``."""

    def series(mode: EigenMode, t: np.ndarray) -> np.ndarray:
        return np.asarray(ml_time_derivative(p.delta, t, cfg, lam=mode.eigenvalue))

    return _evaluate(p, x, t, series, open_t=True)


def exact_dtt(
    p: ExactProblem,
    x: float | np.ndarray,
    t: float | np.ndarray,
    cfg: SeriesEvalConfig = DEFAULT_CONFIG,
) -> float | np.ndarray:
    """Second time derivative of the solution, for ``t > 0`` and ``delta > 1``."""

    def series(mode: EigenMode, t: np.ndarray) -> np.ndarray:
        return np.asarray(ml_second_time_derivative(p.delta, t, cfg, lam=mode.eigenvalue))

    return _evaluate(p, x, t, series, open_t=True)


def singular_exponent_reference(
    delta: FractionalOrder | float,
    which: Literal["first", "second"] = "first",
) -> float:
    r"""Exponent of the blow-up :math:`t^{\delta - 1}` of :math:`v_t`
    (``"first"``) or :math:`t^{\delta - 2}` of :math:`v_{tt}` (``"second"``)."""
    d = as_order(delta)
    if which == "first":
        return d.delta - 1.0
    if which == "second":
        if d.ceiling != 2:
            raise DomainError("the second-derivative exponent is only used for delta in (1, 2)")
        return d.delta - 2.0
    raise ValueError(f"unknown derivative selector: {which!r}")
