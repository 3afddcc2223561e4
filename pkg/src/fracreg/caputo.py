r"""Caputo derivatives: a quadrature reference and the discrete L1/L2 operators.

The Caputo derivative of order :math:`\delta` with ceiling
:math:`m = \lceil \delta \rceil` is

.. math::

    D^\delta_t g(t) = \frac{1}{\Gamma(m - \delta)}
        \int_0^t (t - s)^{m - \delta - 1} g^{(m)}(s) \,\mathrm{d}s.
"""

from __future__ import annotations

import math
from collections.abc import Callable, Sequence
from dataclasses import dataclass, field
from functools import cached_property, lru_cache

import numpy as np

from fracreg.fitting import loglog_slope
from fracreg.specialfn import DomainError, FractionalOrder, as_order, gamma

__all__ = [
    "CATALOG",
    "CatalogFunction",
    "Lemma1Report",
    "QuadratureError",
    "SampledFunction",
    "TimeGrid",
    "caputo_quadrature",
    "catalog_function",
    "l1_operator",
    "l1_weights",
    "l2_operator",
    "l2_weights",
    "lemma1_bound_check",
]

ScalarFunction = Callable[[np.ndarray], np.ndarray | float]


class QuadratureError(RuntimeError):
    """Raised when the quadrature cannot certify the requested tolerance."""


# {{{ grids


@dataclass(frozen=True)
class TimeGrid:
    r"""Time mesh :math:`t_j = T (j / M)^r` on :math:`[0, T]`."""

    T: float
    M: int
    grading: float = 1.0

    def __post_init__(self) -> None:
        if not self.T > 0:
            raise ValueError(f"horizon must be positive: T = {self.T}")
        if int(self.M) != self.M or self.M < 1:
            raise ValueError(f"number of intervals must be a positive integer: {self.M}")
        if not self.grading >= 1.0:
            raise ValueError(f"grading must be >= 1: {self.grading}")

    @cached_property
    def nodes(self) -> np.ndarray:
        j = np.arange(self.M + 1, dtype=np.float64)
        t = self.T * (j / self.M) ** self.grading
        t[0] = 0.0
        t[-1] = self.T
        t.flags.writeable = False
        return t

    @property
    def steps(self) -> np.ndarray:
        return np.diff(self.nodes)

    @property
    def is_uniform(self) -> bool:
        return self.grading == 1.0

    @property
    def nominal_step(self) -> float:
        return self.T / self.M


@dataclass(frozen=True)
class SampledFunction:
    """Values of a function at the nodes of a :class:`TimeGrid`."""

    grid: TimeGrid
    values: np.ndarray = field(compare=False)

    def __post_init__(self) -> None:
        values = np.asarray(self.values, dtype=np.float64)
        if values.shape[0] != self.grid.M + 1:
            raise ValueError(
                f"expected {self.grid.M + 1} samples, got {values.shape[0]}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_callable(cls, grid: TimeGrid, g: ScalarFunction) -> SampledFunction:
        return cls(grid, _evaluate(g, grid.nodes))

    def __add__(self, other: SampledFunction) -> SampledFunction:
        _check_same_grid(self, other)
        return SampledFunction(self.grid, self.values + other.values)

    def __rmul__(self, a: float) -> SampledFunction:
        return SampledFunction(self.grid, a * self.values)


def _check_same_grid(f: SampledFunction, g: SampledFunction) -> None:
    if f.grid != g.grid:
        raise ValueError("sampled functions live on different grids")


# }}}


# {{{ quadrature


def _evaluate(g: ScalarFunction, s: np.ndarray) -> np.ndarray:
    try:
        values = np.asarray(g(s), dtype=np.float64)
    except TypeError:
        values = np.array([float(g(si)) for si in s])

    if values.shape != s.shape:
        values = np.broadcast_to(values, s.shape).copy()
    return values


@lru_cache(maxsize=16)
def _gauss_legendre(n: int) -> tuple[np.ndarray, np.ndarray]:
    x, w = np.polynomial.legendre.leggauss(n)
    # map to [0, 1]
    return 0.5 * (x + 1.0), 0.5 * w


def _dyadic_sum(
    integrand: Callable[[np.ndarray], np.ndarray],
    length: float,
    tol: float,
    order: int,
    batch: int,
    max_panels: int,
) -> tuple[float, float]:
    """Integrate over ``[0, length]`` with panels ``[L 2^-(j+1), L 2^-j]``.

    Panels accumulate toward the origin, where the integrand may have an
    integrable algebraic singularity. Stops when the panel contributions
    decay geometrically and their tail is below *tol*.
    """
    x, w = _gauss_legendre(order)
    contributions: list[float] = []

    while len(contributions) < max_panels:
        j = np.arange(len(contributions), len(contributions) + batch)
        right = length * 2.0 ** (-j)
        width = 0.5 * right
        s = (width[:, None] * (1.0 + x[None, :])).ravel()
        values = integrand(s).reshape(batch, order)
        if not np.all(np.isfinite(values)):
            raise QuadratureError("integrand is not finite at a quadrature node")

        contributions.extend((width * (values @ w)).tolist())

        tail = _geometric_tail(contributions)
        if tail <= tol:
            return math.fsum(contributions), tail

    raise QuadratureError(
        f"panel contributions did not decay below tol = {tol:.3e} "
        f"within {max_panels} panels (last tail estimate {tail:.3e})"
    )


def _geometric_tail(contributions: Sequence[float], window: int = 4) -> float:
    last = np.abs(np.array(contributions[-window:]))
    if np.all(last == 0.0):
        return 0.0
    if np.any(last[:-1] == 0.0):
        return math.inf

    rho = float(np.max(last[1:] / last[:-1]))
    if rho >= 1.0:
        return math.inf
    return float(last[-1]) * rho / (1.0 - rho)


def caputo_quadrature(
    dg: ScalarFunction,
    delta: FractionalOrder | float,
    t: float,
    tol: float = 1.0e-10,
    *,
    order: int = 16,
    max_panels: int = 1200,
) -> float:
    r"""Evaluate :math:`D^\delta_t g(t)` from the derivative :math:`g^{(m)}`.

    The integral is split at :math:`s = t / 2`. On :math:`[0, t/2]` dyadic
    Gauss-Legendre panels accumulate toward :math:`s = 0`, which also handles
    integrable singularities of :math:`g^{(m)}` there (e.g. the initial
    layer of a Mittag-Leffler solution). On :math:`[t/2, t]` the substitution
    :math:`s = t - u^{1 / \beta}`, with :math:`\beta = m - \delta`, turns the
    kernel into the constant :math:`1 / \beta`, and dyadic panels in
    :math:`u` accumulate toward :math:`u = 0`.

    :arg dg: the :math:`m`-th derivative of *g*; called with arrays.
    :arg tol: absolute tolerance on the returned value.
    """
    d = as_order(delta)
    if not t > 0:
        raise DomainError(f"Caputo derivative is evaluated at t > 0: got {t}")
    if not tol > 0:
        raise ValueError(f"tolerance must be positive: {tol}")

    beta = d.ceiling - d.delta
    norm = gamma(beta)
    half = 0.5 * t
    side_tol = 0.5 * tol * norm

    def left(s: np.ndarray) -> np.ndarray:
        return (t - s) ** (beta - 1.0) * _evaluate(dg, s)

    def right(u: np.ndarray) -> np.ndarray:
        return _evaluate(dg, t - u ** (1.0 / beta)) / beta

    batch = 16
    left_value, _ = _dyadic_sum(left, half, side_tol, order, batch, max_panels)
    right_value, _ = _dyadic_sum(right, half**beta, side_tol, order, batch, max_panels)

    return (left_value + right_value) / norm


# }}}


# {{{ discrete operators


@lru_cache(maxsize=32)
def l1_weights(grid: TimeGrid, delta: FractionalOrder) -> np.ndarray:
    r"""Lower-triangular L1 weight table ``W[n, j]``, :math:`1 \le j \le n`.

    .. math::

        W_{n, j} = \frac{(t_n - t_{j - 1})^{1 - \delta} - (t_n - t_j)^{1 - \delta}}
                        {\Gamma(2 - \delta) (t_j - t_{j - 1})}

    The returned array is read-only and shared between calls.
    """
    if delta.ceiling != 1:
        raise DomainError(f"L1 weights need delta in (0, 1): {delta.delta}")

    t = grid.nodes
    tau = grid.steps
    e = 1.0 - delta.delta

    W = np.zeros((grid.M + 1, grid.M + 1))
    for n in range(1, grid.M + 1):
        W[n, 1 : n + 1] = ((t[n] - t[:n]) ** e - (t[n] - t[1 : n + 1]) ** e) / tau[:n]
    W /= gamma(2.0 - delta.delta)

    W.flags.writeable = False
    return W


@lru_cache(maxsize=32)
def l2_weights(grid: TimeGrid, delta: FractionalOrder) -> np.ndarray:
    r"""Weights ``a[m]`` of the L2 operator on a uniform grid.

    .. math::

        a_m = \frac{\tau^{2 - \delta}}{\Gamma(3 - \delta)}
            \left[(m + 1)^{2 - \delta} - m^{2 - \delta}\right],

    i.e. the kernel integrated over the interval ``m`` steps behind the
    evaluation point.
    """
    if delta.ceiling != 2:
        raise DomainError(f"L2 weights need delta in (1, 2): {delta.delta}")
    if not grid.is_uniform:
        raise ValueError("the L2 operator is only implemented on uniform grids")

    e = 2.0 - delta.delta
    m = np.arange(grid.M, dtype=np.float64)
    a = grid.nominal_step**e * ((m + 1.0) ** e - m**e) / gamma(3.0 - delta.delta)

    a.flags.writeable = False
    return a


def l1_operator(f: SampledFunction, delta: FractionalOrder | float) -> SampledFunction:
    r"""Apply the L1 discretisation of :math:`D^\delta_t`, :math:`0 < \delta < 1`.

    .. math::

        D^\delta_t f(t_n) \approx \sum_{j = 1}^n W_{n, j} (f_j - f_{j - 1}),

    with the value at :math:`t_0` defined as zero.
    """
    d = as_order(delta)
    if d.ceiling != 1:
        raise DomainError(f"L1 operator needs delta in (0, 1): {d.delta}")

    W = l1_weights(f.grid, d)
    df = np.zeros_like(f.values)
    df[1:] = np.diff(f.values, axis=0)

    return SampledFunction(f.grid, W @ df)


def second_differences(values: np.ndarray, tau: float, phi1: np.ndarray | float) -> np.ndarray:
    """Second differences ``s[j]`` associated with the intervals ``j >= 1``.

    ``s[1]`` uses the ghost value ``u[-1] = u[1] - 2 tau phi1`` from the
    initial slope, and ``s[j] = (u[j] - 2 u[j - 1] + u[j - 2]) / tau^2``
    otherwise. ``s[0]`` is unused and set to zero.
    """
    s = np.zeros_like(values)
    s[1] = 2.0 * (values[1] - values[0] - tau * np.asarray(phi1)) / tau**2
    s[2:] = (values[2:] - 2.0 * values[1:-1] + values[:-2]) / tau**2
    return s


def l2_operator(
    f: SampledFunction,
    delta: FractionalOrder | float,
    phi1: float,
) -> SampledFunction:
    r"""Apply a discrete :math:`D^\delta_t` for :math:`1 < \delta < 2`.

    The second derivative on each interval is replaced by a backward second
    difference (a ghost level built from the initial slope *phi1* on the
    first interval) and integrated exactly against the kernel. First order
    accurate for smooth *f*; uniform grids only.
    """
    d = as_order(delta)
    if d.ceiling != 2:
        raise DomainError(f"L2 operator needs delta in (1, 2): {d.delta}")
    if not f.grid.is_uniform:
        raise ValueError("the L2 operator is only implemented on uniform grids")
    if f.grid.M < 2:
        raise ValueError("the L2 operator needs at least two intervals")

    a = l2_weights(f.grid, d)
    s = second_differences(f.values, f.grid.nominal_step, phi1)

    out = np.zeros_like(f.values)
    for n in range(1, f.grid.M + 1):
        # interval j sits n - j steps behind t_n
        out[n] = a[n - 1 :: -1][:n] @ s[1 : n + 1]

    return SampledFunction(f.grid, out)


# }}}


# {{{ catalog and the vanishing-limit check


@dataclass(frozen=True)
class CatalogFunction:
    """A test function with known derivatives and derivative bounds."""

    name: str
    value: ScalarFunction
    derivatives: tuple[ScalarFunction, ScalarFunction]
    """First and second derivative."""
    bound: Callable[[int, float], float] | None
    """``bound(m, T)`` = sup of the ``m``-th derivative on ``[0, T]``;
    ``None`` when the derivative is unbounded near zero."""
    leading_power: Callable[[int], float]
    """Lowest power ``p >= m`` in the expansion at zero; the Caputo derivative
    then behaves like ``t^(p - delta)``."""


def _power(p: float) -> CatalogFunction:
    def bound(m: int, T: float) -> float:
        return math.prod(p - i for i in range(m)) * T ** (p - m)

    return CatalogFunction(
        name=f"t^{p:g}",
        value=lambda s: s**p,
        derivatives=(lambda s: p * s ** (p - 1), lambda s: p * (p - 1) * s ** (p - 2)),
        bound=bound,
        leading_power=lambda m: p,
    )


def _sin_bound(m: int, T: float) -> float:
    if m == 1:
        return 1.0
    return 1.0 if T >= 0.5 * math.pi else math.sin(T)


CATALOG: dict[str, CatalogFunction] = {
    "t2": _power(2.0),
    "t3": _power(3.0),
    "sin": CatalogFunction(
        name="sin t",
        value=np.sin,
        derivatives=(np.cos, lambda s: -np.sin(s)),
        bound=_sin_bound,
        leading_power=lambda m: 1.0 if m == 1 else 3.0,
    ),
    "expm1mt": CatalogFunction(
        name="e^t - 1 - t",
        value=lambda s: np.expm1(s) - s,
        derivatives=(np.expm1, np.exp),
        bound=lambda m, T: math.expm1(T) if m == 1 else math.exp(T),
        leading_power=lambda m: 2.0,
    ),
}


def catalog_function(name: str, delta: FractionalOrder | float | None = None) -> CatalogFunction:
    """Look up a test function by identifier.

    ``"tdelta"`` is the power ``t^delta`` itself: smooth for ``t > 0`` but
    its ``ceil(delta)``-th derivative is unbounded at zero.
    """
    if name == "tdelta":
        if delta is None:
            raise ValueError("'tdelta' needs the order delta")
        d = as_order(delta).delta
        f = _power(d)
        return CatalogFunction(
            name="t^delta",
            value=f.value,
            derivatives=f.derivatives,
            bound=None,
            leading_power=f.leading_power,
        )

    try:
        return CATALOG[name]
    except KeyError:
        raise KeyError(
            f"unknown test function '{name}'; known: {sorted([*CATALOG, 'tdelta'])}"
        ) from None


@dataclass(frozen=True)
class Lemma1Report:
    name: str
    delta: float
    t: np.ndarray
    values: np.ndarray
    """``|D^delta g(t)|`` from :func:`caputo_quadrature`."""
    bounds: np.ndarray | None
    """``C t^(m - delta) / Gamma(m - delta + 1)``, or ``None`` outside the class."""
    violations: np.ndarray
    """Indices where ``values > bounds + tol``."""
    fitted_exponent: float | None
    expected_exponent: float
    tol: float

    @property
    def in_class(self) -> bool:
        return self.bounds is not None

    @property
    def bound_holds(self) -> bool:
        return self.violations.size == 0


def lemma1_bound_check(
    g_id: str,
    delta: FractionalOrder | float,
    t_samples: Sequence[float],
    *,
    T: float | None = None,
    tol: float = 1.0e-10,
) -> Lemma1Report:
    r"""Compare :math:`|D^\delta g(t)|` with the bound
    :math:`C t^{m - \delta} / \Gamma(m - \delta + 1)`.

    For ``g`` whose ``m``-th derivative is bounded by ``C`` on ``[0, T]`` the
    bound holds and forces the derivative to vanish as ``t -> 0+``. The
    fitted log-log slope is reported when the samples span a decade.
    """
    d = as_order(delta)
    m = d.ceiling
    g = catalog_function(g_id, d)

    t = np.asarray(t_samples, dtype=np.float64)
    if np.any(t <= 0):
        raise DomainError("samples must lie in (0, T]")
    T = float(np.max(t)) if T is None else float(T)
    if np.any(t > T):
        raise DomainError("samples must lie in (0, T]")

    dg = g.derivatives[m - 1]
    values = np.abs([caputo_quadrature(dg, d, ti, tol) for ti in t])

    if g.bound is not None:
        C = g.bound(m, T)
        bounds = C * t ** (m - d.delta) / gamma(m - d.delta + 1.0)
        violations = np.flatnonzero(values > bounds + tol)
    else:
        bounds = None
        violations = np.array([], dtype=np.int64)

    fitted = None
    if t.size >= 2 and np.max(t) / np.min(t) >= 10.0 and np.all(values > 0):
        fitted = loglog_slope(t, values)

    return Lemma1Report(
        name=g.name,
        delta=d.delta,
        t=t,
        values=values,
        bounds=bounds,
        violations=violations,
        fitted_exponent=fitted,
        expected_exponent=g.leading_power(m) - d.delta,
        tol=tol,
    )


# }}}
