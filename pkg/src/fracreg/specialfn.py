r"""Gamma function, Mittag-Leffler function and the time derivatives of
:math:`E_\delta(-\lambda t^\delta)`.

All series are summed in double precision. Truncation stops once the term
ratio is below one (from there on the ratios only decrease, so the remainder
is dominated by a geometric series) and the geometric tail bound is below
the requested absolute tolerance.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

__all__ = [
    "DomainError",
    "FractionalOrder",
    "NonConvergenceError",
    "PrecisionLossError",
    "SeriesEvalConfig",
    "as_order",
    "gamma",
    "log_gamma",
    "ml_second_time_derivative",
    "ml_time_derivative",
    "mittag_leffler",
]


class DomainError(ValueError):
    """Raised when an argument lies outside the domain of an operation."""


class NonConvergenceError(RuntimeError):
    """Raised when a series does not meet its tail bound within ``max_terms``."""


class PrecisionLossError(DomainError):
    """Raised when cancellation between series terms swamps the result."""


# {{{ types


@dataclass(frozen=True)
class SeriesEvalConfig:
    """Truncation policy for the power series in this module."""

    abs_tol: float = 1.0e-16
    """Absolute bound on the neglected tail."""
    max_terms: int = 1000
    """Maximum number of terms summed before giving up."""
    arg_bound: float = 50.0
    """Largest admissible magnitude of the series argument."""
    max_rounding: float = 1.0e-8
    """Largest admissible rounding error estimate ``eps * sum |term|``,
    relative to the result when that exceeds one in magnitude."""

    def __post_init__(self) -> None:
        if not self.abs_tol > 0:
            raise ValueError(f"abs_tol must be positive: {self.abs_tol}")
        if self.max_terms < 1:
            raise ValueError(f"max_terms must be at least 1: {self.max_terms}")
        if not self.arg_bound > 0:
            raise ValueError(f"arg_bound must be positive: {self.arg_bound}")
        if not self.max_rounding > 0:
            raise ValueError(f"max_rounding must be positive: {self.max_rounding}")


DEFAULT_CONFIG = SeriesEvalConfig()


@dataclass(frozen=True)
class FractionalOrder:
    r"""Order :math:`\delta \in (0, 1) \cup (1, 2)` of a Caputo derivative."""

    delta: float

    def __post_init__(self) -> None:
        d = float(self.delta)
        if not (0.0 < d < 1.0 or 1.0 < d < 2.0):
            raise DomainError(f"order must lie in (0, 1) or (1, 2): got {self.delta}")
        object.__setattr__(self, "delta", d)

    @property
    def ceiling(self) -> int:
        """Integer order of the classical derivative inside the Caputo integral."""
        return 1 if self.delta < 1.0 else 2

    def __float__(self) -> float:
        return self.delta


def as_order(delta: FractionalOrder | float) -> FractionalOrder:
    if isinstance(delta, FractionalOrder):
        return delta
    return FractionalOrder(delta)


# }}}


# {{{ gamma

# Lanczos approximation with g = 7 and 9 coefficients (Godfrey's table).
_LANCZOS_G = 7.0
_LANCZOS_COEFFICIENTS = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)
_SQRT_2PI = math.sqrt(2.0 * math.pi)
_LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)


def _lanczos_sum(z: float) -> float:
    a = _LANCZOS_COEFFICIENTS[0]
    for i, c in enumerate(_LANCZOS_COEFFICIENTS[1:], start=1):
        a += c / (z + i)
    return a


def gamma(x: float) -> float:
    r"""Evaluate :math:`\Gamma(x)` for :math:`x > 0`.

    Arguments below :math:`1/2` are shifted up by one with
    :math:`\Gamma(x) = \Gamma(x + 1) / x`, where the Lanczos sum is most
    accurate. Overflows to ``inf`` past :math:`x \approx 171.6`.
    """
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"gamma is only defined here for x > 0: got {x}")

    if x.is_integer() and x <= 171.0:
        return float(math.factorial(int(x) - 1))
    if x < 0.5:
        return gamma(x + 1.0) / x

    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    # split the power so that t**(z + 0.5) does not overflow before exp(-t)
    half = t ** (0.5 * (z + 0.5))
    return _SQRT_2PI * half * (half * math.exp(-t)) * _lanczos_sum(z)


def log_gamma(x: float) -> float:
    r"""Evaluate :math:`\log \Gamma(x)` for :math:`x > 0`."""
    x = float(x)
    if not x > 0.0:
        raise DomainError(f"log_gamma is only defined here for x > 0: got {x}")

    if x < 0.5:
        return log_gamma(x + 1.0) - math.log(x)

    z = x - 1.0
    t = z + _LANCZOS_G + 0.5
    return _LOG_SQRT_2PI + (z + 0.5) * math.log(t) - t + math.log(_lanczos_sum(z))


# }}}


# {{{ series


def _power_series(
    w: np.ndarray,
    alpha: float,
    beta: float,
    k0: int,
    scale: np.ndarray,
    cfg: SeriesEvalConfig,
) -> np.ndarray:
    r"""Sum ``scale * sum_{k >= k0} w**k / Gamma(alpha * k + beta)`` elementwise.

    Requires ``alpha * k0 + beta > 0``. The term ratio
    ``|w| Gamma(alpha (k - 1) + beta) / Gamma(alpha k + beta)`` is then
    non-increasing in ``k`` (the digamma function is increasing), so once it
    drops below one the remainder is bounded by ``|t_k| rho / (1 - rho)``.
    """
    absw = np.abs(w)
    logw = np.log(np.where(absw > 0, absw, 1.0))
    sign = np.sign(w)

    result = np.zeros_like(w)
    magnitude = np.zeros_like(w)
    done = np.zeros(w.shape, dtype=bool)
    prev = np.full(w.shape, np.nan)

    for k in range(k0, k0 + cfg.max_terms + 1):
        arg = alpha * k + beta
        if arg <= 170.0:
            with np.errstate(over="ignore", invalid="ignore"):
                term = scale * w**k / gamma(arg)
        else:
            term = np.zeros_like(w)
        if arg > 170.0 or not np.all(np.isfinite(term)):
            mag = np.exp(k * logw - log_gamma(arg))
            term = np.where(absw > 0, scale * sign**k * mag, 0.0)

        active = ~done
        result[active] += term[active]
        magnitude[active] += np.abs(term[active])

        if k > k0:
            aterm = np.abs(term)
            aprev = np.abs(prev)
            with np.errstate(divide="ignore", invalid="ignore"):
                rho = np.where(aprev > 0, aterm / aprev, 0.0)
                tail = np.where(rho < 1.0, aterm * rho / (1.0 - rho), np.inf)
            zero = (aterm == 0) & (aprev == 0)
            done |= zero | ((rho < 1.0) & (tail <= cfg.abs_tol))
            if np.all(done):
                rounding = np.finfo(np.float64).eps * magnitude
                if np.any(rounding > cfg.max_rounding * np.maximum(1.0, np.abs(result))):
                    raise PrecisionLossError(
                        f"cancellation in the series: rounding error estimate "
                        f"{np.max(rounding):.3e} exceeds {cfg.max_rounding:.1e} "
                        f"(alpha={alpha}, max|w|={np.max(absw):.3e})"
                    )
                return result

        prev = term

    raise NonConvergenceError(
        f"series did not converge within {cfg.max_terms} terms "
        f"(alpha={alpha}, beta={beta}, max|w|={np.max(absw):.3e})"
    )


def _as_float_array(z: float | np.ndarray) -> tuple[np.ndarray, bool]:
    arr = np.asarray(z, dtype=np.float64)
    return np.atleast_1d(arr).copy(), arr.ndim == 0


def mittag_leffler(
    alpha: float,
    z: float | np.ndarray,
    cfg: SeriesEvalConfig = DEFAULT_CONFIG,
) -> float | np.ndarray:
    r"""Evaluate the Mittag-Leffler function

    .. math::

        E_\alpha(z) = \sum_{k = 0}^\infty \frac{z^k}{\Gamma(\alpha k + 1)}.

    *z* may be a scalar or an array; a scalar input returns a :class:`float`.
    The plain series loses accuracy to cancellation for large negative
    arguments, all the more so for small *alpha*. Besides
    :attr:`SeriesEvalConfig.arg_bound`, a :class:`PrecisionLossError` is
    raised when the rounding error estimate ``eps * sum |term|`` exceeds
    :attr:`SeriesEvalConfig.max_rounding`.
    """
    alpha = float(alpha)
    if not alpha > 0:
        raise DomainError(f"alpha must be positive: {alpha}")

    w, scalar = _as_float_array(z)
    if np.any(np.abs(w) > cfg.arg_bound):
        raise DomainError(
            f"|z| = {np.max(np.abs(w)):.3e} exceeds arg_bound = {cfg.arg_bound}"
        )

    result = _power_series(w, alpha, 1.0, 0, np.ones_like(w), cfg)
    return float(result[0]) if scalar else result


def _time_series(
    delta: FractionalOrder | float,
    t: float | np.ndarray,
    lam: float,
    beta_shift: float,
    power_shift: float,
    cfg: SeriesEvalConfig,
) -> float | np.ndarray:
    d = as_order(delta)
    tt, scalar = _as_float_array(t)
    if np.any(tt <= 0):
        raise DomainError("time derivatives of E(-lam t^delta) require t > 0")

    w = -lam * tt**d.delta
    if np.any(np.abs(w) > cfg.arg_bound):
        raise DomainError(
            f"|lam t^delta| = {np.max(np.abs(w)):.3e} exceeds arg_bound = {cfg.arg_bound}"
        )

    result = _power_series(w, d.delta, beta_shift, 1, tt**power_shift, cfg)
    return float(result[0]) if scalar else result


def ml_time_derivative(
    delta: FractionalOrder | float,
    t: float | np.ndarray,
    cfg: SeriesEvalConfig = DEFAULT_CONFIG,
    *,
    lam: float = 1.0,
) -> float | np.ndarray:
    r"""Evaluate :math:`\frac{d}{dt} E_\delta(-\lambda t^\delta)` for :math:`t > 0`.

    Term-by-term differentiation gives

    .. math::

        \sum_{k = 1}^\infty \frac{(-\lambda)^k t^{\delta k - 1}}{\Gamma(\delta k)},

    whose leading term :math:`-\lambda t^{\delta - 1} / \Gamma(\delta)`
    blows up at :math:`t = 0` when :math:`\delta < 1`.
    """
    return _time_series(delta, t, lam, 0.0, -1.0, cfg)


def ml_second_time_derivative(
    delta: FractionalOrder | float,
    t: float | np.ndarray,
    cfg: SeriesEvalConfig = DEFAULT_CONFIG,
    *,
    lam: float = 1.0,
) -> float | np.ndarray:
    r"""Evaluate :math:`\frac{d^2}{dt^2} E_\delta(-\lambda t^\delta)` for
    :math:`\delta \in (1, 2)` and :math:`t > 0`.

    .. math::

        \sum_{k = 1}^\infty \frac{(-\lambda)^k t^{\delta k - 2}}{\Gamma(\delta k - 1)}
    """
    d = as_order(delta)
    if d.ceiling != 2:
        raise DomainError(
            f"second time derivative series is only provided for delta in (1, 2): {d.delta}"
        )
    return _time_series(d, t, lam, -1.0, -2.0, cfg)


# }}}
