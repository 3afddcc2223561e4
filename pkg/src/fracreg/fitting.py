"""Least-squares power-law fits on log-log scales."""

from __future__ import annotations

from collections.abc import Sequence

import numpy as np

__all__ = ["DegenerateFitError", "loglog_slope"]


class DegenerateFitError(ValueError):
    """Raised when samples cannot determine a power law."""


def loglog_slope(x: Sequence[float] | np.ndarray, y: Sequence[float] | np.ndarray) -> float:
    """Slope of the least-squares line through ``(log x, log |y|)``."""
    x = np.asarray(x, dtype=np.float64)
    y = np.abs(np.asarray(y, dtype=np.float64))
    if x.shape != y.shape or x.size < 2:
        raise DegenerateFitError(f"need matching samples, got {x.shape} and {y.shape}")
    if np.any(x <= 0) or np.any(y <= 0):
        raise DegenerateFitError("log-log fit needs positive abscissae and nonzero values")

    slope, _ = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope)
