"""Named test problems on ``(0, pi)`` with their exact solutions, if known."""

from __future__ import annotations

import math
from collections.abc import Callable
from dataclasses import dataclass

import numpy as np

from fracreg import expressions
from fracreg.exactsol import ExactProblem, example1_problem, exact_value
from fracreg.fdsolver import ProblemSpec
from fracreg.specialfn import FractionalOrder, as_order, gamma

__all__ = [
    "NamedProblem",
    "example1",
    "example2",
    "get_problem",
    "manufactured",
]


@dataclass(frozen=True)
class NamedProblem:
    name: str
    spec: ProblemSpec
    exact: Callable[[np.ndarray, np.ndarray], np.ndarray] | None = None
    exact_problem: ExactProblem | None = None


def _heat_spec(delta: FractionalOrder, T: float, phi0: str, f: str = "0") -> ProblemSpec:
    return ProblemSpec(
        a=0.0,
        b=math.pi,
        T=T,
        delta=delta,
        p=expressions.parse("1"),
        q=expressions.parse("0"),
        r=expressions.parse("0"),
        f=expressions.parse(f),
        psi=expressions.parse("0"),
        phi0=expressions.parse(phi0),
        phi1=expressions.parse("0") if delta.ceiling == 2 else None,
    )


def example1(delta: FractionalOrder | float, T: float = 1.0) -> NamedProblem:
    """``D^delta v = v_xx`` with ``v(x, 0) = sin x`` (and ``v_t(x, 0) = 0``)."""
    d = as_order(delta)
    exact_problem = example1_problem(d, T)

    def exact(x, t):
        return exact_value(exact_problem, x, t)

    return NamedProblem("example1", _heat_spec(d, T, "sin(x)"), exact, exact_problem)


def example2(delta: FractionalOrder | float = 0.5, T: float = 1.0, phi0: str = "0") -> NamedProblem:
    """The heat problem of :func:`example1` with a free initial value *phi0*.

    With ``phi0 = 0`` every datum vanishes and so does the solution.
    """
    d = as_order(delta)
    spec = _heat_spec(d, T, phi0)
    exact = (lambda x, t: np.zeros(np.broadcast_shapes(np.shape(x), np.shape(t)))) \
        if expressions.parse(phi0).is_zero else None
    return NamedProblem("example2", spec, exact)


def manufactured(delta: FractionalOrder | float, T: float = 1.0) -> NamedProblem:
    r"""Smooth solution ``u = (1 + t^2) sin x``.

    The source is ``f = (2 t^(2 - delta) / Gamma(3 - delta) + 1 + t^2) sin x``,
    so ``f(x, 0) = sin x = -phi0''`` and the initial value is compatible
    with the equation at ``t = 0``.
    """
    d = as_order(delta)
    c = 2.0 / gamma(3.0 - d.delta)
    f = f"({c!r} * t**{2.0 - d.delta!r} + 1 + t**2) * sin(x)"

    def exact(x, t):
        return (1.0 + np.asarray(t) ** 2) * np.sin(x)

    return NamedProblem("manufactured", _heat_spec(d, T, "sin(x)", f), exact)


_REGISTRY = {"example1": example1, "example2": example2, "manufactured": manufactured}


def get_problem(name: str, delta: FractionalOrder | float, T: float = 1.0) -> NamedProblem:
    try:
        factory = _REGISTRY[name]
    except KeyError:
        raise KeyError(f"unknown problem '{name}'; known: {sorted(_REGISTRY)}") from None
    return factory(delta, T)
