"""Closed catalog of coefficient expressions in ``x`` and ``t``.

Expressions are built from numbers, ``pi``, the symbols ``x`` and ``t``,
``+ - * / **`` and the functions ``sin``, ``cos`` and ``exp``. Anything
else is rejected at parse time. Parsed expressions are callable as
``expr(x, t=0.0)`` on arrays and can be differentiated analytically.
"""

from __future__ import annotations

from functools import cached_property

import numpy as np
import sympy as sp
from sympy.parsing.sympy_parser import parse_expr, standard_transformations

__all__ = ["Expr", "ExpressionError", "parse"]

X, TIME = sp.symbols("x t", real=True)

_ALLOWED_FUNCTIONS = {"sin": sp.sin, "cos": sp.cos, "exp": sp.exp}
_NAMESPACE = {"x": X, "t": TIME, "pi": sp.pi, **_ALLOWED_FUNCTIONS}


class ExpressionError(ValueError):
    """Raised for expressions outside the catalog."""


class Expr:
    """A catalog expression ``f(x, t)``."""

    def __init__(self, expr: sp.Expr, source: str | None = None) -> None:
        self.expr = sp.sympify(expr)
        self.source = source if source is not None else str(self.expr)

    def __repr__(self) -> str:
        return f"Expr({self.source!r})"

    def __eq__(self, other: object) -> bool:
        return isinstance(other, Expr) and sp.simplify(self.expr - other.expr) == 0

    def __hash__(self) -> int:
        return hash(self.expr)

    @cached_property
    def _fn(self):
        return sp.lambdify((X, TIME), self.expr, modules="numpy")

    def __call__(self, x, t=0.0):
        x = np.asarray(x, dtype=np.float64)
        value = np.asarray(self._fn(x, np.asarray(t, dtype=np.float64)), dtype=np.float64)
        value = np.broadcast_to(value, np.broadcast_shapes(x.shape, np.shape(t))).copy()
        return float(value) if value.ndim == 0 else value

    def diff(self, var: str = "x", n: int = 1) -> Expr:
        symbol = {"x": X, "t": TIME}[var]
        return Expr(sp.diff(self.expr, symbol, n))

    def at_time(self, t: float) -> Expr:
        return Expr(self.expr.subs(TIME, t))

    @property
    def is_zero(self) -> bool:
        return self.expr == 0

    @property
    def depends_on_time(self) -> bool:
        return TIME in self.expr.free_symbols


def _validate(expr: sp.Basic, source: str) -> None:
    allowed = tuple(_ALLOWED_FUNCTIONS.values())
    for node in sp.preorder_traversal(expr):
        if isinstance(node, sp.Symbol):
            if node not in (X, TIME):
                raise ExpressionError(f"unknown symbol '{node}' in {source!r}")
        elif isinstance(node, sp.Function):
            if not isinstance(node, allowed):
                raise ExpressionError(f"function '{node.func}' is not in the catalog: {source!r}")
        elif not isinstance(node, (sp.Add, sp.Mul, sp.Pow, sp.Number, sp.NumberSymbol)):
            raise ExpressionError(f"unsupported construct '{node}' in {source!r}")


def parse(source: str | float | int) -> Expr:
    """Parse a catalog expression such as ``"sin(x) * (1 + t**2)"``."""
    if isinstance(source, (int, float)):
        return Expr(sp.Float(source) if isinstance(source, float) else sp.Integer(source))

    text = source.strip().replace("^", "**")
    if not text:
        raise ExpressionError("empty expression")
    try:
        expr = parse_expr(
            text,
            local_dict=dict(_NAMESPACE),
            global_dict={"__builtins__": {}, "Integer": sp.Integer, "Float": sp.Float,
                         "Rational": sp.Rational, "Symbol": sp.Symbol},
            transformations=standard_transformations,
            evaluate=True,
        )
    except Exception as exc:  # sympy raises a zoo of exception types
        raise ExpressionError(f"cannot parse {source!r}: {exc}") from exc

    if not isinstance(expr, sp.Basic):
        raise ExpressionError(f"{source!r} is not an expression")
    _validate(expr, source)
    return Expr(expr, source)
