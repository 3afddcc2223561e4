"""Run configuration files.

A configuration is an INI-style file of flat ``key = value`` pairs under
section headers::

    [problem]
    name = example1        # or give a, b, T, p, q, r, f, psi, phi0, phi1
    delta = 0.5

    [numerics]
    N = 64
    M = 512

    [output]
    path = example1.csv
    format = csv

Problem fields are catalog expressions (see :mod:`fracreg.expressions`).
Relative output paths are resolved against ``$FRACREG_OUTPUT_ROOT`` when
that variable is set.
"""

from __future__ import annotations

import configparser
import math
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from fracreg import expressions
from fracreg.fdsolver import ProblemSpec
from fracreg.problems import NamedProblem, get_problem
from fracreg.specialfn import DomainError, FractionalOrder

__all__ = ["ConfigError", "RunConfig", "load_config", "parse_config", "resolve_output"]

OUTPUT_ROOT_ENV = "FRACREG_OUTPUT_ROOT"

SUBCOMMANDS = ("mlf", "caputo", "exact", "solve", "converge", "diagnose", "repro")
FORMATS = ("csv", "table")

_PROBLEM_KEYS = {"name", "delta", "t", "a", "b", "p", "q", "r", "f", "psi", "phi0", "phi1"}
_NUMERIC_INT = {"n", "m"}
_NUMERIC_FLOAT = {"grading", "tol"}
_NUMERIC_LIST = {"m_list"}


class ConfigError(ValueError):
    """Invalid configuration; the message names the offending field."""


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    problem: NamedProblem | None = None
    numerics: dict[str, Any] = field(default_factory=dict)
    output: Path | None = None
    format: str = "csv"
    source: str = "<config>"


def resolve_output(path: str | os.PathLike[str]) -> Path:
    p = Path(path)
    root = os.environ.get(OUTPUT_ROOT_ENV)
    if root and not p.is_absolute():
        p = Path(root) / p
    return p


def _context(source: str, section: str, key: str) -> str:
    return f"{source}: [{section}] {key}"


def _float(value: str, where: str) -> float:
    try:
        return float(expressions.parse(value)(0.0))
    except (expressions.ExpressionError, TypeError, ValueError) as exc:
        raise ConfigError(f"{where}: expected a number, got {value!r}") from exc


def _expr(value: str, where: str) -> expressions.Expr:
    try:
        return expressions.parse(value)
    except expressions.ExpressionError as exc:
        raise ConfigError(f"{where}: {exc}") from exc


def _problem(section: configparser.SectionProxy, source: str) -> NamedProblem:
    unknown = set(section) - _PROBLEM_KEYS
    if unknown:
        raise ConfigError(f"{source}: [problem] unknown keys {sorted(unknown)}")
    if "delta" not in section:
        raise ConfigError(f"{_context(source, 'problem', 'delta')}: missing")

    where = _context(source, "problem", "delta")
    try:
        delta = FractionalOrder(_float(section["delta"], where))
    except DomainError as exc:
        raise ConfigError(f"{where}: {exc}") from exc
    T = _float(section.get("t", "1"), _context(source, "problem", "T"))

    if "name" in section:
        extra = set(section) - {"name", "delta", "t"}
        if extra:
            raise ConfigError(
                f"{source}: [problem] keys {sorted(extra)} cannot be combined with 'name'"
            )
        try:
            return get_problem(section["name"].strip(), delta, T)
        except KeyError as exc:
            raise ConfigError(f"{_context(source, 'problem', 'name')}: {exc.args[0]}") from exc
        except ValueError as exc:
            raise ConfigError(f"{source}: [problem] {exc}") from exc

    required = ["p", "q", "r", "f", "psi", "phi0"] + (["phi1"] if delta.ceiling == 2 else [])
    missing = [k for k in required if k not in section]
    if missing:
        raise ConfigError(f"{source}: [problem] missing keys {missing}")

    fields = {k: _expr(section[k], _context(source, "problem", k)) for k in required}
    a = _float(section.get("a", "0"), _context(source, "problem", "a"))
    b = _float(section.get("b", "pi"), _context(source, "problem", "b"))
    try:
        spec = ProblemSpec(a=a, b=b, T=T, delta=delta, **fields)
    except ValueError as exc:
        raise ConfigError(f"{source}: [problem] {exc}") from exc
    return NamedProblem("custom", spec)


def _numerics(section: configparser.SectionProxy, source: str) -> dict[str, Any]:
    out: dict[str, Any] = {}
    for key, value in section.items():
        where = _context(source, "numerics", key)
        try:
            if key in _NUMERIC_INT:
                out[key.upper()] = int(value)
            elif key in _NUMERIC_FLOAT:
                out[key] = float(value)
            elif key in _NUMERIC_LIST:
                out["M_list"] = [int(v) for v in value.replace(",", " ").split()]
            else:
                raise ConfigError(f"{where}: unknown key")
        except ValueError as exc:
            if isinstance(exc, ConfigError):
                raise
            raise ConfigError(f"{where}: cannot parse {value!r}") from exc

    for key in ("N", "M"):
        if key in out and out[key] < 1:
            raise ConfigError(f"{_context(source, 'numerics', key)}: must be positive")
    if "tol" in out and not out["tol"] > 0:
        raise ConfigError(f"{_context(source, 'numerics', 'tol')}: must be positive")
    if "grading" in out and not (out["grading"] >= 1 and math.isfinite(out["grading"])):
        raise ConfigError(f"{_context(source, 'numerics', 'grading')}: must be >= 1")
    return out


def parse_config(text: str, subcommand: str, source: str = "<config>") -> RunConfig:
    """Parse configuration *text* for *subcommand*."""
    if subcommand not in SUBCOMMANDS:
        raise ConfigError(f"unknown subcommand {subcommand!r}")

    parser = configparser.ConfigParser(
        inline_comment_prefixes=("#", ";"), interpolation=None
    )
    try:
        parser.read_string(text, source=source)
    except configparser.Error as exc:
        raise ConfigError(str(exc)) from exc

    unknown = set(parser.sections()) - {"problem", "numerics", "output"}
    if unknown:
        raise ConfigError(f"{source}: unknown sections {sorted(unknown)}")

    problem = _problem(parser["problem"], source) if parser.has_section("problem") else None
    numerics = _numerics(parser["numerics"], source) if parser.has_section("numerics") else {}

    output = None
    fmt = "csv"
    if parser.has_section("output"):
        section = parser["output"]
        unknown = set(section) - {"path", "format"}
        if unknown:
            raise ConfigError(f"{source}: [output] unknown keys {sorted(unknown)}")
        if "path" in section:
            output = resolve_output(section["path"].strip())
        fmt = section.get("format", "csv").strip()
        if fmt not in FORMATS:
            raise ConfigError(f"{_context(source, 'output', 'format')}: expected one of {FORMATS}")

    if subcommand in ("solve", "converge", "diagnose") and problem is None:
        raise ConfigError(f"{source}: a [problem] section is required for '{subcommand}'")
    if subcommand == "converge" and len(numerics.get("M_list", [])) < 3:
        raise ConfigError(f"{_context(source, 'numerics', 'M_list')}: need at least three sizes")

    return RunConfig(subcommand, problem, numerics, output, fmt, source)


def load_config(path: str | os.PathLike[str], subcommand: str) -> RunConfig:
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc.strerror}") from exc
    return parse_config(text, subcommand, source=str(path))
