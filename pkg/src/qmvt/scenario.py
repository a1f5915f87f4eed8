"""Scenario files: a JSON tree naming a base law, a construction and a ``g``.

Names use a small call syntax: ``exponential{2}``, ``power{0.5}``,
``compose[power{2},dual_power{3}]``, ``scaled{2,uniform01}``.  Unknown keys
and unknown names are errors.

Example::

    {
      "base_distribution": "uniform01",
      "construction": {"theorem1": {"h": "power{2}", "l": "power{1}"}},
      "test_function": "monomial{2}",
      "numerics": {"tol_quad": 1e-9, "mc_samples": 0}
    }
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np

from . import distortion as dist
from . import quantile as qc
from . import testfunctions as tf
from .exceptions import QMVTError, ValidationError
from .order import DEFAULT_ST_GRID
from .quadrature import DEFAULT_TOL_IDENTITY, default_tol_quad

__all__ = [
    "CONSTRUCTIONS",
    "Numerics",
    "Scenario",
    "ScenarioError",
    "load_scenario",
    "parse_distortion",
    "parse_distribution",
    "parse_scenario",
    "parse_test_function",
]

CONSTRUCTIONS = ("mvt", "theorem1", "theorem2", "taylor", "lorenz")
_TOP_KEYS = {"base_distribution", "construction", "test_function", "numerics", "description"}
_NUMERIC_KEYS = {"tol_quad", "tol_identity", "grid_size", "mc_samples", "seed"}
_CONSTRUCTION_KEYS = {
    "mvt": {"lower", "upper"},
    "theorem1": {"h", "l"},
    "theorem2": {"h", "t"},
    "taylor": {"n"},
    "lorenz": set(),
}


class ScenarioError(QMVTError, ValueError):
    """Malformed scenario input."""


def _split_args(text: str) -> list[str]:
    args, depth, start = [], 0, 0
    for i, ch in enumerate(text):
        if ch in "{[":
            depth += 1
        elif ch in "}]":
            depth -= 1
            if depth < 0:
                raise ScenarioError(f"unbalanced brackets in {text!r}")
        elif ch == "," and depth == 0:
            args.append(text[start:i].strip())
            start = i + 1
    if depth != 0:
        raise ScenarioError(f"unbalanced brackets in {text!r}")
    tail = text[start:].strip()
    if tail or args:
        args.append(tail)
    return args


def _parse_call(spec: str) -> tuple[str, list[str]]:
    if not isinstance(spec, str) or not spec.strip():
        raise ScenarioError(f"expected a name string, got {spec!r}")
    spec = spec.strip()
    i = min((k for k in (spec.find("{"), spec.find("[")) if k >= 0), default=-1)
    if i < 0:
        if any(c in spec for c in "}],"):
            raise ScenarioError(f"malformed name {spec!r}")
        return spec, []
    close = "}" if spec[i] == "{" else "]"
    if i == 0 or not spec.endswith(close):
        raise ScenarioError(f"malformed name {spec!r}")
    return spec[:i].strip(), _split_args(spec[i + 1 : -1])


def _floats(name: str, args: list[str], count: int | None = None) -> list[float]:
    if count is not None and len(args) != count:
        raise ScenarioError(f"{name} takes {count} parameter(s), got {len(args)}")
    try:
        return [float(a) for a in args]
    except ValueError:
        raise ScenarioError(f"{name}: parameters must be numbers, got {args}") from None


def parse_distribution(spec: str) -> qc.QuantileDistribution:
    name, args = _parse_call(spec)
    try:
        if name == "uniform01":
            _floats(name, args, 0)
            return qc.make_uniform01()
        if name == "uniform":
            return qc.make_uniform(*_floats(name, args, 1))
        if name == "exponential":
            return qc.make_exponential(*_floats(name, args, 1))
        if name == "degenerate0":
            _floats(name, args, 0)
            return qc.make_degenerate_zero()
        if name == "quantile_power":
            (k,) = _floats(name, args, 1)
            if not k > 0:
                raise ScenarioError("quantile_power needs a positive exponent")
            return qc.make_from_quantile(
                lambda u: np.asarray(u, dtype=float) ** k,
                lambda u: k * np.asarray(u, dtype=float) ** (k - 1),
                (0.0, 1.0),
                name=f"quantile_power{{{k!r}}}",
                mean=1.0 / (k + 1.0),
            )
        if name == "exp_mixture":
            vals = _floats(name, args)
            if len(vals) < 2 or len(vals) % 2:
                raise ScenarioError("exp_mixture takes weight,rate pairs")
            return qc.make_exponential_mixture(vals[0::2], vals[1::2])
        if name == "scaled":
            if len(args) != 2:
                raise ScenarioError("scaled takes a factor and a distribution")
            (c,) = _floats(name, args[:1])
            return qc.scaled(parse_distribution(args[1]), c)
    except (ValidationError, TypeError) as exc:
        raise ScenarioError(f"{spec}: {exc}") from None
    raise ScenarioError(f"unknown distribution {name!r}")


def parse_distortion(spec: str) -> dist.DistortionFunction:
    name, args = _parse_call(spec)
    try:
        if name == "identity":
            _floats(name, args, 0)
            return dist.identity_distortion()
        if name == "power":
            return dist.power_distortion(*_floats(name, args, 1))
        if name == "dual_power":
            return dist.dual_power_distortion(*_floats(name, args, 1))
        if name == "cte":
            return dist.cte_distortion(*_floats(name, args, 1))
        if name == "compose":
            if len(args) < 2:
                raise ScenarioError("compose needs at least two distortions")
            parts = [parse_distortion(a) for a in args]
            out = parts[-1]
            for part in reversed(parts[:-1]):
                out = dist.compose(part, out)
            return out
    except ValidationError as exc:
        raise ScenarioError(f"{spec}: {exc}") from None
    raise ScenarioError(f"unknown distortion {name!r}")


def parse_test_function(spec: str) -> tf.TestFunction:
    name, args = _parse_call(spec)
    try:
        if name == "monomial":
            (k,) = _floats(name, args, 1)
            return tf.monomial(k)
        if name == "exp":
            _floats(name, args, 0)
            return tf.exponential()
        if name == "sin_half_pi":
            _floats(name, args, 0)
            return tf.sine_half_pi()
        if name == "constant":
            return tf.constant(*_floats(name, args, 1))
        if name == "linear":
            return tf.linear(*_floats(name, args, 1))
    except ValidationError as exc:
        raise ScenarioError(f"{spec}: {exc}") from None
    raise ScenarioError(f"unknown test function {name!r}")


@dataclass(frozen=True)
class Numerics:
    tol_quad: float = field(default_factory=default_tol_quad)
    tol_identity: float = DEFAULT_TOL_IDENTITY
    grid_size: int = DEFAULT_ST_GRID
    mc_samples: int = 0
    seed: int = 0


@dataclass(frozen=True, eq=False)
class Scenario:
    """A parsed scenario with every name resolved.

    ``params`` holds the construction's resolved objects: ``lower``/``upper``
    for ``mvt``, ``h``/``l`` for ``theorem1``, ``h``/``t`` for ``theorem2``
    and ``n`` for ``taylor``.
    """

    kind: str
    base: qc.QuantileDistribution | None
    params: dict[str, Any]
    test_function: tf.TestFunction
    numerics: Numerics
    raw: dict[str, Any]


def _check_keys(obj: dict, allowed: set[str], where: str) -> None:
    unknown = set(obj) - allowed
    if unknown:
        raise ScenarioError(f"unknown key(s) in {where}: {sorted(unknown)}")


def _parse_numerics(obj: Any) -> Numerics:
    if obj is None:
        return Numerics()
    if not isinstance(obj, dict):
        raise ScenarioError("numerics must be an object")
    _check_keys(obj, _NUMERIC_KEYS, "numerics")
    kw: dict[str, Any] = {}
    for key in ("tol_quad", "tol_identity"):
        if key in obj:
            v = obj[key]
            if isinstance(v, bool) or not isinstance(v, (int, float)) or not (v > 0 and math.isfinite(v)):
                raise ScenarioError(f"numerics.{key} must be a positive number")
            kw[key] = float(v)
    for key, least in (("grid_size", 2), ("mc_samples", 0), ("seed", 0)):
        if key in obj:
            v = obj[key]
            if isinstance(v, bool) or not isinstance(v, int) or v < least:
                raise ScenarioError(f"numerics.{key} must be an integer >= {least}")
            kw[key] = v
    if kw.get("mc_samples", 0) and kw["mc_samples"] < 100:
        raise ScenarioError("numerics.mc_samples must be 0 (no Monte Carlo) or at least 100")
    return Numerics(**kw)


def parse_scenario(obj: Any) -> Scenario:
    """Validate and resolve a scenario tree (as loaded from JSON)."""
    if not isinstance(obj, dict):
        raise ScenarioError("scenario must be a JSON object")
    _check_keys(obj, _TOP_KEYS, "scenario")
    construction = obj.get("construction")
    if isinstance(construction, str):
        kind, body = construction, {}
    elif isinstance(construction, dict) and len(construction) == 1:
        ((kind, body),) = construction.items()
        body = {} if body is None else body
    else:
        raise ScenarioError("construction must be a name or a single-key object")
    if kind not in CONSTRUCTIONS:
        raise ScenarioError(f"unknown construction {kind!r}; expected one of {CONSTRUCTIONS}")
    if not isinstance(body, dict):
        raise ScenarioError(f"construction.{kind} must be an object")
    _check_keys(body, _CONSTRUCTION_KEYS[kind], f"construction.{kind}")
    missing = _CONSTRUCTION_KEYS[kind] - set(body)
    if missing:
        raise ScenarioError(f"construction.{kind} is missing {sorted(missing)}")

    base = None
    if "base_distribution" in obj:
        base = parse_distribution(obj["base_distribution"])
    elif kind != "mvt":
        raise ScenarioError("base_distribution is required")
    if "test_function" not in obj:
        raise ScenarioError("test_function is required")
    g = parse_test_function(obj["test_function"])
    numerics = _parse_numerics(obj.get("numerics"))

    params: dict[str, Any] = {}
    if kind == "mvt":
        params["lower"] = parse_distribution(body["lower"])
        params["upper"] = parse_distribution(body["upper"])
    elif kind == "theorem1":
        params["h"] = parse_distortion(body["h"])
        params["l"] = parse_distortion(body["l"])
    elif kind == "theorem2":
        params["h"] = parse_distortion(body["h"])
        t = body["t"]
        if isinstance(t, bool) or not isinstance(t, (int, float)) or not (t > 0 and math.isfinite(t)):
            raise ScenarioError("construction.theorem2.t must be a positive number")
        params["t"] = float(t)
    elif kind == "taylor":
        n = body["n"]
        if isinstance(n, bool) or not isinstance(n, int) or n < 1:
            raise ScenarioError("construction.taylor.n must be an integer >= 1")
        if n > g.order:
            raise ScenarioError(f"{g.label} supplies only {g.order} derivatives, taylor needs {n}")
        params["n"] = n
    return Scenario(kind, base, params, g, numerics, obj)


def load_scenario(path: str | Path) -> Scenario:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ScenarioError(f"cannot read scenario file {path}: {exc.strerror or exc}") from None
    try:
        obj = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ScenarioError(f"{path}: invalid JSON ({exc})") from None
    return parse_scenario(obj)
