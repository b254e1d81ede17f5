"""Time-dependent coefficient profiles lambda(t), mu(t) on [0, T].

Profiles are immutable.  ``eval`` accepts scalars or arrays and is
left-continuous at breakpoints; pass ``side="right"`` for the right limit
(the integrators use it at the start of each step).

JSON schema (one object per profile)::

    {"kind": "constant", "value": 1.0}
    {"kind": "piecewise_constant", "breakpoints": [0, 1, 2], "values": [1, 4]}
    {"kind": "polynomial", "breakpoints": [0, 2], "coefficients": [[1, -2]]}
    {"kind": "tabulated", "t": [0, 1], "v": [0, 2]}

Polynomial coefficients are in ascending powers of absolute time ``t``.
Every kind accepts an optional ``"horizon"``; constant and polynomial
profiles default to the last breakpoint (or infinity), tabulated and
piecewise profiles to their last sample.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Mapping, Sequence

import numpy as np

__all__ = [
    "CoefficientProfile",
    "Constant",
    "PiecewiseConstant",
    "Polynomial",
    "Tabulated",
    "FunctionProfile",
    "ProfileError",
    "ProfileParseError",
    "ProfileValidationError",
    "DomainError",
    "parse_profile",
    "profile_from_dict",
    "zero",
]

# slack allowed when checking t against [0, T]
_DOMAIN_SLACK = 1e-12


class ProfileError(ValueError):
    pass


class ProfileParseError(ProfileError):
    """Malformed JSON text; carries line/column of the failure."""

    def __init__(self, msg: str, lineno: int | None = None, colno: int | None = None):
        self.lineno = lineno
        self.colno = colno
        where = f" (line {lineno}, column {colno})" if lineno is not None else ""
        super().__init__(msg + where)


class ProfileValidationError(ProfileError):
    """Well-formed input describing an invalid profile."""

    def __init__(self, msg: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {msg}" if field else msg)


class DomainError(ProfileError):
    pass


@dataclass(frozen=True)
class CoefficientProfile:
    """Base class.  Subclasses implement ``_eval(t, side)`` on arrays."""

    horizon: float

    def __call__(self, t, side: str = "left"):
        return self.eval(t, side)

    def eval(self, t, side: str = "left"):
        scalar = np.ndim(t) == 0
        tt = np.asarray(t, dtype=float)
        lo, hi = -_DOMAIN_SLACK, self.horizon * (1 + _DOMAIN_SLACK) + _DOMAIN_SLACK
        if np.any(tt < lo) or np.any(tt > hi) or np.any(np.isnan(tt)):
            raise DomainError(f"t outside [0, {self.horizon}]")
        if side not in ("left", "right"):
            raise ValueError("side must be 'left' or 'right'")
        out = self._eval(np.atleast_1d(tt), side)
        return float(out[0]) if scalar else out.reshape(tt.shape)

    def _eval(self, t: np.ndarray, side: str) -> np.ndarray:  # pragma: no cover
        raise NotImplementedError

    def breakpoints(self) -> tuple[float, ...]:
        """Interior points where the profile may be non-smooth."""
        return ()

    def covers(self, T: float) -> bool:
        return self.horizon >= T * (1 - 1e-12)

    def to_dict(self) -> dict[str, Any]:  # pragma: no cover
        raise NotImplementedError

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    def max_abs(self, T: float | None = None, n: int = 2049) -> float:
        T = self.horizon if T is None else T
        grid = np.linspace(0.0, T, n)
        grid = np.union1d(grid, [b for b in self.breakpoints() if b <= T])
        vals = np.concatenate([self.eval(grid, "left"), self.eval(grid, "right")])
        return float(np.max(np.abs(vals)))


def _horizon_dict(h: float) -> dict[str, Any]:
    return {} if math.isinf(h) else {"horizon": h}


@dataclass(frozen=True)
class Constant(CoefficientProfile):
    value: float = 0.0

    def __init__(self, value: float, horizon: float = math.inf):
        object.__setattr__(self, "value", float(value))
        object.__setattr__(self, "horizon", float(horizon))
        if not math.isfinite(self.value):
            raise ProfileValidationError("must be finite", "value")
        _check_horizon(self.horizon)

    def _eval(self, t, side):
        return np.full(t.shape, self.value)

    def to_dict(self):
        return {"kind": "constant", "value": self.value, **_horizon_dict(self.horizon)}


def _check_horizon(h: float) -> None:
    if not (h > 0):
        raise ProfileValidationError("horizon must be positive", "horizon")


def _check_breakpoints(bp: np.ndarray, name: str = "breakpoints") -> None:
    if bp.ndim != 1 or bp.size < 2:
        raise ProfileValidationError("need at least two breakpoints (one piece)", name)
    if not np.all(np.isfinite(bp)):
        raise ProfileValidationError("must be finite", name)
    if bp[0] != 0.0:
        raise ProfileValidationError("first breakpoint must be 0", name)
    if np.any(np.diff(bp) <= 0):
        raise ProfileValidationError("must be strictly increasing", name)


def _piece_index(bp: np.ndarray, t: np.ndarray, side: str) -> np.ndarray:
    # left-continuous: a breakpoint belongs to the piece on its left
    idx = np.searchsorted(bp, t, side="left" if side == "left" else "right") - 1
    return np.clip(idx, 0, bp.size - 2)


@dataclass(frozen=True)
class PiecewiseConstant(CoefficientProfile):
    bp: tuple[float, ...] = field(default=())
    values: tuple[float, ...] = field(default=())

    def __init__(self, breakpoints: Sequence[float], values: Sequence[float], horizon: float | None = None):
        bp = np.asarray(breakpoints, dtype=float)
        vals = np.asarray(values, dtype=float)
        _check_breakpoints(bp)
        if vals.shape != (bp.size - 1,):
            raise ProfileValidationError(
                f"expected {bp.size - 1} values for {bp.size} breakpoints, got {vals.size}", "values")
        if not np.all(np.isfinite(vals)):
            raise ProfileValidationError("must be finite", "values")
        h = float(bp[-1]) if horizon is None else float(horizon)
        if h > bp[-1] * (1 + 1e-12):
            raise ProfileValidationError("horizon beyond last breakpoint", "horizon")
        object.__setattr__(self, "bp", tuple(bp.tolist()))
        object.__setattr__(self, "values", tuple(vals.tolist()))
        object.__setattr__(self, "horizon", h)

    def _eval(self, t, side):
        return np.asarray(self.values)[_piece_index(np.asarray(self.bp), t, side)]

    def breakpoints(self):
        return self.bp[1:-1]

    def to_dict(self):
        d = {"kind": "piecewise_constant", "breakpoints": list(self.bp), "values": list(self.values)}
        if self.horizon != self.bp[-1]:
            d["horizon"] = self.horizon
        return d


@dataclass(frozen=True)
class Polynomial(CoefficientProfile):
    bp: tuple[float, ...] = field(default=())
    coefficients: tuple[tuple[float, ...], ...] = field(default=())

    def __init__(self, coefficients, breakpoints: Sequence[float] | None = None, horizon: float | None = None):
        # a flat list of numbers is a single piece on [0, horizon]
        if len(coefficients) and np.ndim(coefficients[0]) == 0:
            coefficients = [coefficients]
        if breakpoints is None:
            if len(coefficients) != 1:
                raise ProfileValidationError("breakpoints required for several pieces", "breakpoints")
            h = math.inf if horizon is None else float(horizon)
            _check_horizon(h)
            breakpoints = [0.0, h]
        bp = np.asarray(breakpoints, dtype=float)
        if not math.isinf(bp[-1]):
            _check_breakpoints(bp)
        elif bp.size != 2 or bp[0] != 0.0:
            raise ProfileValidationError("an unbounded polynomial must be a single piece", "breakpoints")
        pieces = []
        for i, c in enumerate(coefficients):
            arr = np.asarray(c, dtype=float)
            if arr.ndim != 1 or arr.size == 0:
                raise ProfileValidationError("empty piece", f"coefficients[{i}]")
            if not np.all(np.isfinite(arr)):
                raise ProfileValidationError("must be finite", f"coefficients[{i}]")
            pieces.append(tuple(arr.tolist()))
        if len(pieces) != bp.size - 1:
            raise ProfileValidationError(
                f"expected {bp.size - 1} pieces, got {len(pieces)}", "coefficients")
        h = float(bp[-1]) if horizon is None else float(horizon)
        object.__setattr__(self, "bp", tuple(bp.tolist()))
        object.__setattr__(self, "coefficients", tuple(pieces))
        object.__setattr__(self, "horizon", h)

    def _eval(self, t, side):
        bp = np.asarray(self.bp)
        idx = _piece_index(bp, t, side) if len(self.coefficients) > 1 else np.zeros(t.shape, int)
        out = np.empty(t.shape)
        for i, c in enumerate(self.coefficients):
            sel = idx == i
            if np.any(sel):
                out[sel] = np.polynomial.polynomial.polyval(t[sel], c)
        return out

    def breakpoints(self):
        return self.bp[1:-1]

    def to_dict(self):
        d: dict[str, Any] = {"kind": "polynomial", "coefficients": [list(c) for c in self.coefficients]}
        if not math.isinf(self.bp[-1]):
            d["breakpoints"] = list(self.bp)
        if self.horizon != self.bp[-1]:
            d["horizon"] = self.horizon
        return d


@dataclass(frozen=True)
class Tabulated(CoefficientProfile):
    t: tuple[float, ...] = field(default=())
    v: tuple[float, ...] = field(default=())

    def __init__(self, t: Sequence[float], v: Sequence[float], horizon: float | None = None):
        tt = np.asarray(t, dtype=float)
        vv = np.asarray(v, dtype=float)
        if tt.ndim != 1 or tt.size < 2:
            raise ProfileValidationError("need at least two samples", "t")
        if vv.shape != tt.shape:
            raise ProfileValidationError(f"length {vv.size} does not match t ({tt.size})", "v")
        if not (np.all(np.isfinite(tt)) and np.all(np.isfinite(vv))):
            raise ProfileValidationError("samples must be finite", "t")
        if np.any(np.diff(tt) <= 0):
            raise ProfileValidationError("sample times must be strictly increasing", "t")
        if tt[0] > 0:
            raise ProfileValidationError("samples must start at or before t = 0", "t")
        h = float(tt[-1]) if horizon is None else float(horizon)
        if h > tt[-1] * (1 + 1e-12):
            raise ProfileValidationError("samples do not cover the horizon", "horizon")
        _check_horizon(h)
        object.__setattr__(self, "t", tuple(tt.tolist()))
        object.__setattr__(self, "v", tuple(vv.tolist()))
        object.__setattr__(self, "horizon", h)

    def _eval(self, t, side):
        return np.interp(t, self.t, self.v)

    def breakpoints(self):
        return tuple(x for x in self.t[1:-1] if 0 < x < self.horizon)

    def to_dict(self):
        d = {"kind": "tabulated", "t": list(self.t), "v": list(self.v)}
        if self.horizon != self.t[-1]:
            d["horizon"] = self.horizon
        return d


@dataclass(frozen=True)
class FunctionProfile(CoefficientProfile):
    """Wraps a vectorized callable.  In-process only: not serializable."""

    func: Callable[[np.ndarray], np.ndarray] = field(default=lambda t: np.zeros_like(t))

    def __init__(self, func, horizon: float = math.inf):
        object.__setattr__(self, "func", func)
        object.__setattr__(self, "horizon", float(horizon))
        _check_horizon(self.horizon)

    def _eval(self, t, side):
        out = np.asarray(self.func(t), dtype=float)
        return np.broadcast_to(out, t.shape).copy()

    def to_dict(self):
        raise TypeError("FunctionProfile cannot be serialized")


def zero(horizon: float = math.inf) -> Constant:
    return Constant(0.0, horizon)


_KINDS = {
    "constant": (("value",), ()),
    "piecewise_constant": (("breakpoints", "values"), ()),
    "polynomial": (("coefficients",), ("breakpoints",)),
    "tabulated": (("t", "v"), ()),
}


def profile_from_dict(spec: Mapping[str, Any], path: str = "") -> CoefficientProfile:
    """Build a profile from an already-decoded JSON object."""
    pre = f"{path}." if path else ""
    if not isinstance(spec, Mapping):
        raise ProfileValidationError("profile must be a JSON object", path or None)
    kind = spec.get("kind")
    if kind not in _KINDS:
        raise ProfileValidationError(
            f"unknown kind {kind!r}; expected one of {sorted(_KINDS)}", pre + "kind")
    required, optional = _KINDS[kind]
    for key in required:
        if key not in spec:
            raise ProfileValidationError("missing field", pre + key)
    extra = set(spec) - set(required) - set(optional) - {"kind", "horizon"}
    if extra:
        raise ProfileValidationError(f"unknown fields {sorted(extra)}", path or None)
    horizon = spec.get("horizon")
    try:
        if kind == "constant":
            return Constant(_number(spec["value"], pre + "value"),
                            math.inf if horizon is None else horizon)
        if kind == "piecewise_constant":
            return PiecewiseConstant(spec["breakpoints"], spec["values"], horizon)
        if kind == "polynomial":
            return Polynomial(spec["coefficients"], spec.get("breakpoints"), horizon)
        return Tabulated(spec["t"], spec["v"], horizon)
    except ProfileValidationError as exc:
        if exc.field and path:
            raise ProfileValidationError(str(exc).split(": ", 1)[-1], pre + exc.field) from None
        raise
    except (TypeError, ValueError) as exc:
        raise ProfileValidationError(str(exc), path or None) from None


def _number(x, name):
    if isinstance(x, bool) or not isinstance(x, (int, float)):
        raise ProfileValidationError("must be a number", name)
    return float(x)


def parse_profile(spec: str | Mapping[str, Any]) -> CoefficientProfile:
    """Parse a profile from JSON text or a decoded mapping.

    Raises
    ------
    ProfileParseError
        Text is not valid JSON.
    ProfileValidationError
        Wrong kind, missing fields, non-monotone samples, empty pieces.
    """
    if isinstance(spec, (str, bytes)):
        try:
            spec = json.loads(spec)
        except json.JSONDecodeError as exc:
            raise ProfileParseError(exc.msg, exc.lineno, exc.colno) from None
    return profile_from_dict(spec)
