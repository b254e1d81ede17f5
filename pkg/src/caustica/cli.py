"""Command line driver: ``caustica run <config.json>`` / ``caustica validate``.

A config is a JSON object::

    {
      "experiment": "caustic_scan",        # caustic_scan | spectrum | kernel | slit
                                           # | susceptibility_scan | oracle_compare
      "lambda": {"kind": "constant", "value": 1.0},
      "mu": {"kind": "constant", "value": 0.0},          # optional, default 0
      "T": 3.14159,
      "params": {"a": 1.0, "sigma0": 1.0, "p": 0.0, "hbar": 1.0},
      "scan": {"parameter": "omega_T", "min": 1.57, "max": 11.0, "steps": 301},
      "settings": {"n_steps": 2048, "eps_caustic": 1e-8},
      "output": {"name": "run", "float_format": "fixed"}
    }

Each run writes ``<name>.csv`` (one row per scan point, RFC 4180, LF) and
``<name>.json`` (settings echo, column documentation, derived constants).
Exit status: 0 success, 2 invalid config, 3 numerical failure.
"""
from __future__ import annotations

import argparse
import csv
import functools
import io
import json
import logging
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Callable

import numpy as np
from scipy.optimize import brentq

from . import _core
from .classical import (
    CriticalPotentialError,
    IntegrationError,
    InvalidInputError,
    action_coefficients,
    caustic_report,
    solve_fundamental,
)
from .kernel import CriticalKernel, RegularKernel, critical_kernel, regular_kernel
from .oracle import BoundaryLeakError, GridState, envelope_box, l2_norm, moments, propagate
from .slit import (
    CriticalFormError,
    SlitSetup,
    envelope,
    evolve,
    evolve_critical,
    initial_state,
    magnification,
    optimal_slit,
    sigma_formula,
    susceptibility,
)
from .spectral import EigensolverError, morse_crosscheck, sturm_liouville_spectrum
from .timefun import Constant, FunctionProfile, ProfileError, profile_from_dict

logger = logging.getLogger("caustica")

SCHEMA_VERSION = "1.0.0"

EXPERIMENTS = ("caustic_scan", "spectrum", "kernel", "slit", "susceptibility_scan", "oracle_compare")

SCAN_PARAMETERS = {
    "caustic_scan": ("omega_T", "T", "lambda_scale", "omega"),
    "spectrum": ("omega_T", "T", "lambda_scale", "omega"),
    "kernel": (),
    "slit": ("sigma0", "a", "p", "tau", "hbar", "T", "omega_T", "omega"),
    "susceptibility_scan": ("p", "sigma0", "a", "hbar", "T", "omega_T", "omega"),
    "oracle_compare": (),
}

DEFAULT_SETTINGS = {
    "n_steps": 2048,
    "check_convergence": True,
    "eps_caustic": 1e-8,
    "tol_wronskian": 1e-9,
    "N": 1024,
    "n_max": 5,
    "oracle_points": 4096,
    "oracle_steps": 4096,
    "oracle_margin": 12.0,
    "fd_delta": None,
}

PARAM_DEFAULTS = {"a": 1.0, "sigma0": 1.0, "hbar": 1.0, "decoupled": False}


def report_schema_version() -> str:
    """Version of the CSV/JSON report layout.

    Major bump: a column removed/renamed or a summary key changes meaning.
    Minor bump: columns or summary keys added.  Patch: formatting fixes.
    """
    return SCHEMA_VERSION


class ConfigError(ValueError):
    def __init__(self, msg: str, field: str | None = None):
        self.field = field
        super().__init__(f"{field}: {msg}" if field else msg)


@dataclass(frozen=True)
class ScanAxis:
    parameter: str
    min: float
    max: float
    steps: int

    def values(self) -> np.ndarray:
        return np.linspace(self.min, self.max, self.steps)


@dataclass
class ExperimentConfig:
    experiment: str
    lam: Any
    mu: Any
    T: float | None
    params: dict
    scan: ScanAxis | None
    settings: dict
    output: dict
    raw: dict = field(repr=False, default_factory=dict)


def _num(d: dict, key: str, where: str, positive: bool = False, allow_none: bool = False):
    v = d.get(key)
    if v is None and allow_none:
        return None
    if isinstance(v, bool) or not isinstance(v, (int, float)) or not math.isfinite(v):
        raise ConfigError("must be a finite number", f"{where}{key}")
    if positive and v <= 0:
        raise ConfigError("must be positive", f"{where}{key}")
    return float(v)


def validate_config(raw: Any) -> ExperimentConfig:
    """Check a decoded config and fill defaults.  Raises :class:`ConfigError`."""
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")
    exp = raw.get("experiment")
    if exp is None:
        raise ConfigError("missing field", "experiment")
    if exp not in EXPERIMENTS:
        raise ConfigError(f"unknown experiment {exp!r}; expected one of {list(EXPERIMENTS)}", "experiment")
    known = {"experiment", "lambda", "mu", "T", "params", "scan", "settings", "output", "description"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"unknown top-level fields {sorted(extra)}")
    if "lambda" not in raw:
        raise ConfigError("missing field", "lambda")
    try:
        lam = profile_from_dict(raw["lambda"], "lambda")
        mu = profile_from_dict(raw["mu"], "mu") if raw.get("mu") is not None else Constant(0.0)
    except ProfileError as exc:
        raise ConfigError(str(exc)) from None

    params = dict(PARAM_DEFAULTS)
    user_params = raw.get("params", {})
    if not isinstance(user_params, dict):
        raise ConfigError("must be an object", "params")
    params.update(user_params)
    for key in ("a", "p", "tau"):
        if params.get(key) is not None:
            _num(params, key, "params.")
    for key in ("sigma0", "hbar"):
        _num(params, key, "params.", positive=True)
    if not isinstance(params.get("decoupled"), bool):
        raise ConfigError("must be a boolean", "params.decoupled")
    if params.get("tau") == 0:
        raise ConfigError("must be nonzero", "params.tau")
    if params.get("tau") is not None and params.get("p") is not None and not params["decoupled"]:
        raise ConfigError("give either p or tau, or set decoupled=true", "params")
    for key in ("a_points", "b_points"):
        if key in params:
            pts = params[key]
            if not isinstance(pts, list) or not pts or not all(
                    isinstance(x, (int, float)) and not isinstance(x, bool) for x in pts):
                raise ConfigError("must be a non-empty list of numbers", f"params.{key}")

    settings = dict(DEFAULT_SETTINGS)
    user_settings = raw.get("settings", {})
    if not isinstance(user_settings, dict):
        raise ConfigError("must be an object", "settings")
    unknown = set(user_settings) - set(DEFAULT_SETTINGS)
    if unknown:
        raise ConfigError(f"unknown settings {sorted(unknown)}", "settings")
    settings.update(user_settings)
    for key in ("n_steps", "N", "n_max", "oracle_points", "oracle_steps"):
        v = settings[key]
        if isinstance(v, bool) or not isinstance(v, int) or v <= 0:
            raise ConfigError("must be a positive integer", f"settings.{key}")
    if settings["n_steps"] < 16 or settings["n_steps"] % 2:
        raise ConfigError("must be even and >= 16", "settings.n_steps")
    for key in ("eps_caustic", "tol_wronskian", "oracle_margin"):
        _num(settings, key, "settings.", positive=True)
    _num(settings, "fd_delta", "settings.", positive=True, allow_none=True)

    scan = None
    if raw.get("scan") is not None:
        s = raw["scan"]
        if not isinstance(s, dict):
            raise ConfigError("must be an object", "scan")
        if set(s) - {"parameter", "min", "max", "steps"}:
            raise ConfigError(f"unknown fields {sorted(set(s) - {'parameter', 'min', 'max', 'steps'})}", "scan")
        for key in ("parameter", "min", "max", "steps"):
            if key not in s:
                raise ConfigError("missing field", f"scan.{key}")
        allowed = SCAN_PARAMETERS[exp]
        if s["parameter"] not in allowed:
            raise ConfigError(f"{s['parameter']!r} is not a scannable parameter of {exp}; "
                              f"expected one of {list(allowed)}", "scan.parameter")
        steps = s["steps"]
        if isinstance(steps, bool) or not isinstance(steps, int) or steps < 2:
            raise ConfigError("must be an integer >= 2", "scan.steps")
        scan = ScanAxis(s["parameter"], _num(s, "min", "scan."), _num(s, "max", "scan."), steps)
    elif exp in ("caustic_scan", "susceptibility_scan"):
        raise ConfigError("missing field", "scan")

    scanned = scan.parameter if scan else None
    T = raw.get("T")
    if T is None:
        if scanned not in ("T", "omega_T"):
            raise ConfigError("missing field", "T")
    else:
        T = _num(raw, "T", "", positive=True)
    if scanned in ("omega_T", "omega") and not isinstance(lam, Constant):
        raise ConfigError(f"scan over {scanned} needs a constant lambda", "lambda")
    if scanned == "omega_T" and lam.value <= 0:
        raise ConfigError("scan over omega_T needs lambda = omega^2 > 0", "lambda.value")

    output = {"name": exp, "float_format": "fixed"}
    user_out = raw.get("output", {})
    if not isinstance(user_out, dict):
        raise ConfigError("must be an object", "output")
    output.update(user_out)
    if output["float_format"] not in ("fixed", "shortest"):
        raise ConfigError("must be 'fixed' or 'shortest'", "output.float_format")
    if not isinstance(output["name"], str) or not output["name"] or "/" in output["name"]:
        raise ConfigError("must be a plain file stem", "output.name")
    return ExperimentConfig(exp, lam, mu, T, params, scan, settings, output, raw)


# ---------------------------------------------------------------------------
# per-point parameter resolution


@dataclass(frozen=True)
class Point:
    lam: Any
    mu: Any
    T: float
    params: dict


def _resolve(cfg: ExperimentConfig, value: float | None) -> Point:
    lam, T, params = cfg.lam, cfg.T, dict(cfg.params)
    name = cfg.scan.parameter if cfg.scan and value is not None else None
    if name == "T":
        T = value
    elif name == "omega_T":
        T = value / math.sqrt(lam.value)
    elif name == "omega":
        lam = Constant(value * value)
    elif name == "lambda_scale":
        if isinstance(lam, Constant):
            lam = Constant(value * lam.value, lam.horizon)
        else:
            base = lam
            lam = FunctionProfile(lambda t, base=base, c=value: c * base.eval(t), base.horizon)
    elif name is not None:
        params[name] = value
        if name == "p" and not params["decoupled"]:
            params.pop("tau", None)
        if name == "tau" and not params["decoupled"]:
            params.pop("p", None)
    if T is None or not T > 0:
        raise ConfigError(f"horizon T = {T} must be positive", "scan")
    return Point(lam, cfg.mu, float(T), params)


def _setup(params: dict) -> SlitSetup:
    a, s0, hb = params["a"], params["sigma0"], params["hbar"]
    p, tau = params.get("p"), params.get("tau")
    if params["decoupled"]:
        return SlitSetup(a, s0, math.inf if tau is None else tau, hb, p, True)
    if p is not None:
        return SlitSetup.from_momentum(a, s0, p, hb)
    return SlitSetup(a, s0, math.inf if tau is None else tau, hb)


@functools.lru_cache(maxsize=64)
def _classical(lam, mu, T, n_steps, check, eps, tol_w):
    pair = solve_fundamental(lam, mu, T, n_steps=n_steps, check_convergence=check, tol_wronskian=tol_w)
    return pair, caustic_report(pair, eps)


def _solve(pt: Point, st: dict):
    return _classical(pt.lam, pt.mu, pt.T, st["n_steps"], st["check_convergence"],
                      st["eps_caustic"], st["tol_wronskian"])


# ---------------------------------------------------------------------------
# experiments: each returns (columns, rows, results)

Columns = dict  # name -> description


def _caustic_scan(cfg: ExperimentConfig, runner) -> tuple[Columns, list, dict]:
    st = cfg.settings
    values = cfg.scan.values()

    def row(v):
        pt = _resolve(cfg, v)
        pair, rep = _solve(pt, st)
        return [v, pt.T, rep.u_T, rep.caustic_residual, rep.critical, rep.k, rep.morse_index]

    rows = runner(row, values)
    name = cfg.scan.parameter

    def u_T(v):
        pt = _resolve(cfg, v)
        return solve_fundamental(pt.lam, pt.mu, pt.T, st["n_steps"], check_convergence=False).u.final

    caustics = []
    for i in range(len(rows) - 1):
        if rows[i][4]:
            loc = float(values[i])
        elif rows[i][2] * rows[i + 1][2] < 0 and not rows[i + 1][4]:
            loc = brentq(u_T, values[i], values[i + 1], xtol=1e-14, rtol=4 * np.finfo(float).eps)
        else:
            continue
        pt = _resolve(cfg, loc)
        pair, rep = _solve(pt, st)
        caustics.append({name: loc, "T": pt.T, "critical": rep.critical, "k": rep.k,
                         "morse_index": rep.morse_index, "focal_intercept": rep.focal_intercept})
    if rows and rows[-1][4]:
        pt = _resolve(cfg, float(values[-1]))
        _, rep = _solve(pt, st)
        caustics.append({name: float(values[-1]), "T": pt.T, "critical": True, "k": rep.k,
                         "morse_index": rep.morse_index, "focal_intercept": rep.focal_intercept})
    cols = {
        name: "scan value",
        "T": "horizon T",
        "u_T": "Jacobi field u(T) (u(0)=0, u'(0)=1)",
        "caustic_residual": "|u(T)| / max|u| on [0, T]",
        "critical": "caustic at T (residual <= eps_caustic)",
        "k": "stretching factor v(T) (critical rows only)",
        "morse_index": "zeros of u on (0, T]",
    }
    return cols, rows, {"caustics": caustics, "critical_rows": sum(1 for r in rows if r[4])}


def _spectrum(cfg, runner):
    st = cfg.settings
    if cfg.scan is None:
        pt = _resolve(cfg, None)
        sl = sturm_liouville_spectrum(pt.lam, st["n_max"], st["N"], pt.T)
        check = morse_crosscheck(pt.lam, pt.T, st["N"], st["n_steps"], st["eps_caustic"])
        rows = [[n + 1, e] for n, e in enumerate(sl.eigenvalues)]
        cols = {"n": "mode number", "E_n": "Dirichlet eigenvalue of -(d2/dt2 + lambda)"}
        res = {**sl.to_dict(), "morse_index": check.classical_index, "morse_agrees": check.agrees,
               "critical": check.critical}
        return cols, rows, res

    def row(v):
        pt = _resolve(cfg, v)
        sl = sturm_liouville_spectrum(pt.lam, st["n_max"], st["N"], pt.T)
        check = morse_crosscheck(pt.lam, pt.T, st["N"], st["n_steps"], st["eps_caustic"])
        return [v, pt.T, sl.eigenvalues[0], sl.negative_count, sl.zero_count, sl.index,
                check.classical_index, check.agrees]

    rows = runner(row, cfg.scan.values())
    cols = {cfg.scan.parameter: "scan value", "T": "horizon T", "E_1": "lowest eigenvalue",
            "negative_count": "modes with E_n < -eps_zero", "zero_count": "modes with |E_n| <= eps_zero",
            "index": "negative_count + zero_count", "morse_index": "zeros of u on (0, T]",
            "agrees": "index == morse_index"}
    return cols, rows, {"all_agree": all(r[-1] for r in rows)}


def _kernel(cfg, runner):
    st = cfg.settings
    pt = _resolve(cfg, None)
    pair, rep = _solve(pt, st)
    hb = pt.params["hbar"]
    a_pts = pt.params.get("a_points", [0.0])
    if rep.critical:
        kern = critical_kernel(rep, pair, hbar=hb)
        rows = [[a, kern.focal_point(a), kern.amplitude, math.remainder(kern.phase(a), 2 * math.pi)]
                for a in a_pts]
        cols = {"a": "initial point", "b_focal": "focal point k a + s(T)",
                "amplitude": "sqrt|k| multiplying the delta function",
                "phase": "I(a)/hbar - pi m/2 (wrapped to [-pi, pi])"}
        res = {"branch": "critical", "k": kern.k, "s_T": kern.s_T, "morse_index": kern.morse_index,
               "action_coeffs": list(kern.action_coeffs), "caustic": rep.to_dict()}
        return cols, rows, res
    form = action_coefficients(pair, st["eps_caustic"])
    b_pts = pt.params.get("b_points", [0.0])
    rows = []
    for a in a_pts:
        for b in b_pts:
            kv = complex(regular_kernel(form, rep.morse_index, hb, a, b))
            rows.append([a, b, kv.real, kv.imag, abs(kv), math.atan2(kv.imag, kv.real)])
    cols = {"a": "initial point", "b": "final point", "re": "Re K(b,T;a,0)", "im": "Im K(b,T;a,0)",
            "abs": "|K|", "arg": "arg K"}
    res = {"branch": "regular", "form": form.to_dict(), "morse_index": rep.morse_index,
           "caustic": rep.to_dict()}
    return cols, rows, res


def _regular_form(pt, st):
    pair, rep = _solve(pt, st)
    if rep.critical:
        raise CriticalFormError(f"potential is critical at T = {pt.T}; slit formulas need a regular form")
    return action_coefficients(pair, st["eps_caustic"]), rep.morse_index


def _slit(cfg, runner):
    st = cfg.settings
    scan = cfg.scan or ScanAxis("sigma0", cfg.params["sigma0"], cfg.params["sigma0"], 2)

    def row(v):
        pt = _resolve(cfg, v) if cfg.scan else _resolve(cfg, None)
        form, m = _regular_form(pt, st)
        setup = _setup(pt.params)
        out = evolve(setup, form, m)
        return [v, pt.T, out.center, out.sigma, sigma_formula(setup, form), magnification(setup, form)]

    values = scan.values() if cfg.scan else np.array([cfg.params["sigma0"]])
    rows = runner(row, values)
    base = _resolve(cfg, None) if cfg.T is not None else _resolve(cfg, float(values[0]))
    form, m = _regular_form(base, st)
    setup = _setup(base.params)
    opt = optimal_slit(setup.a, form, setup.tau, setup.hbar, m,
                       None if setup.decoupled else setup.p)
    best = min(rows, key=lambda r: r[3])
    cols = {scan.parameter: "scan value", "T": "horizon T", "center": "<x> at T (closed form)",
            "sigma_T": "position standard deviation at T (Gaussian integral)",
            "sigma_formula": "sigma0 {M^2 + (hbar/2 sigma0^2 B)^2}^(1/2)",
            "magnification": "M = -(2A + 1/tau)/B"}
    res = {"sigma0_star": opt.sigma0_star, "sigma_min": opt.sigma_min,
           "infinite_concentration": opt.infinite_concentration,
           "scan_argmin": best[0], "scan_min_sigma": best[3],
           "form": form.to_dict(), "morse_index": m}
    return cols, rows, res


def _susceptibility(cfg, runner):
    st = cfg.settings

    def row(v):
        pt = _resolve(cfg, v)
        form, m = _regular_form(pt, st)
        setup = _setup(pt.params)
        sus = susceptibility(setup, form, st["fd_delta"], m)
        return [v, pt.T, sus.value, sus.signed, sus.jacobi, sus.finite_difference, sus.purely_quantum]

    rows = runner(row, cfg.scan.values())
    cols = {cfg.scan.parameter: "scan value", "T": "horizon T",
            "S": "|J| {1 + (hbar/2 sigma0^2 B M)^2}^(-1/2)", "S_signed": "(a/sigma0) d sigma/dp, closed form",
            "J": "Jacobi field J(T) = -1/B", "S_fd": "(a/sigma0) d sigma/dp by central difference",
            "purely_quantum": "magnification vanishes (S = 0)"}
    res = {"suppressed_everywhere": all(r[2] <= abs(r[4]) * (1 + 1e-12) for r in rows)}
    return cols, rows, res


def _oracle_compare(cfg, runner):
    st = cfg.settings
    pt = _resolve(cfg, None)
    pair, rep = _solve(pt, st)
    setup = _setup(pt.params)
    if rep.critical:
        fin = evolve_critical(setup, critical_kernel(rep, pair, hbar=setup.hbar))
    else:
        fin = evolve(setup, action_coefficients(pair, st["eps_caustic"]), rep.morse_index)
    _, cen, sig = envelope(pair, setup)
    lo, hi = envelope_box(cen, sig, st["oracle_margin"])
    start = GridState.from_function(initial_state(setup), lo, hi, st["oracle_points"])
    out = propagate(start, pt.lam, pt.mu, 0.0, pt.T, st["oracle_steps"], setup.hbar)
    ref = fin(out.x)
    mo, m0 = moments(out, setup.hbar), moments(start, setup.hbar)
    rows = [[x, p.real, p.imag, r.real, r.imag] for x, p, r in zip(out.x, out.psi, ref)]
    cols = {"x": "grid node", "re_oracle": "Re psi (Crank-Nicolson)", "im_oracle": "Im psi (Crank-Nicolson)",
            "re_closed": "Re psi (closed form)", "im_closed": "Im psi (closed form)"}
    res = {"branch": "critical" if rep.critical else "regular",
           "l2_rel_error": l2_norm(out.x, out.psi - ref) / l2_norm(out.x, ref),
           "center_oracle": mo.center, "center_closed": fin.center,
           "variance_oracle": mo.variance, "variance_closed": fin.variance,
           "norm_drift": abs(mo.norm - m0.norm), "box": [lo, hi]}
    return cols, rows, res


RUNNERS: dict[str, Callable] = {
    "caustic_scan": _caustic_scan,
    "spectrum": _spectrum,
    "kernel": _kernel,
    "slit": _slit,
    "susceptibility_scan": _susceptibility,
    "oracle_compare": _oracle_compare,
}


# ---------------------------------------------------------------------------
# output


def _fmt(v, style: str) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return "true" if v else "false"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    v = float(v)
    if math.isnan(v):
        return "nan"
    if math.isinf(v):
        return "inf" if v > 0 else "-inf"
    return f"{v:.16e}" if style == "fixed" else repr(v)


def render_csv(columns: list[str], rows: list, style: str = "fixed") -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(v, style) for v in r])
    return buf.getvalue()


def _jsonable(obj):
    if isinstance(obj, dict):
        return {k: _jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_jsonable(v) for v in obj]
    if isinstance(obj, (np.bool_,)):
        return bool(obj)
    if isinstance(obj, (np.integer,)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        return f if math.isfinite(f) else None
    return obj


SUMMARY_SCHEMA = {
    "type": "object",
    "required": ["schema_version", "experiment", "backend", "config", "settings", "columns",
                 "rows", "csv", "results"],
    "properties": {
        "schema_version": {"type": "string", "pattern": r"^\d+\.\d+\.\d+$"},
        "experiment": {"enum": list(EXPERIMENTS)},
        "backend": {"type": "string"},
        "config": {"type": "object"},
        "settings": {"type": "object"},
        "columns": {"type": "object", "additionalProperties": {"type": "string"}},
        "rows": {"type": "integer", "minimum": 0},
        "csv": {"type": "string"},
        "results": {"type": "object"},
    },
}


def run(cfg: ExperimentConfig, out_dir: str | os.PathLike = ".", threads: int = 1) -> dict:
    """Execute ``cfg``; write CSV and JSON into ``out_dir``; return the summary."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    if threads > 1:
        pool = ThreadPoolExecutor(max_workers=threads)

        def runner(fn, values):
            return list(pool.map(fn, [float(v) for v in values]))
    else:
        pool = None

        def runner(fn, values):
            return [fn(float(v)) for v in values]
    try:
        columns, rows, results = RUNNERS[cfg.experiment](cfg, runner)
    finally:
        if pool is not None:
            pool.shutdown()
    name = cfg.output["name"]
    csv_path = out_dir / f"{name}.csv"
    with open(csv_path, "w", newline="") as fh:
        fh.write(render_csv(list(columns), rows, cfg.output["float_format"]))
    summary = {
        "schema_version": SCHEMA_VERSION,
        "experiment": cfg.experiment,
        "backend": _core.BACKEND,
        "config": cfg.raw,
        "settings": cfg.settings,
        "columns": columns,
        "rows": len(rows),
        "csv": csv_path.name,
        "results": results,
    }
    summary = _jsonable(summary)
    with open(out_dir / f"{name}.json", "w") as fh:
        json.dump(summary, fh, indent=2)
        fh.write("\n")
    return summary


def load_config(path: str | os.PathLike) -> ExperimentConfig:
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"invalid JSON: {exc.msg} (line {exc.lineno}, column {exc.colno})") from None
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}") from None
    return validate_config(raw)


NUMERIC_ERRORS = (IntegrationError, InvalidInputError, CriticalPotentialError, CriticalFormError,
                  BoundaryLeakError, EigensolverError, ArithmeticError, np.linalg.LinAlgError,
                  RuntimeError, ValueError)


def _fail(kind: str, exc: Exception, code: int) -> int:
    msg = {"status": "error", "kind": kind, "message": str(exc)}
    if getattr(exc, "field", None):
        msg["field"] = exc.field
    print(json.dumps(msg), file=sys.stderr)
    return code


def main(argv: list[str] | None = None) -> int:
    parser = argparse.ArgumentParser(prog="caustica", description=__doc__.split("\n")[0])
    sub = parser.add_subparsers(dest="command", required=True)
    p_run = sub.add_parser("run", help="run an experiment config")
    p_run.add_argument("config")
    p_run.add_argument("--out", default=".", help="output directory (default: .)")
    p_run.add_argument("--threads", type=int, default=None,
                       help="worker threads for scans (env CAUSTICA_THREADS, default 1)")
    p_val = sub.add_parser("validate", help="check a config without running it")
    p_val.add_argument("config")
    sub.add_parser("version", help="print the report schema version")
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.WARNING, format="%(levelname)s %(name)s: %(message)s")

    if args.command == "version":
        print(report_schema_version())
        return 0
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        return _fail("config", exc, 2)
    if args.command == "validate":
        print(json.dumps({"status": "ok", "experiment": cfg.experiment}))
        return 0

    threads = args.threads
    if threads is None:
        env = os.environ.get("CAUSTICA_THREADS", "1")
        try:
            threads = int(env)
        except ValueError:
            return _fail("config", ConfigError(f"CAUSTICA_THREADS={env!r} is not an integer"), 2)
    if threads < 1:
        return _fail("config", ConfigError("must be >= 1", "--threads"), 2)
    try:
        summary = run(cfg, args.out, threads)
    except ConfigError as exc:
        return _fail("config", exc, 2)
    except NUMERIC_ERRORS as exc:
        return _fail("numeric", exc, 3)
    print(json.dumps({"status": "ok", "experiment": cfg.experiment, "rows": summary["rows"],
                      "csv": str(Path(args.out) / summary["csv"])}))
    return 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
