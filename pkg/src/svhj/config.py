"""Run configuration: strict JSON parsing with all problems reported at once."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field

import numpy as np

from .cone_lattice import make_base
from .exceptions import ConfigError
from .problems import BUILTIN_NAMES, builtin

__all__ = ["Tolerances", "RunConfig", "parse_config", "COMMANDS"]

COMMANDS = ("curve", "halfspaces", "check-hypu", "tstar", "fenchel-check", "hopflax", "example")
# Commands that evaluate the solution at one (t, x).
POINT_COMMANDS = ("curve", "halfspaces", "check-hypu", "hopflax")

OUTPUT_KEYS = (
    "curve",
    "halfspaces",
    "boundary",
    "hypu",
    "tstar",
    "fenchel",
    "fenchel_summary",
    "hopflax",
    "hopflax_summary",
    "summary",
)
DEFAULT_OUTPUTS = {
    "curve": "curve.csv",
    "halfspaces": "halfspaces.csv",
    "boundary": "boundary.csv",
    "hypu": "hypu.json",
    "tstar": "tstar.json",
    "fenchel": "fenchel.csv",
    "fenchel_summary": "fenchel.json",
    "hopflax": "hopflax.csv",
    "hopflax_summary": "hopflax.json",
    "summary": "summary.json",
}


@dataclass(frozen=True)
class Tolerances:
    newton: float = 1e-12
    hyp_u: float = 1e-6
    hyp_u2: float = 1e-9
    fd_step: float = 1e-4
    fenchel: float = 1e-8


@dataclass(frozen=True)
class RunConfig:
    problem: str
    params: dict = field(default_factory=dict)
    z_hat: tuple = (1.0, 1.0)
    m: int = 41
    t: float | None = None
    x: tuple | None = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    t_max: float = 100.0
    t_steps: int = 1000
    grid_radius: float = 2.0
    grid_points: int = 9
    p_samples: tuple | None = None
    outputs: dict = field(default_factory=lambda: dict(DEFAULT_OUTPUTS))
    command: str | None = None

    def problem_instance(self):
        return builtin(self.problem, self.params)

    def base(self):
        return make_base(self.problem_instance().cone, self.z_hat, self.m)


_TOP_KEYS = {
    "problem", "params", "z_hat", "m", "t", "x", "tolerances", "t_max",
    "t_steps", "grid", "p_samples", "outputs", "command",
}
_GRID_KEYS = {"radius", "points"}


def _number(v):
    return isinstance(v, (int, float)) and not isinstance(v, bool) and math.isfinite(v)


def _vector(v):
    return isinstance(v, list) and len(v) > 0 and all(_number(a) for a in v)


def parse_config(text, command=None):
    """Parse and validate a JSON run configuration.

    ``command`` (or the ``"command"`` key) decides whether ``t`` and ``x``
    are required; without any command they are.  Raises
    :class:`~svhj.exceptions.ConfigError` listing every problem found.
    """
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from None
    if not isinstance(raw, dict):
        raise ConfigError("config must be a JSON object")

    errors = []
    unknown = sorted(set(raw) - _TOP_KEYS)
    if unknown:
        errors.append(f"unknown keys: {unknown}")

    command = command or raw.get("command")
    if command is not None and command not in COMMANDS:
        errors.append(f"unknown command {command!r}; choose one of {list(COMMANDS)}")

    needs_point = command is None or command in POINT_COMMANDS
    required = ["problem"] + (["t", "x"] if needs_point else [])
    missing = [k for k in required if k not in raw]
    if missing:
        errors.append(f"missing required fields: {missing}")

    kw = {"command": command}
    problem = raw.get("problem")
    params = raw.get("params", {})
    if not isinstance(params, dict):
        errors.append("params must be an object")
        params = {}
    prob = None
    if problem is not None:
        if problem not in BUILTIN_NAMES:
            errors.append(f"unknown problem {problem!r}; choose one of {list(BUILTIN_NAMES)}")
        else:
            try:
                prob = builtin(problem, params)
            except ValueError as exc:
                errors.append(f"bad params for {problem!r}: {exc}")
        kw["problem"] = problem
        kw["params"] = params

    if "m" in raw:
        m = raw["m"]
        if isinstance(m, bool) or not isinstance(m, int) or m < 2:
            errors.append(f"m must be an integer >= 2, got {m!r}")
        else:
            kw["m"] = m

    if "t" in raw:
        t = raw["t"]
        if not _number(t) or t < 0:
            errors.append(f"t must be a finite number >= 0, got {t!r}")
        else:
            kw["t"] = float(t)

    if "x" in raw:
        x = raw["x"]
        if not _vector(x):
            errors.append("x must be a nonempty list of numbers")
        elif prob is not None and len(x) != prob.n:
            errors.append(f"x has length {len(x)} but problem {problem!r} has n={prob.n}")
        else:
            kw["x"] = tuple(float(a) for a in x)

    if "z_hat" in raw:
        z = raw["z_hat"]
        if not _vector(z):
            errors.append("z_hat must be a nonempty list of numbers")
        else:
            kw["z_hat"] = tuple(float(a) for a in z)

    z_ok = "z_hat" not in raw or "z_hat" in kw
    m_ok = "m" not in raw or "m" in kw
    if prob is not None and z_ok and m_ok:
        try:
            make_base(prob.cone, kw.get("z_hat", (1.0, 1.0)), kw.get("m", 41))
        except ValueError as exc:
            errors.append(f"base: {exc}")

    if "tolerances" in raw:
        tol = raw["tolerances"]
        names = set(Tolerances.__dataclass_fields__)
        if not isinstance(tol, dict):
            errors.append("tolerances must be an object")
        else:
            bad = sorted(set(tol) - names)
            if bad:
                errors.append(f"unknown tolerance names: {bad}; allowed: {sorted(names)}")
            nonpos = sorted(k for k, v in tol.items() if k in names and (not _number(v) or v <= 0))
            if nonpos:
                errors.append(f"tolerances must be positive numbers: {nonpos}")
            if not bad and not nonpos:
                kw["tolerances"] = Tolerances(**{k: float(v) for k, v in tol.items()})

    if "t_max" in raw:
        if not _number(raw["t_max"]) or raw["t_max"] <= 0:
            errors.append("t_max must be a positive number")
        else:
            kw["t_max"] = float(raw["t_max"])
    if "t_steps" in raw:
        ts = raw["t_steps"]
        if isinstance(ts, bool) or not isinstance(ts, int) or ts < 1:
            errors.append("t_steps must be a positive integer")
        else:
            kw["t_steps"] = ts

    if "grid" in raw:
        grid = raw["grid"]
        if not isinstance(grid, dict):
            errors.append("grid must be an object")
        else:
            bad = sorted(set(grid) - _GRID_KEYS)
            if bad:
                errors.append(f"unknown grid keys: {bad}")
            if "radius" in grid:
                if not _number(grid["radius"]) or grid["radius"] <= 0:
                    errors.append("grid.radius must be a positive number")
                else:
                    kw["grid_radius"] = float(grid["radius"])
            if "points" in grid:
                pts = grid["points"]
                if isinstance(pts, bool) or not isinstance(pts, int) or pts < 1:
                    errors.append("grid.points must be a positive integer")
                else:
                    kw["grid_points"] = pts

    if "p_samples" in raw:
        ps = raw["p_samples"]
        if not isinstance(ps, list) or not ps or not all(_vector(p) for p in ps):
            errors.append("p_samples must be a nonempty list of vectors")
        elif prob is not None and any(len(p) != prob.n for p in ps):
            errors.append(f"every p sample must have length n={prob.n}")
        else:
            kw["p_samples"] = tuple(tuple(float(a) for a in p) for p in ps)

    if "outputs" in raw:
        outs = raw["outputs"]
        if not isinstance(outs, dict) or not all(isinstance(v, str) and v for v in outs.values()):
            errors.append("outputs must map names to nonempty file names")
        else:
            bad = sorted(set(outs) - set(OUTPUT_KEYS))
            if bad:
                errors.append(f"unknown output names: {bad}; allowed: {list(OUTPUT_KEYS)}")
            else:
                kw["outputs"] = {**DEFAULT_OUTPUTS, **outs}

    if errors:
        raise ConfigError(errors)
    return RunConfig(**kw)


def state_grid(config, n):
    """Tensor grid of ``grid_points`` values per axis on ``[-radius, radius]^n``."""
    axis = np.linspace(-config.grid_radius, config.grid_radius, config.grid_points)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)
