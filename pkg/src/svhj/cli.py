"""Command line interface: ``svhj <command> --config <path> [--out <dir>]``.

Every command writes CSV/JSON artifacts into the output directory.  Exit
codes: 0 success, 2 configuration error, 3 horizon exceeded, 4 a check
failed, 5 I/O error, 6 numerical failure.  Failures also print a JSON
object on stderr.
"""

from __future__ import annotations

import argparse
import dataclasses
import json
import sys
from pathlib import Path

import numpy as np

from . import assembler, characteristics, fenchel, hopflax
from .config import COMMANDS, RunConfig, parse_config, state_grid
from .exceptions import (
    ConfigError,
    ConvergenceError,
    HorizonExceededError,
    SingularHessianError,
)
from .export import export_csv, export_json
from .problems import as_lagrangian

__all__ = ["run", "main", "EXIT_CODES"]

EXIT_CODES = {
    "ok": 0,
    "config": 2,
    "horizon": 3,
    "check_failed": 4,
    "io": 5,
    "numerical": 6,
}

# Worked-example presets: problem, evaluation point and expected verdict.
EXAMPLES = {
    "ex1": {"problem": "ex1", "t": 1.0, "x": (1.0, 2.0), "expect": "holds"},
    "ex2": {"problem": "ex2", "t": 1.0, "x": (1.0, 0.0), "expect": "fails"},
}


class CheckFailed(Exception):
    """A requested verification did not pass; artifacts are still written."""


def _zeta_header(d):
    return [f"zeta_{i + 1}" for i in range(d)]


def _hamiltonian_problem(prob):
    return fenchel.legendre_dual(prob) if prob.kind == "lagrangian" else prob


def _horizon_guard(cfg, prob, base):
    """Refuse a Hamiltonian point evaluation at or past the sampled ``T*``.

    The flow map can stay locally invertible after characteristics have
    crossed (``(1 - t) x`` at ``t = 2``), so Newton alone does not notice.
    """
    if prob.kind != "hamiltonian" or not cfg.t > 0:
        return
    grid = np.vstack([state_grid(cfg, prob.n), np.array(cfg.x)[None]])
    for zeta in base.directions:
        report = characteristics.tstar_estimate(prob.scalarize(zeta), grid, cfg.t, 100)
        if report.t_star <= cfg.t:
            raise HorizonExceededError(
                f"t={cfg.t} is past the existence horizon T*={report.t_star:.17g} "
                f"(witness x={report.witness_x.tolist()})",
                direction=zeta,
            )


def _offsets(prob, base, t, x):
    if prob.kind == "lagrangian":
        return hopflax.hopflax_value(prob, base, t, x)
    return assembler.assemble_U(prob, base, t, x)


def _curve_rows(prob, base, t, x):
    rows = []
    for zeta in base.directions:
        if prob.kind == "lagrangian":
            gamma = hopflax.value_point(prob, zeta, t, x)
        else:
            gamma = assembler.solution_point(prob, zeta, t, x)
        rows.append((zeta[0], *gamma))
    return rows


def cmd_curve(cfg, out):
    prob, base = cfg.problem_instance(), cfg.base()
    _horizon_guard(cfg, prob, base)
    rows = _curve_rows(prob, base, cfg.t, np.array(cfg.x))
    header = ["zeta_1"] + [f"gamma_{i + 1}" for i in range(prob.d)]
    export_csv(rows, out / cfg.outputs["curve"], header)
    return {"rows": len(rows)}


def cmd_halfspaces(cfg, out):
    prob, base = cfg.problem_instance(), cfg.base()
    _horizon_guard(cfg, prob, base)
    U = _offsets(prob, base, cfg.t, np.array(cfg.x))
    export_csv(
        [(z[0], c) for z, c in zip(base.directions, U.offsets)],
        out / cfg.outputs["halfspaces"],
        ["zeta_1", "offset"],
    )
    if base.dim == 2:
        export_csv(U.boundary_polyline(), out / cfg.outputs["boundary"], ["z_1", "z_2"])
    return {"offsets": U.offsets}


def _hypu_report(cfg, prob, base):
    U = _offsets(prob, base, cfg.t, np.array(cfg.x))
    report = assembler.check_hyp_u(U, cfg.tolerances.hyp_u)
    payload = {"problem": cfg.problem, "t": cfg.t, "x": list(cfg.x), "m": base.m}
    payload.update(report.to_dict())
    payload["worst_zeta_1"] = float(report.directions[report.worst][0])
    if prob.kind == "hamiltonian" and prob.inf_extension:
        payload["pairwise"] = assembler.check_hyp_u2(
            prob, base, cfg.t, np.array(cfg.x), cfg.tolerances.hyp_u2
        ).to_dict()
    return report, payload


def cmd_check_hypu(cfg, out):
    prob, base = cfg.problem_instance(), cfg.base()
    _horizon_guard(cfg, prob, base)
    report, payload = _hypu_report(cfg, prob, base)
    export_json(payload, out / cfg.outputs["hypu"])
    if not report.holds:
        raise CheckFailed(
            f"hypothesis fails at zeta={report.directions[report.worst].tolist()} "
            f"with gap {report.gap[report.worst]:.17g}"
        )
    return payload


def _tstar_payload(cfg, prob, base):
    hprob = _hamiltonian_problem(prob)
    grid = state_grid(cfg, prob.n)
    reports = [
        characteristics.tstar_estimate(hprob.scalarize(z), grid, cfg.t_max, cfg.t_steps)
        for z in base.directions
    ]
    m0, m1, m2 = characteristics.horizon_constants(hprob, base, grid, grid)
    bound = characteristics.horizon_bound(hprob, base, grid, grid)
    t_star = min(r.t_star for r in reports)
    return {
        "problem": cfg.problem,
        "t_star": t_star,
        "t_max": cfg.t_max,
        "t_steps": cfg.t_steps,
        "grid": {"radius": cfg.grid_radius, "points_per_axis": cfg.grid_points, "size": len(grid)},
        "horizon_bound": bound,
        "M0": m0,
        "M1": m1,
        "M2": m2,
        "directions": [r.to_dict() for r in reports],
    }


def cmd_tstar(cfg, out):
    payload = _tstar_payload(cfg, cfg.problem_instance(), cfg.base())
    export_json(payload, out / cfg.outputs["tstar"])
    return payload


def _default_p_samples(n):
    axis = np.linspace(-2.0, 2.0, 4)
    mesh = np.meshgrid(*([axis] * n), indexing="ij")
    return np.stack([g.ravel() for g in mesh], axis=1)


def cmd_fenchel_check(cfg, out):
    prob = cfg.problem_instance()
    lag = prob if prob.kind == "lagrangian" else as_lagrangian(prob)
    base = cfg.base()
    ps = np.array(cfg.p_samples) if cfg.p_samples else _default_p_samples(prob.n)
    tol = cfg.tolerances.fenchel
    rows, worst = [], 0.0
    for zeta in base.directions:
        sp = lag.scalarize(zeta)
        rep = fenchel.check_conjugate_identities(sp, ps, tol)
        worst = max(worst, rep.max_residual)
        for p, r1, r2, r3 in zip(ps, rep.r1, rep.r2, rep.r3):
            value = fenchel.conjugate_scalar(sp, p).value
            rows.append((zeta[0], *p, value, r1, r2, r3))
    header = ["zeta_1"] + [f"p_{i + 1}" for i in range(prob.n)] + ["conjugate", "r1", "r2", "r3"]
    export_csv(rows, out / cfg.outputs["fenchel"], header)
    summary = {"problem": cfg.problem, "max_residual": worst, "tol": tol, "ok": worst <= tol}
    export_json(summary, out / cfg.outputs["fenchel_summary"])
    if worst > tol:
        raise CheckFailed(f"conjugate identity residual {worst:.3e} exceeds {tol:.3e}")
    return summary


def cmd_hopflax(cfg, out):
    prob = cfg.problem_instance()
    if prob.kind != "lagrangian":
        raise ConfigError(f"hopflax needs a Lagrangian-given problem, {cfg.problem!r} is not")
    base = cfg.base()
    x = np.array(cfg.x)
    sol = hopflax.scalarization_solution(prob, base, cfg.t, x)
    rows = [
        (z[0], *w, v, sol.value.support(z))
        for z, w, _, v in sol.records()
    ]
    header = ["zeta_1"] + [f"w_{i + 1}" for i in range(prob.n)] + ["value", "support"]
    export_csv(rows, out / cfg.outputs["hopflax"], header)
    costs = hopflax.anchor_costs(prob, base, cfg.t, x)
    restricted = float(np.max(np.abs(costs.min(axis=1) - np.diag(costs))))
    link = max(
        hopflax.verify_characteristic_link(prob, z, cfg.t, x, np.linspace(0.0, cfg.t, 5))
        for z in base.directions
    )
    summary = {
        "problem": cfg.problem,
        "t": cfg.t,
        "x": list(cfg.x),
        "restricted_infimum_gap": restricted,
        "characteristic_link_deviation": link,
    }
    export_json(summary, out / cfg.outputs["hopflax_summary"])
    return summary


def cmd_example(cfg, out):
    preset = EXAMPLES[cfg.problem]
    prob, base = cfg.problem_instance(), cfg.base()
    cmd_curve(cfg, out)
    cmd_halfspaces(cfg, out)
    report, payload = _hypu_report(cfg, prob, base)
    export_json(payload, out / cfg.outputs["hypu"])
    tstar = _tstar_payload(cfg, prob, base)
    export_json(tstar, out / cfg.outputs["tstar"])
    reproduced = report.verdict == preset["expect"]
    summary = {
        "example": cfg.problem,
        "t": cfg.t,
        "x": list(cfg.x),
        "m": base.m,
        "verdict": report.verdict,
        "expected_verdict": preset["expect"],
        "reproduced": reproduced,
        "worst_zeta_1": float(report.directions[report.worst][0]),
        "worst_gap": float(report.gap[report.worst]),
        "t_star": tstar["t_star"],
    }
    export_json(summary, out / cfg.outputs["summary"])
    if not reproduced:
        raise CheckFailed(f"{cfg.problem}: verdict {report.verdict!r}, expected {preset['expect']!r}")
    return summary


HANDLERS = {
    "curve": cmd_curve,
    "halfspaces": cmd_halfspaces,
    "check-hypu": cmd_check_hypu,
    "tstar": cmd_tstar,
    "fenchel-check": cmd_fenchel_check,
    "hopflax": cmd_hopflax,
    "example": cmd_example,
}


def example_config(name, overrides=None):
    """Run configuration of a worked-example preset."""
    if name not in EXAMPLES:
        raise ConfigError(f"unknown example {name!r}; choose one of {sorted(EXAMPLES)}")
    preset = EXAMPLES[name]
    cfg = RunConfig(problem=preset["problem"], t=preset["t"], x=preset["x"], command="example")
    if overrides is not None:
        cfg = dataclasses.replace(
            cfg,
            m=overrides.m,
            z_hat=overrides.z_hat,
            tolerances=overrides.tolerances,
            t_max=overrides.t_max,
            t_steps=overrides.t_steps,
            grid_radius=overrides.grid_radius,
            grid_points=overrides.grid_points,
            outputs=overrides.outputs,
        )
    return cfg


def _fail(kind, message, **extra):
    code = EXIT_CODES[kind]
    payload = {"error": kind, "exit_code": code, "message": message, **extra}
    sys.stderr.write(json.dumps(payload, sort_keys=True) + "\n")
    return code


def run(config, out_dir="."):
    """Execute ``config.command``; returns the process exit code."""
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        return _fail("io", f"cannot create output directory {out}: {exc.strerror}")
    try:
        HANDLERS[config.command](config, out)
    except ConfigError as exc:
        return _fail("config", str(exc), problems=exc.problems)
    except HorizonExceededError as exc:
        direction = None if exc.direction is None else np.asarray(exc.direction).tolist()
        return _fail("horizon", str(exc), direction=direction)
    except CheckFailed as exc:
        return _fail("check_failed", str(exc))
    except OSError as exc:
        return _fail("io", str(exc), path=exc.filename)
    except (ConvergenceError, SingularHessianError, np.linalg.LinAlgError) as exc:
        return _fail("numerical", str(exc))
    return EXIT_CODES["ok"]


def build_parser():
    parser = argparse.ArgumentParser(
        prog="svhj",
        description="Set-valued Hamilton-Jacobi equations by the method of characteristics.",
    )
    parser.add_argument("command", choices=COMMANDS)
    parser.add_argument("name", nargs="?", help="example name (ex1 or ex2) for 'example'")
    parser.add_argument("--name", dest="name_opt", help="example name (ex1 or ex2)")
    parser.add_argument("--config", type=Path, help="JSON run configuration")
    parser.add_argument("--out", type=Path, default=Path("."), help="output directory")
    return parser


def _read_config(path, command):
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise OSError(exc.errno, f"cannot read config {path}: {exc.strerror}", str(path)) from exc
    return parse_config(text, command=command)


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        if args.command == "example":
            name = args.name_opt or args.name
            if name is None:
                raise ConfigError("example needs a name: ex1 or ex2")
            overrides = None
            if args.config is not None:
                text = args.config.read_text(encoding="utf-8")
                raw = json.loads(text)
                raw.setdefault("problem", EXAMPLES.get(name, {}).get("problem", name))
                overrides = parse_config(json.dumps(raw), command="example")
            cfg = example_config(name, overrides)
        else:
            if args.config is None:
                raise ConfigError(f"{args.command} needs --config")
            cfg = _read_config(args.config, args.command)
    except ConfigError as exc:
        return _fail("config", str(exc), problems=exc.problems)
    except json.JSONDecodeError as exc:
        return _fail("config", f"config is not valid JSON: {exc}")
    except OSError as exc:
        return _fail("io", str(exc), path=exc.filename)
    return run(cfg, args.out)


if __name__ == "__main__":
    sys.exit(main())
