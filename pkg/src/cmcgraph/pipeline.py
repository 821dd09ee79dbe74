"""End-to-end runs behind the command line subcommands.

Every ``run_*`` function returns ``(exit_code, report)`` and writes artifacts
to ``out`` when given.  Exit codes: 0 all checks passed, 1 some check failed,
2 solver nonconvergence, 3 invalid input.
"""
from __future__ import annotations

import csv
import time
from pathlib import Path

import numpy as np

from . import __version__
from .barriers import boundary_gradient_bound, build_collar, choose_barrier_params
from .errors import ConfigError, ConvergenceError, GeometryError, HypothesisError, MeshError, PreconditionError, SandwichViolation
from .geometry import check_hypotheses
from .io import config_hash, config_to_dict, export_solution, save_solution, write_json
from .mesh import generate_mesh
from .perron import perron_sweep
from .solver import continuation_solve, serrin_limit_solve, solve_dirichlet
from .validation import radial_shoot, run_invariant_suite, spherical_cap

EXIT_OK, EXIT_CHECKS, EXIT_NONCONVERGENCE, EXIT_INPUT = 0, 1, 2, 3
STATUS = {EXIT_OK: "ok", EXIT_CHECKS: "checks-failed",
          EXIT_NONCONVERGENCE: "nonconvergence", EXIT_INPUT: "invalid-input"}
SERRIN_TOL = 1e-2


class _Timer:
    def __init__(self):
        self.times = {}

    def __call__(self, name):
        timer = self

        class _Ctx:
            def __enter__(self):
                self.t0 = time.perf_counter()

            def __exit__(self, *exc):
                timer.times[name] = time.perf_counter() - self.t0

        return _Ctx()


def _base_report(command, config, extras, keys):
    rep = {"command": command, "version": __version__, "config_hash": config_hash(config, extras),
           "config": config_to_dict(config, extras), "seed": extras.get("seed"),
           "status": None, "exit_code": None, "messages": [], "timings": {}}
    rep.update({k: None for k in keys})
    return rep


def _finish(rep, code, timer, out):
    rep["exit_code"] = code
    rep["status"] = STATUS[code]
    rep["timings"] = timer.times
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        write_json(Path(out) / "report.json", rep)
    return code, rep


def _mesh(config, h):
    return generate_mesh(config.L, h if h is not None else config.mesh_h)


def run_check(config, extras, out=None):
    timer = _Timer()
    rep = _base_report("check", config, extras, ["hypotheses"])
    with timer("hypotheses"):
        hyp = check_hypotheses(config)
    rep["hypotheses"] = hyp.to_dict()
    rep["messages"] += hyp.messages
    return _finish(rep, EXIT_OK if hyp.all_ok else EXIT_CHECKS, timer, out)


SOLVE_KEYS = ["hypotheses", "mesh", "supersolution", "continuation", "barrier",
              "gradient_bound", "invariants"]


def run_solve(config, extras, h=None, out=None, force=False):
    """Hypotheses, supersolution, continuation, barrier and invariant suite."""
    timer = _Timer()
    rep = _base_report("solve", config, extras, SOLVE_KEYS)
    hyp = check_hypotheses(config)
    rep["hypotheses"] = hyp.to_dict()
    if not hyp.all_ok and not force:
        rep["messages"].append("hypotheses not satisfied; use --force to run the solver anyway")
        rep["invariants"] = run_invariant_suite(None).to_dict()
        return _finish(rep, EXIT_CHECKS, timer, out)
    with timer("mesh"):
        mesh = _mesh(config, h)
    rep["mesh"] = {"n_vertices": mesh.n_vertices, "n_triangles": len(mesh.triangles),
                   "h": mesh.h, "min_angle": mesh.min_angle}
    try:
        with timer("continuation"):
            state = continuation_solve(config, mesh, force=True)
    except ConvergenceError as exc:
        rep["messages"].append(str(exc))
        if exc.state is not None:
            rep["continuation"] = exc.state.to_dict()
        rep["invariants"] = run_invariant_suite(None).to_dict()
        return _finish(rep, EXIT_NONCONVERGENCE, timer, out)
    except SandwichViolation as exc:
        rep["messages"].append(str(exc))
        return _finish(rep, EXIT_CHECKS, timer, out)
    v = state.v
    rep["continuation"] = state.to_dict()
    psi = None
    ok = hyp.all_ok
    if state.supersolution is not None:
        psi = state.supersolution.psi
        rep["supersolution"] = state.supersolution.to_dict()
        phi = config.boundary_function()
        shift = float(phi.values[0]) if phi.is_constant else 0.0
        try:
            with timer("barrier"):
                chart = build_collar(config.L, phi.shifted(-shift), grid=config.tolerances.barrier_grid)
                params, brep = choose_barrier_params(chart, config.vertex_height, config.H)
                grad = boundary_gradient_bound(mesh, v - shift, chart, params, psi - shift)
            rep["barrier"] = dict(brep.to_dict(), epsilon=chart.epsilon, B_max=chart.B_max,
                                  phi_c2=chart.phi_c2, data_shift=shift)
            rep["gradient_bound"] = grad.to_dict()
            ok = ok and brep.passed and grad.ok
        except (PreconditionError, GeometryError) as exc:
            rep["messages"].append(f"barrier: {exc}")
            ok = False
    else:
        rep["messages"].append("vertex at infinity: no cone barrier constructed")
    with timer("invariants"):
        suite = run_invariant_suite(v, mesh, config.H, psi, state.boundary_values,
                                    rtol=config.tolerances.newton_rtol)
    rep["invariants"] = suite.to_dict()
    ok = ok and suite.all_passed
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        (Path(out) / "solution.obj").write_bytes(export_solution(mesh, v, "obj"))
        fields = {"v": v} if psi is None else {"v": v, "psi": psi}
        save_solution(Path(out) / "solution.npz", mesh, fields)
    return _finish(rep, EXIT_OK if ok else EXIT_CHECKS, timer, out)


def run_serrin(config, extras, h=None, out=None, force=False):
    """Vertex-at-infinity sequence compared with a direct solve."""
    timer = _Timer()
    rep = _base_report("serrin", config, extras, ["serrin", "direct", "comparison"])
    block = extras.get("serrin", {})
    N = block.get("N", 6)
    if isinstance(N, bool) or not isinstance(N, int) or N < 1:
        raise ConfigError("expected a positive integer", "serrin.N")
    phi = config.boundary_function()
    with timer("mesh"):
        mesh = _mesh(config, h)
    try:
        with timer("sequence"):
            res = serrin_limit_solve(config.L, phi, config.H, N=N, mesh=mesh, force=force,
                                     tolerances=config.tolerances)
        bv = res.fields[-1][mesh.boundary_vertices]
        with timer("direct"):
            direct = solve_dirichlet(mesh, config.H, bv, rtol=config.tolerances.newton_rtol)
    except HypothesisError as exc:
        rep["messages"].append(str(exc))
        return _finish(rep, EXIT_CHECKS, timer, out)
    except ConvergenceError as exc:
        rep["messages"].append(str(exc))
        return _finish(rep, EXIT_NONCONVERGENCE, timer, out)
    rep["serrin"] = res.to_dict()
    rep["serrin"]["warnings"] = res.warnings
    rep["direct"] = {"max": float(np.max(direct)), "min": float(np.min(direct))}
    d_final = float(np.max(np.abs(res.final - direct)))
    d_extra = float(np.max(np.abs(res.extrapolated - direct)))
    rep["comparison"] = {"final_vs_direct": d_final, "extrapolated_vs_direct": d_extra,
                         "tolerance": SERRIN_TOL, "final_ok": d_final <= SERRIN_TOL}
    ok = res.height_ok and d_final <= SERRIN_TOL
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        save_solution(Path(out) / "solution.npz", mesh,
                      {"v": res.final, "direct": direct, "extrapolated": res.extrapolated})
        (Path(out) / "solution.obj").write_bytes(export_solution(mesh, res.final, "obj"))
    return _finish(rep, EXIT_OK if ok else EXIT_CHECKS, timer, out)


def run_perron(config, extras, h=None, out=None, force=False):
    """Scaled-cone sweep with sandwich verification for every ``k``."""
    timer = _Timer()
    rep = _base_report("perron", config, extras, ["perron"])
    block = extras.get("perron", {})
    ks = block.get("ks", [1, 2, 4, 8])
    if not isinstance(ks, list) or not ks or not all(isinstance(k, int) and k >= 1 for k in ks):
        raise ConfigError("expected a list of positive integers", "perron.ks")
    mode = block.get("mode", "dilation")
    if mode not in ("dilation", "literal"):
        raise ConfigError("expected 'dilation' or 'literal'", "perron.mode")
    if config.vertex is None:
        raise ConfigError("the Perron sweep needs a finite vertex", "vertex")
    try:
        with timer("sweep"):
            mesh = generate_mesh(config.L.transformed(0.0, -config.gamma.centroid),
                                 h if h is not None else config.mesh_h)
            sweep = perron_sweep(config, ks, mesh=mesh, mode=mode, force=force)
    except HypothesisError as exc:
        rep["messages"].append(str(exc))
        return _finish(rep, EXIT_CHECKS, timer, out)
    except ConvergenceError as exc:
        rep["messages"].append(str(exc))
        return _finish(rep, EXIT_NONCONVERGENCE, timer, out)
    rep["perron"] = sweep.to_dict()
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        rows = sweep.rows()
        with open(Path(out) / "perron.csv", "w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(rows[0]))
            w.writeheader()
            w.writerows(rows)
    return _finish(rep, EXIT_OK if sweep.ok else EXIT_CHECKS, timer, out)


def parse_oracle(doc):
    if not isinstance(doc, dict):
        raise ConfigError("oracle configuration must be a JSON object", "$")
    block = doc.get("oracle", doc)
    out = {}
    for key, default, kind in (("n", 2, int), ("H", None, float), ("r_out", 1.0, float),
                               ("u_out", 0.0, float), ("r_in", 0.0, float), ("u_in", 0.0, float),
                               ("n_points", 401, int)):
        val = block.get(key, default)
        if val is None:
            raise ConfigError("missing value", f"oracle.{key}")
        if isinstance(val, bool) or not isinstance(val, (int, float)) or not np.isfinite(val):
            raise ConfigError("expected a finite number", f"oracle.{key}")
        if kind is int and val != int(val):
            raise ConfigError("expected an integer", f"oracle.{key}")
        out[key] = kind(val)
    if out["n"] < 2 or out["n_points"] < 2:
        raise ConfigError("n and n_points must be at least 2", "oracle")
    if not (out["H"] > 0 and out["r_out"] > out["r_in"] >= 0):
        raise ConfigError("need H > 0 and 0 <= r_in < r_out", "oracle")
    return out


def run_oracle(doc, out=None):
    """Radial shooting profile (and the cap table on a disk)."""
    timer = _Timer()
    p = parse_oracle(doc)
    rep = {"command": "oracle", "version": __version__, "config": p, "status": None,
           "exit_code": None, "messages": [], "timings": {}, "profile": None, "cap": None}
    try:
        with timer("shoot"):
            prof = radial_shoot(p["n"], p["H"], p["r_out"], p["u_out"], p["r_in"],
                                p["u_in"] if p["r_in"] > 0 else None, p["n_points"])
    except ConvergenceError as exc:
        rep["messages"].append(str(exc))
        return _finish(rep, EXIT_NONCONVERGENCE, timer, out)
    rep["profile"] = {"c": prof.c, "first_integral_residual": prof.first_integral_residual,
                      "boundary_mismatch": prof.boundary_mismatch, "graph_margin": prof.graph_margin,
                      "u_min": float(np.min(prof.u)), "u_max": float(np.max(prof.u))}
    ok = prof.first_integral_residual <= 1e-9 and prof.boundary_mismatch <= 1e-9
    if p["r_in"] == 0:
        R = p["n"] / p["H"]
        cap = spherical_cap(R, prof.r, p["n"]).value
        cap = cap - cap[-1] + p["u_out"]
        rep["cap"] = {"R": R, "max_error": float(np.max(np.abs(cap - prof.u)))}
    if out is not None:
        Path(out).mkdir(parents=True, exist_ok=True)
        prof.to_csv(Path(out) / "profile.csv")
    return _finish(rep, EXIT_OK if ok else EXIT_CHECKS, timer, out)
