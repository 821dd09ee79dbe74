"""Acceptance criteria, one test per criterion.

Each ``criterion_n`` returns ``(passed, detail)``.  The tests record one
PASS/FAIL line each; the lines are printed in the pytest terminal summary and
by ``python tests/test_acceptance.py``.
"""
import contextlib
import io
import sys
import time
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).resolve().parent))

from cmcgraph import (CurveFunction, PlanarCurve, ProblemConfig, assemble_jacobian, assemble_residual,
                      build_collar, choose_barrier_params, boundary_gradient_bound, continuation_solve,
                      generate_mesh, is_H_cone, newton_solve, perron_sweep, radial_shoot,
                      serrin_limit_solve, solve_dirichlet)
from cmcgraph.cli import main
from cmcgraph.fem import gradient_norms
from cmcgraph.geometry import ConeSpec
from cmcgraph.solver import harmonic_extension

DEMOS = Path(__file__).resolve().parents[1] / "demos" / "configs"
UNIT = PlanarCurve.circle()


def demo_config():
    return ProblemConfig(UNIT, (0.0, 0.0, 2.0), PlanarCurve.circle(radius=0.6), 0.8)


def cap_exact(mesh):
    return np.sqrt(4.0 - np.sum(mesh.vertices ** 2, axis=1)) - np.sqrt(3.0)


def criterion_1():
    """Spherical cap: error at h=0.05 and observed order over three meshes."""
    hs, errs, times = (0.1, 0.05, 0.025), [], []
    for h in hs:
        m = generate_mesh(UNIT, h)
        t0 = time.perf_counter()
        v = solve_dirichlet(m, 1.0, 0.0)
        times.append(time.perf_counter() - t0)
        errs.append(float(np.max(np.abs(v - cap_exact(m)))))
    orders = [float(np.log2(a / b)) for a, b in zip(errs, errs[1:])]
    ok = errs[1] <= 2e-3 and all(1.7 <= p <= 2.3 for p in orders) and max(times) <= 60.0
    return ok, (f"errors {errs[0]:.2e}/{errs[1]:.2e}/{errs[2]:.2e}, orders "
                f"{orders[0]:.2f}/{orders[1]:.2f}, slowest solve {max(times):.2f}s")


def criterion_2():
    """Radial shooting vs FEM on annulus [0.5, 1] and the unit disk, H in {0.5, 1}."""
    disk = generate_mesh(UNIT, 0.025)
    ann = generate_mesh(UNIT, 0.025, holes=[PlanarCurve.circle(radius=0.5)])
    worst, parts = 0.0, []
    for H in (0.5, 1.0):
        for name, m, kw in (("disk", disk, {}), ("annulus", ann, {"r_in": 0.5, "u_in": 0.0})):
            prof = radial_shoot(2, H, 1.0, 0.0, **kw)
            v = solve_dirichlet(m, H, 0.0)
            err = float(np.max(np.abs(v - prof(np.linalg.norm(m.vertices, axis=1)))))
            worst = max(worst, err)
            parts.append(f"{name} H={H:g}: {err:.1e}")
    return worst <= 5e-3, "sup differences " + ", ".join(parts)


def criterion_3():
    """Demo pipeline: continuation, nodewise bounds, barrier with the closed-form floor."""
    cfg = demo_config()
    mesh = generate_mesh(cfg.L, 0.05)
    state = continuation_solve(cfg, mesh)
    v, psi = state.v, state.supersolution.psi
    bounds = bool(np.min(v) >= 0 and np.all(v <= psi) and np.max(psi) <= 2.0)
    # boundary data is the constant 0.8; the barrier works with phi - 0.8 = 0
    shift = float(cfg.boundary_function().values[0])
    chart = build_collar(cfg.L, CurveFunction.constant(0.0))
    params, rep = choose_barrier_params(chart, cfg.vertex_height, cfg.H)
    floor = (np.e ** 2 - 1.0) / params.epsilon1
    floor_ok = params.delta == -1.0 and params.beta >= floor * (1 - 1e-12)
    grad = boundary_gradient_bound(mesh, v - shift, chart, params, psi - shift)
    ok = state.t == 1.0 and bounds and rep.passed and floor_ok and grad.ok
    return ok, (f"t={state.t:g}, v in [{np.min(v):.3f}, {np.max(v):.3f}], max psi {np.max(psi):.3f}; "
                f"delta={params.delta:g}, beta={params.beta:.4g} >= {floor:.4g}, "
                f"barrier min {rep.min_scaled:.3g}, w<=v margin {grad.w_margin:.2e}")


def criterion_4():
    """Vertex-at-infinity limit at N=6, h=0.05 compared with a direct solve."""
    mesh = generate_mesh(UNIT, 0.05)
    res = serrin_limit_solve(UNIT, 0.0, 1.0, N=6, mesh=mesh)
    direct = solve_dirichlet(mesh, 1.0, 0.0)
    d = float(np.max(np.abs(res.final - direct)))
    dx = float(np.max(np.abs(res.extrapolated - direct)))
    ok = res.height_ok and d <= 1e-2
    return ok, (f"max|u_k| {max(res.max_abs):.3f} <= 4; sup|u_6 - u_direct| = {d:.4f} (limit 1e-2); "
                f"analytic caps for H=6/7 and H=1 differ by {_cap_gap():.4f} at the centre; "
                f"extrapolated field (reported only) {dx:.1e}")


def _cap_gap():
    """Height difference at the centre between the unit-disk caps for H=1 and H=6/7."""
    def top(H):
        R = 2.0 / H
        return R - np.sqrt(R * R - 1.0)

    return float(top(1.0) - top(6.0 / 7.0))


def criterion_5():
    """Independent initial fields give the same solution on the cap and demo configs."""
    disk = generate_mesh(UNIT, 0.05)
    a = newton_solve(disk, np.zeros(disk.n_vertices), 1.0, 0.0)
    x = disk.vertices
    start = 0.5 * (1.0 - np.sum(x * x, axis=1)) + 0.05 * np.sin(3 * x[:, 0]) * (1 - np.sum(x * x, axis=1))
    b = newton_solve(disk, start, 1.0, 0.0)
    d_cap = float(np.max(np.abs(a.v - b.v))) if a.converged and b.converged else np.inf

    cfg = demo_config()
    mesh = generate_mesh(cfg.L, 0.05)
    state = continuation_solve(cfg, mesh)
    other = newton_solve(mesh, harmonic_extension(mesh, state.boundary_values), cfg.H, state.boundary_values)
    d_demo = float(np.max(np.abs(other.v - state.v))) if other.converged else np.inf
    return max(d_cap, d_demo) <= 1e-8, f"cap {d_cap:.1e}, demo (continuation vs Newton from harmonic) {d_demo:.1e}"


def criterion_6():
    """Central differences of the residual vs the Jacobian on 24 random fields."""
    rng = np.random.default_rng(6)
    mesh = generate_mesh(PlanarCurve.ellipse(radii=(1.0, 0.8), angle=0.2), 0.08)
    X, I = mesh.vertices, mesh.interior
    worst = 0.0
    for _ in range(24):
        k = rng.normal(size=(4, 2)) * 3
        v = sum(rng.normal() * np.sin(X @ k[i] + rng.uniform(0, 6.3)) for i in range(4))
        v *= rng.uniform(0.2, 2.0) / np.max(gradient_norms(mesh, v))
        d = rng.normal(size=len(I))
        H = rng.uniform(0.0, 2.0)
        eps = 1e-7
        vp, vm = v.copy(), v.copy()
        vp[I] += eps * d
        vm[I] -= eps * d
        fd = (assemble_residual(mesh, vp, H) - assemble_residual(mesh, vm, H)) / (2 * eps)
        Jd = assemble_jacobian(mesh, v) @ d
        worst = max(worst, float(np.linalg.norm(fd - Jd) / np.linalg.norm(Jd)))
    return worst <= 1e-6, f"max relative error {worst:.1e} over 24 fields with |grad v| <= 2"


def criterion_7():
    """Perron sandwich on the demo config for k = 1, 2, 4, 8."""
    sw = perron_sweep(demo_config(), (1, 2, 4, 8), mesh=generate_mesh(PlanarCurve.circle(radius=0.6), 0.05))
    r = sw.reports
    sand = min(min(x.chi_le_v, x.v_le_psi) for x in r)
    psi_r = max(x.psi_residual_max for x in r)
    chi_r = min(x.chi_residual_min for x in r)
    ok = sw.ok and sw.traces_decreasing
    return ok, (f"trace errors {', '.join(f'{e:.3g}' for e in sw.trace_errors)}; min sandwich margin "
                f"{sand:.2e}; max psi residual {psi_r:.1e}, min chi residual {chi_r:.1e}")


def criterion_8():
    """H = 2.5 on the unit disk: the solver exits with code 2."""
    sink = io.StringIO()
    with contextlib.redirect_stdout(sink), contextlib.redirect_stderr(sink):
        code = main(["solve", str(DEMOS / "supercritical_disk.json"), "--h", "0.05", "--force"])
        gated = main(["check", str(DEMOS / "supercritical_disk.json")])
    return code == 2, f"solve --force exit {code}; hypothesis check exit {gated}"


def criterion_9():
    """is_H_cone on r=1 circular cones against h / sqrt(1 + h^2)."""
    errs = []
    for h in (0.5, 1.0, 2.0, 10.0, np.inf):
        cone = ConeSpec(UNIT, None if np.isinf(h) else (0.0, 0.0, h))
        exact = 1.0 if np.isinf(h) else h / np.sqrt(1 + h * h)
        errs.append(abs(is_H_cone(cone, exact).min_curvature - exact))
    return max(errs) <= 1e-6, "errors " + ", ".join(f"{e:.1e}" for e in errs)


CRITERIA = [criterion_1, criterion_2, criterion_3, criterion_4, criterion_5,
            criterion_6, criterion_7, criterion_8, criterion_9]


def _line(n, ok, detail):
    return f"CRITERION {n}: {'PASS' if ok else 'FAIL'} - {detail}"


@pytest.mark.parametrize("n", range(1, 10))
def test_criterion(n, capsys):
    import conftest
    ok, detail = CRITERIA[n - 1]()
    capsys.readouterr()
    line = _line(n, ok, detail)
    conftest.ACCEPTANCE_LINES.append(line)
    print(line)
    assert ok, line


if __name__ == "__main__":
    lines = []
    for n, fn in enumerate(CRITERIA, 1):
        ok, detail = fn()
        lines.append(_line(n, ok, detail))
        print(lines[-1], flush=True)
    sys.exit(0 if all(": PASS" in l for l in lines) else 1)
