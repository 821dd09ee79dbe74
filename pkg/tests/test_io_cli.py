import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from cmcgraph import ConfigError
from cmcgraph.cli import main
from cmcgraph.io import (config_hash, export_solution, load_solution, parse_config, read_csv,
                         save_solution)
from cmcgraph.mesh import single_triangle_mesh
from cmcgraph.solver import solve_dirichlet

DEMOS = Path(__file__).resolve().parents[1] / "demos" / "configs"


def run(argv, capsys):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    report = json.loads(out.out) if out.out.strip() else None
    return code, report, out.err


def test_obj_single_triangle():
    text = export_solution(single_triangle_mesh(), [0.0, 0.0, 1.0], "obj").decode()
    lines = text.splitlines()
    assert sum(l.startswith("v ") for l in lines) == 3
    assert [l for l in lines if l.startswith("f")] == ["f 1 2 3"]


def test_vtk_has_height():
    text = export_solution(single_triangle_mesh(), [0.0, 0.0, 1.0], "vtk").decode()
    assert "SCALARS height double 1" in text and "CELL_TYPES 1" in text


def test_export_errors():
    with pytest.raises(ValueError):
        export_solution(single_triangle_mesh(), [0.0, 1.0], "obj")
    with pytest.raises(ValueError):
        export_solution(single_triangle_mesh(), [0.0, 0.0, 1.0], "ply")


def test_csv_round_trip(disk_mesh, rng):
    f = rng.normal(size=disk_mesh.n_vertices) * 10 ** rng.uniform(-8, 8, disk_mesh.n_vertices)
    pts, vals = read_csv(export_solution(disk_mesh, f, "csv"))
    assert np.array_equal(vals, f) and np.array_equal(pts, disk_mesh.vertices)


def test_cap_export_max(disk_mesh):
    v = solve_dirichlet(disk_mesh, 1.0, 0.0)
    zs = [float(l.split()[3]) for l in export_solution(disk_mesh, v, "obj").decode().splitlines()
          if l.startswith("v ")]
    assert max(zs) == np.max(v)


def test_export_bit_exact(disk_mesh):
    v = np.sin(disk_mesh.vertices[:, 0])
    assert export_solution(disk_mesh, v, "vtk") == export_solution(disk_mesh, v.copy(), "vtk")


def test_npz_round_trip(tmp_path, disk_mesh):
    v = disk_mesh.vertices[:, 1] ** 2
    save_solution(tmp_path / "s.npz", disk_mesh, {"v": v})
    mesh, fields = load_solution(tmp_path / "s.npz")
    assert np.array_equal(mesh.triangles, disk_mesh.triangles) and np.array_equal(fields["v"], v)


def test_config_hash_stable():
    doc = json.loads((DEMOS / "cone_demo.json").read_text())
    a = config_hash(*parse_config(doc))
    b = config_hash(*parse_config(json.loads(json.dumps(doc))))
    assert a == b
    doc["H"] = 0.79
    assert config_hash(*parse_config(doc)) != a


@pytest.mark.parametrize("doc,path", [
    ({"L": {"kind": "analytic-circle", "params": {"radius": 1}}}, "H"),
    ({"L": {"kind": "torus"}, "H": 1}, "L.kind"),
    ({"L": {"kind": "analytic-circle", "params": {"radius": -1}}, "H": 1}, "L.params.radius"),
    ({"L": {"kind": "analytic-circle", "params": {"radius": 1}}, "H": "big"}, "H"),
    ({"L": {"kind": "analytic-circle", "params": {"radius": 1}}, "H": 1, "vertex": [0, 0]}, "vertex"),
    ({"L": {"kind": "analytic-circle", "params": {"radius": 1}}, "H": 1, "tolerances": {"x": 1}}, "tolerances.x"),
    ([], "$"),
])
def test_config_errors_name_field(doc, path):
    with pytest.raises(ConfigError) as exc:
        parse_config(doc)
    assert exc.value.path == path


json_values = st.recursive(
    st.none() | st.booleans() | st.floats(allow_nan=True) | st.integers() | st.text(max_size=6),
    lambda c: st.lists(c, max_size=4) | st.dictionaries(st.sampled_from(
        ["L", "gamma", "vertex", "H", "kind", "params", "radius", "center", "radii", "points",
         "boundary_data", "values", "constant", "mesh_h", "tolerances", "seed"]), c, max_size=5),
    max_leaves=12)


@settings(max_examples=200, deadline=None, suppress_health_check=[HealthCheck.too_slow])
@given(json_values)
def test_parsing_is_total(doc):
    try:
        parse_config(doc)
    except ConfigError:
        pass


def test_cli_bad_inputs(tmp_path, capsys):
    bad = tmp_path / "bad.json"
    bad.write_text('{"H": 1,\n "L": }')
    code, _, err = run(["check", bad], capsys)
    assert code == 3 and "line 2" in err
    assert run(["check", tmp_path / "missing.json"], capsys)[0] == 3
    assert run(["frobnicate"], capsys)[0] == 3
    assert run(["solve", DEMOS / "cone_demo.json", "--h", "-1"], capsys)[0] == 3


def test_cli_check(capsys):
    code, rep, _ = run(["check", DEMOS / "cone_demo.json"], capsys)
    assert code == 0 and rep["hypotheses"]["all_ok"]
    assert all(m > 0 for m in rep["hypotheses"]["margins"].values())
    code, rep, _ = run(["check", DEMOS / "bad_hcone.json"], capsys)
    assert code == 1 and rep["hypotheses"]["h_cone_ok"] is False


def test_cli_solve_writes_artifacts(tmp_path, capsys):
    out = tmp_path / "sol"
    code, rep, _ = run(["solve", DEMOS / "cone_demo.json", "--h", "0.05", "--out", out], capsys)
    assert code == 0
    assert (out / "solution.obj").exists() and (out / "report.json").exists()
    disk = json.loads((out / "report.json").read_text())
    assert disk == rep
    assert rep["barrier"]["passed"] and rep["invariants"]["all_passed"]
    code2, rep2, _ = run(["solve", DEMOS / "cone_demo.json", "--h", "0.05"], capsys)
    assert set(rep2) == set(rep) and rep2["config_hash"] == rep["config_hash"]

    exported = tmp_path / "s.vtk"
    assert run(["export", out / "solution.npz", "--format", "vtk", "--out", exported], capsys)[0] == 0
    assert exported.read_text().startswith("# vtk DataFile")
    assert run(["export", out / "solution.npz", "--field", "nope", "--out", exported], capsys)[0] == 3


def _finite(obj):
    if isinstance(obj, dict):
        return all(_finite(v) for v in obj.values())
    if isinstance(obj, list):
        return all(_finite(v) for v in obj)
    return not isinstance(obj, float) or np.isfinite(obj)


def test_solve_report_schema_for_failures(capsys):
    code, rep, _ = run(["solve", DEMOS / "supercritical_disk.json", "--h", "0.1"], capsys)
    assert code == 1 and rep["invariants"]["status"] == "no solution to validate"
    code, rep_forced, _ = run(["solve", DEMOS / "supercritical_disk.json", "--h", "0.1", "--force"], capsys)
    assert code == 2 and rep_forced["status"] == "nonconvergence"
    assert set(rep) == set(rep_forced)
    assert _finite(rep_forced)


def test_cli_perron_and_oracle(tmp_path, capsys):
    code, rep, _ = run(["perron", DEMOS / "cone_demo.json", "--h", "0.1", "--out", tmp_path / "p"], capsys)
    assert code == 0 and rep["perron"]["traces_decreasing"]
    assert (tmp_path / "p" / "perron.csv").read_text().startswith("k,H_k,trace_error")
    code, rep, _ = run(["oracle", DEMOS / "radial_annulus.json", "--out", tmp_path / "o"], capsys)
    assert code == 0 and rep["profile"]["first_integral_residual"] <= 1e-9
    assert (tmp_path / "o" / "profile.csv").exists()


def test_seed_override(capsys):
    code, rep, _ = run(["check", DEMOS / "cone_demo.json", "--seed", "7"], capsys)
    assert code == 0 and rep["seed"] == 7
