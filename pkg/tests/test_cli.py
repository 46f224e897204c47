import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from bistable_lattice.cli import main
from bistable_lattice.compatibility import rigidity_matrix
from bistable_lattice.lattice import build_lattice


def run(capsys, *argv):
    code = main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def run_json(capsys, *argv):
    code, out, err = run(capsys, *argv)
    assert code == 0, err
    return json.loads(out)


def test_lattice_info(capsys):
    d = run_json(capsys, "lattice", "info", "--n", "2")
    assert (d["N"], d["E"], d["M"], d["T"], d["EB"]) == (7, 12, 1, 6, 6)
    assert d["identity_2N_minus_3_equals_E_minus_M"] is True
    assert run_json(capsys, "lattice", "info", "--n", "3")["N"] == 19


@pytest.mark.parametrize(
    "argv",
    [
        ["lattice", "info", "--n", "1"],
        ["lattice", "info"],
        ["compat", "rank", "--n", "x"],
        ["still", "approx", "--n", "2", "--alpha", "0.5,0.5,0.5"],
        ["still", "approx", "--n", "5", "--alpha", "0.5,1.5,0.5"],
        ["still", "approx", "--n", "5"],
        ["flatbottom", "--s", "-1"],
        ["region", "--a", "2.5"],
        ["hexassembly", "--k", "0", "--n1", "1", "--n2", "1", "--n3", "1", "--a", "1.2"],
        ["energy", "relax", "--input", "/nonexistent.json", "--n", "3"],
        ["nonsense"],
    ],
)
def test_errors_are_single_json_lines(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code != 0 and out == ""
    lines = err.strip().splitlines()
    assert len(lines) == 1
    payload = json.loads(lines[0])
    assert set(payload) == {"error", "message"}


@pytest.mark.parametrize("n,rank_R,rank_Z", [(2, 11, 1), (3, 35, 7), (6, 179, 61)])
def test_compat_rank(capsys, n, rank_R, rank_Z):
    d = run_json(capsys, "compat", "rank", "--n", str(n))
    assert (d["rank_R"], d["rank_Z"], d["nullity_R"]) == (rank_R, rank_Z, 3)


def test_compat_solve_and_strain(capsys, tmp_path, rng):
    lat = build_lattice(3)
    U = rng.normal(size=2 * lat.num_nodes)
    kappa = rigidity_matrix(lat) @ U
    kpath = tmp_path / "kappa.json"
    kpath.write_text(json.dumps(kappa.tolist()))
    V = np.array(run_json(capsys, "compat", "solve", "--n", "3", "--input", str(kpath)))
    assert np.allclose(rigidity_matrix(lat) @ V, kappa)
    upath = tmp_path / "U.json"
    upath.write_text(json.dumps({"U": V.tolist()}))
    E1 = run_json(capsys, "strain", "average", "--n", "3", "--displacements", str(upath))
    E2 = run_json(capsys, "strain", "average", "--n", "3", "--kappa", str(kpath))
    assert set(E1) == {"a", "b", "c"}
    assert all(abs(E1[k] - E2[k]) < 1e-10 for k in "abc")


def test_compat_solve_rejects_incompatible(capsys, tmp_path):
    path = tmp_path / "k.json"
    k = np.zeros(build_lattice(3).num_edges)
    k[0] = 1.0
    path.write_text(json.dumps(k.tolist()))
    code, _, err = run(capsys, "compat", "solve", "--n", "3", "--input", str(path))
    assert code == 2 and json.loads(err)["error"] == "IncompatibleElongations"


def test_compat_export(capsys):
    code, out, _ = run(capsys, "compat", "export", "--n", "2", "--matrix", "Z")
    assert code == 0 and len(out.splitlines()) == 12


def test_still_stripes(capsys):
    d = run_json(capsys, "still", "stripes", "--n", "3")
    assert len(d) == 12
    assert {tuple(x["alpha"]).count(0.0) for x in d} == {2}
    code, out, _ = run(capsys, "still", "stripes", "--n", "3", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert len(rows) == build_lattice(3).num_edges


def test_still_approx(capsys):
    zero = run_json(capsys, "still", "approx", "--n", "5", "--alpha", "0,0,0")
    assert zero["state"]["long_edges"] == []
    assert zero["strain"] == {"a": 0.0, "b": 0.0, "c": 0.0}
    full = run_json(capsys, "still", "approx", "--n", "5", "--alpha", "1,1,1")
    assert full["approximation"]["within_bound"]
    assert abs(full["strain"]["a"] - 0.1) < 1e-12


def test_random_sweep_reproducible(capsys, monkeypatch):
    argv = ["still", "approx", "--n", "10", "--random", "8", "--seed", "7"]
    first = run(capsys, *argv)[1]
    monkeypatch.setenv("BISTABLE_THREADS", "4")
    second = run(capsys, *argv)[1]
    assert first == second
    d = json.loads(first)
    assert all(r["approximation"]["error"] <= r["approximation"]["bound"] for r in d["reports"])
    assert run(capsys, *argv[:-1], "8")[1] != first


def test_float_round_trip(capsys):
    d = run_json(capsys, "hexassembly", "--k", "3", "--n1", "2", "--n2", "2", "--n3", "2", "--a", "1.2")
    from bistable_lattice.eigenstrain_large import hex_assembly

    E, N = hex_assembly(3, 2, 2, 2, 1.2)
    assert d["E_hex"]["a"] == E[0, 0] and d["N"] == N
    assert d["isotropic_factor"] == pytest.approx(E[0, 0], rel=1e-14)


def test_flatbottom(capsys):
    d = run_json(capsys, "flatbottom", "--s", "0.1")
    verts = {(v["x1"], v["x2"], v["x3"]): v for v in d["vertices"]}
    assert len(verts) == 8
    assert verts[(0.0, 0.0, 0.0)]["a"] == 0
    assert verts[(1.0, 1.0, 1.0)]["lambda1"] == pytest.approx(0.1)
    _, out, _ = run(capsys, "flatbottom", "--s", "0.1", "--resolution", "3", "--format", "csv")
    lines = out.splitlines()
    assert lines[0] == "x1,x2,x3,a,b,c,lambda1,lambda2" and len(lines) == 1 + 8 + 27


def test_region(capsys):
    _, out, _ = run(capsys, "region", "--a", "1.2", "--resolution", "4", "--format", "csv")
    rows = list(csv.DictReader(io.StringIO(out)))
    assert list(rows[0]) == ["lambda1", "lambda2", "family", "mu", "k", "n1", "n2", "n3"]
    pts = {(float(r["lambda1"]), float(r["lambda2"])) for r in rows}
    assert all((y, x) in pts for x, y in pts)
    d = run_json(capsys, "region", "--a", "1.0", "--resolution", "2")
    assert all(abs(p["lambda1"] - 1) < 1e-12 for p in d)


def test_energy_effective(capsys):
    d = run_json(capsys, "energy", "effective", "--e", "0.2,0,0.2", "--s", "0.1")
    assert d["J"] == pytest.approx(2 / 3 * 0.01)
    assert d["minimizer"] == pytest.approx({"a": 0.1, "b": 0.0, "c": 0.1})
    inside = run_json(capsys, "energy", "effective", "--e", "0.05,0,0.05", "--s", "0.1", "--corners")
    assert inside["J"] == 0


def test_energy_relax(capsys, tmp_path, rng):
    lat = build_lattice(3)
    path = tmp_path / "u0.json"
    path.write_text(json.dumps({"n": 3, "U": (1e-3 * rng.normal(size=2 * lat.num_nodes)).tolist()}))
    out = tmp_path / "out.json"
    code, stdout, _ = run(capsys, "energy", "relax", "--input", str(path), "--output", str(out))
    assert code == 0 and stdout == ""
    d = json.loads(out.read_text())
    assert d["energy"] <= 1e-12 and len(d["U"]) == 2 * lat.num_nodes


def test_module_entry_point():
    r = subprocess.run([sys.executable, "-m", "bistable_lattice", "lattice", "info", "--n", "4"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["E"] == 90
