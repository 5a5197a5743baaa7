import json
import subprocess
import sys

import numpy as np
import pytest

from netsig.cli import main


@pytest.fixture
def karate_file(tmp_path, karate):
    from netsig.graph import write_edge_list
    p = tmp_path / "karate.txt"
    p.write_text(write_edge_list(karate))
    return str(p)


@pytest.fixture
def barbell_file(tmp_path):
    p = tmp_path / "barbell.txt"
    p.write_text("0 1\n0 2\n1 2\n3 4\n3 5\n4 5\n2 3\n")
    return str(p)


def test_fit_er(karate_file, tmp_path):
    out = tmp_path / "m.json"
    assert main(["fit", "--graph", karate_file, "--null", "er", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["p"] == pytest.approx(0.139037, abs=1e-6)
    assert doc["config"]["null"]["kind"] == "er"


def test_fit_config_prints_residual(karate_file, tmp_path, capsys):
    out = tmp_path / "m.json"
    assert main(["fit", "--graph", karate_file, "--null", "config", "--out", str(out)]) == 0
    diag = json.loads(capsys.readouterr().err.strip().splitlines()[-1])
    assert diag["max_residual"] <= 1e-6


def test_gravity_without_coords_is_usage_error(karate_file):
    with pytest.raises(SystemExit) as info:
        main(["fit", "--graph", karate_file, "--null", "gravity"])
    assert info.value.code == 2


def test_fit_failure_reports_json(tmp_path, capsys):
    g = tmp_path / "g.txt"
    g.write_text("0 1\n0 2\n0 3\n1 2\n")
    assert main(["fit", "--graph", str(g), "--null", "config"]) == 1
    doc = json.loads(capsys.readouterr().out)
    assert doc["error"] == "fit_failed" and "max_residual" in doc["diagnostics"]


def test_detect_barbell(barbell_file, tmp_path):
    out = tmp_path / "d.json"
    assert main(["detect", "--graph", barbell_file, "--null", "er", "--out", str(out)]) == 0
    doc = json.loads(out.read_text())
    assert doc["z"] == pytest.approx(4.7567, abs=1e-4)
    lab = dict(zip(doc["nodes"], doc["labels"]))
    assert lab["0"] == lab["1"] == lab["2"] != lab["3"] == lab["4"] == lab["5"]


def test_detect_with_saved_model(barbell_file, tmp_path):
    model = tmp_path / "m.json"
    main(["fit", "--graph", barbell_file, "--null", "er", "--out", str(model)])
    out = tmp_path / "d.json"
    assert main(["detect", "--graph", barbell_file, "--model", str(model),
                 "--out", str(out)]) == 0
    assert json.loads(out.read_text())["z"] == pytest.approx(4.7567, abs=1e-4)


def test_generate_byte_identical(tmp_path):
    paths = []
    for k in range(2):
        p = tmp_path / f"g{k}.txt"
        lab = tmp_path / f"l{k}.csv"
        assert main(["generate", "ppm", "sizes=20,20,20", "p_in=0.8", "p_out=0.2",
                     "--seed", "7", "--out", str(p), "--labels-out", str(lab)]) == 0
        paths.append((p.read_bytes(), lab.read_bytes()))
    assert paths[0] == paths[1]
    assert paths[0][1].decode().splitlines()[0] == "0,0"


def test_generate_spatial_writes_coords(tmp_path):
    p = tmp_path / "s.txt"
    c = tmp_path / "s.csv"
    assert main(["generate", "spatial_ppm", "sizes=10,10", "p_in=0.5", "p_out=0.1",
                 "sigma=0.2", "--out", str(p), "--coords-out", str(c)]) == 0
    assert len(c.read_text().splitlines()) == 21
    out = tmp_path / "m.json"
    assert main(["fit", "--graph", str(p), "--coords", str(c), "--null", "gravity",
                 "--bins", "3", "--out", str(out)]) == 0


def test_generate_bad_params(tmp_path):
    with pytest.raises(SystemExit) as info:
        main(["generate", "ppm", "p_in=0.8", "--out", str(tmp_path / "x")])
    assert info.value.code == 2


def test_eigen(karate_file, tmp_path):
    out = tmp_path / "e.csv"
    assert main(["eigen", "--graph", karate_file, "--rank", "2", "--out", str(out)]) == 0
    rows = [r for r in out.read_text().splitlines() if not r.startswith("#")]
    assert rows[0] == "node,v1,v2"
    v = np.array([[float(x) for x in r.split(",")[1:]] for r in rows[1:]])
    assert v.shape == (34, 2)
    assert np.allclose(np.linalg.norm(v, axis=0), 1.0)


def test_test_subcommand_reproducible(karate_file, tmp_path):
    outs = []
    for threads in ("1", "2"):
        out = tmp_path / f"t{threads}.json"
        assert main(["test", "--graph", karate_file, "--null", "config", "--pattern",
                     "bipartite", "--replicas", "5", "--seed", "3", "--restarts", "2",
                     "--threads", threads, "--out", str(out)]) == 0
        outs.append(out.read_bytes())
    assert outs[0] == outs[1]
    doc = json.loads(outs[0])
    assert doc["config"]["seed"] == 3 and doc["block_matrix"]["entries"] == [[-1, 1], [1, -1]]
    assert doc["tail"] == "right" and len(doc["z_null"]) == 5


def test_sweep_subcommand(tmp_path):
    spec = {
        "generator": {"kind": "ppm", "params": {"sizes": [8, 8], "p_in": 0.9}},
        "null": {"kind": "er"},
        "pattern": {"name": "assortative", "groups": 2},
        "sweep": {"param": "p_out", "values": [0.1, 0.9]},
        "networks": 1,
        "test": {"replicas": 3, "seed": 1, "anneal": {"restarts": 1, "sweeps": 100}},
    }
    sp = tmp_path / "exp.json"
    sp.write_text(json.dumps(spec))
    out, cells = tmp_path / "s.csv", tmp_path / "cells.json"
    assert main(["sweep", "--experiment", str(sp), "--out", str(out),
                 "--cells-out", str(cells)]) == 0
    assert len(out.read_text().splitlines()) == 3
    assert len(json.loads(cells.read_text())["cells"]) == 2


def test_sweep_mostly_failed_exits_nonzero(tmp_path):
    spec = {
        "generator": {"kind": "ppm", "params": {"sizes": [5, 5], "p_in": 0.9, "p_out": 0.1}},
        "null": {"kind": "gravity"},
        "pattern": {"name": "assortative", "groups": 2},
        "sweep": {"param": "p_out", "values": [0.1]},
        "networks": 1,
        "test": {"replicas": 2},
    }
    sp = tmp_path / "exp.json"
    sp.write_text(json.dumps(spec))
    assert main(["sweep", "--experiment", str(sp), "--out", str(tmp_path / "s.csv")]) == 1


def test_unknown_experiment_is_usage_error():
    with pytest.raises(SystemExit) as info:
        main(["sweep", "--experiment", "no_such_thing"])
    assert info.value.code == 2


def test_console_script_entry(tmp_path, barbell_file):
    r = subprocess.run([sys.executable, "-m", "netsig.cli", "fit", "--graph", barbell_file,
                        "--null", "gravity"], capture_output=True, text=True)
    assert r.returncode == 2 and "coordinates" in r.stderr
