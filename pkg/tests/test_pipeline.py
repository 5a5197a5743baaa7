import json

import numpy as np
import pytest

from netsig import pipeline
from netsig.anneal import AnnealConfig
from netsig.blocks import assortative
from netsig.graph import Graph
from netsig.nullmodels import NullSpec, fit
from netsig.pipeline import (ExperimentSpec, ReplicaError, TestConfig, kesten_stigum_boundary,
                             pseudo_p_value, run_left_tail_test, run_test, sweep)

from conftest import random_graph

FAST = AnnealConfig(restarts=2, sweeps=300, stall_sweeps=50)


def test_pseudo_p_examples():
    assert pseudo_p_value(5.0, [1, 2, 3]) == 0.25
    assert pseudo_p_value(2.0, [1, 2, 3]) == 0.75
    assert pseudo_p_value(2.0, [2, 2, 2]) == 1.0
    assert pseudo_p_value(2.0, [2, 2, 2], "left") == 1.0


def test_tails_complement_without_ties():
    z = np.random.default_rng(0).normal(size=40)
    for obs in (-1.0, 0.1234, 3.0):
        total = pseudo_p_value(obs, z) + pseudo_p_value(obs, z, "left")
        assert total == pytest.approx(1 + 1 / 41)


def test_kesten_stigum():
    assert kesten_stigum_boundary(3, 60, 0.8) == pytest.approx(0.5)
    x = kesten_stigum_boundary(4, 200, 0.3)
    assert (0.3 - x) ** 2 == pytest.approx((4 * 0.3 + 12 * x) / 200)
    assert kesten_stigum_boundary(3, 10**9, 0.8) == pytest.approx(0.8, abs=1e-3)
    assert kesten_stigum_boundary(3, 3, 0.5) is None
    with pytest.raises(ValueError):
        kesten_stigum_boundary(1, 60, 0.8)


def test_config_validation():
    with pytest.raises(ValueError):
        TestConfig(replicas=0)
    with pytest.raises(ValueError):
        TestConfig(alpha=1.0)
    with pytest.raises(ValueError):
        TestConfig(tail="both")


def test_run_test_result(karate):
    cfg = TestConfig(replicas=9, seed=3, anneal=FAST)
    res = run_test(karate, NullSpec("configuration"), assortative(2), cfg)
    assert 1 / 10 <= res.p_value <= 1
    assert res.reject == (res.p_value <= cfg.alpha)
    assert len(res.z_null) == 9 and len(res.labels) == 34
    doc = json.loads(res.to_json())
    for key in ("z_observed", "labels", "z_null", "p_value", "reject", "tail", "null",
                "block_matrix", "seeds", "config", "version"):
        assert key in doc
    assert doc["config"]["anneal"]["restarts"] == 2
    assert doc["null"]["kind"] == "configuration"


def test_determinism_and_thread_independence(karate):
    m = fit(karate, NullSpec("configuration"))
    cfg = TestConfig(replicas=6, seed=11, anneal=FAST)
    a = run_test(karate, m, assortative(2), cfg, threads=1)
    b = run_test(karate, m, assortative(2), cfg, threads=3)
    assert a.to_json() == b.to_json()


def test_more_replicas_extend(karate):
    m = fit(karate, NullSpec("configuration"))
    short = run_test(karate, m, assortative(2), TestConfig(replicas=4, seed=5, anneal=FAST))
    long = run_test(karate, m, assortative(2), TestConfig(replicas=8, seed=5, anneal=FAST))
    assert short.z_observed == long.z_observed
    assert np.array_equal(short.z_null, long.z_null[:4])


def test_left_tail(karate):
    cfg = TestConfig(replicas=5, seed=2, anneal=FAST)
    m = fit(karate, NullSpec("configuration"))
    right = run_test(karate, m, assortative(2), cfg)
    left = run_left_tail_test(karate, m, assortative(2), cfg)
    assert left.tail == "left"
    assert np.array_equal(left.z_null, right.z_null)
    assert left.p_value == pseudo_p_value(left.z_observed, left.z_null, "left")


def test_empty_replicas_redrawn_then_error(monkeypatch, karate):
    calls = []

    def empty(model, rng):
        calls.append(1)
        return Graph(model.n, [])

    monkeypatch.setattr(pipeline, "sample", empty)
    with pytest.raises(ReplicaError):
        run_test(karate, NullSpec("er"), assortative(2), TestConfig(replicas=2, anneal=FAST))
    assert len(calls) == 1 + pipeline.MAX_REDRAWS


def _ppm_experiment(**kw):
    doc = {
        "generator": {"kind": "ppm", "params": {"sizes": [8, 8], "p_in": 0.9}},
        "null": {"kind": "er"},
        "pattern": {"name": "assortative", "groups": 2},
        "sweep": {"param": "p_out", "values": [0.1]},
        "networks": 1,
        "test": {"replicas": 4, "seed": 1,
                 "anneal": {"restarts": 2, "sweeps": 200, "stall_sweeps": 40}},
    }
    doc.update(kw)
    return doc


def test_sweep_single_cell():
    res = sweep(_ppm_experiment())
    assert len(res.rows) == 1 and res.rows[0]["n_networks"] == 1
    lines = res.to_csv().splitlines()
    assert lines[0] == "p_out,mean_p,median_p,reject_frac,mean_z_obs,n_networks,n_failures"
    assert len(lines) == 2
    assert res.boundary == pytest.approx(kesten_stigum_boundary(2, 16, 0.9))


def test_sweep_marks_failures():
    doc = _ppm_experiment(null={"kind": "gravity"})
    doc["networks"] = 2
    res = sweep(doc)
    assert res.rows[0]["n_failures"] == 2 and res.rows[0]["n_networks"] == 0
    assert all(c["failed"] and "coordinates" in c["error"] for c in res.cells)
    assert "nan" in res.to_csv()


def test_sweep_null_parameter_reuses_networks():
    doc = _ppm_experiment(null={"kind": "rdpg"},
                          sweep={"param": "rank", "target": "null", "values": [1, 2]})
    doc["generator"]["params"]["p_out"] = 0.2
    res = sweep(doc)
    z = [c["z_observed"] for c in res.cells]
    assert len(res.rows) == 2 and len(z) == 2
    # same network at both ranks: the stricter null explains more structure
    assert z[1] <= z[0] + 1e-9


def test_sweep_subgrid_reproduces_cells():
    doc = _ppm_experiment(sweep={"param": "p_out", "values": [0.1, 0.5]})
    full = sweep(doc)
    sub = sweep(_ppm_experiment(sweep={"param": "p_out", "values": [0.5]}))
    assert sub.cells[0]["z_null"] == full.cells[1]["z_null"]


def test_sweep_thread_independent():
    doc = _ppm_experiment(networks=2)
    assert sweep(doc, threads=1).to_csv() == sweep(doc, threads=2).to_csv()


def test_experiment_round_trip():
    exp = ExperimentSpec.from_dict(_ppm_experiment())
    again = ExperimentSpec.from_dict(json.loads(json.dumps(exp.to_dict())))
    assert again == exp
