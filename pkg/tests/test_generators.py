import numpy as np
import pytest
from scipy import stats

from netsig.generators import (DcPPMSpec, PlantedCliqueSpec, PPMSpec, SpatialPPMSpec,
                               block_normalise, gen_dcppm, gen_planted_clique, gen_ppm,
                               gen_spatial_ppm, generate, pareto_weights)


def test_ppm_densities():
    g, c = gen_ppm(PPMSpec([40, 40, 40], 0.6, 0.1), np.random.default_rng(0))
    a = g.adjacency
    same = (c[:, None] == c[None, :]) & ~np.eye(g.n, dtype=bool)
    n_in, n_out = same.sum() // 2, (c[:, None] != c[None, :]).sum() // 2
    for frac, p, m in ((a[same].mean(), 0.6, n_in), (a[c[:, None] != c[None, :]].mean(), 0.1, n_out)):
        assert abs(frac - p) < 4 * np.sqrt(p * (1 - p) / m)


def test_ppm_disjoint_cliques():
    g, c = gen_ppm(PPMSpec([3, 4], 1.0, 0.0), 1)
    assert g.n_edges == 3 + 6
    assert all(c[i] == c[j] for i, j in g.edges)


def test_planted_clique_extremes():
    g, c = gen_planted_clique(PlantedCliqueSpec(10, 1.0, 0), 0)
    assert g.n_edges == 45 and np.all(c == 1)
    g, c = gen_planted_clique(PlantedCliqueSpec(10, 0.0, 10), 0)
    assert g.n_edges == 45 and np.all(c == 0)
    g, c = gen_planted_clique(PlantedCliqueSpec(30, 0.1, 6), 2)
    a = g.adjacency
    assert a[:6, :6].sum() == 30
    assert c.tolist() == [0] * 6 + [1] * 24
    with pytest.raises(ValueError):
        PlantedCliqueSpec(5, 0.1, 6)


def test_pareto_tail():
    t = pareto_weights(20000, 3.0, np.random.default_rng(4))
    assert t.min() >= 1.0
    # density ~ t^-3 on t >= 1 is scipy's Pareto with shape b = 2
    assert stats.kstest(t, stats.pareto(b=2.0).cdf).pvalue > 0.001


def test_block_normalise():
    c = np.array([0, 0, 1, 1, 1])
    th = block_normalise([1.0, 3.0, 2.0, 2.0, 4.0], c)
    assert np.allclose(np.bincount(c, weights=th), 1.0)
    assert th.tolist() == [0.25, 0.75, 0.25, 0.25, 0.5]


def test_dcppm_edge_rule():
    # with omega_out = 0 no edge crosses groups
    g, c = gen_dcppm(DcPPMSpec([15, 15], 200, 0), np.random.default_rng(1))
    assert all(c[i] == c[j] for i, j in g.edges)
    with pytest.raises(ValueError):
        DcPPMSpec([10], 1, 1, gamma=1.0)


def test_dcppm_mean_edge_count():
    spec = DcPPMSpec([20, 20, 20], 150, 10, 3.0)
    counts = [gen_dcppm(spec, s)[0].n_edges for s in range(40)]
    # the weights sum to one per group, so within-group expected edges are
    # at most omega_in / 2 each and cross-group at most omega_out
    assert np.mean(counts) < 3 * 150 / 2 + 3 * 10
    assert np.mean(counts) > 100


def test_spatial_ppm():
    spec = SpatialPPMSpec(PPMSpec([30, 30], 0.5, 0.025), 0.05)
    g, c = gen_spatial_ppm(spec, np.random.default_rng(0))
    assert g.coords.shape == (60, 2)
    assert abs(g.coords[c == 0, 0].mean()) < 0.05
    assert abs(g.coords[c == 1, 0].mean() - 1) < 0.05
    with pytest.raises(ValueError):
        SpatialPPMSpec(PPMSpec([10, 10, 10], 0.5, 0.1), 0.1)


@pytest.mark.parametrize("kind,params", [
    ("ppm", {"sizes": [20, 20, 20], "p_in": 0.8, "p_out": 0.2}),
    ("dcppm", {"sizes": [10, 10], "omega_in": 50, "omega_out": 5}),
    ("planted_clique", {"n": 20, "p": 0.2, "n_clique": 5}),
    ("spatial_ppm", {"sizes": [10, 10], "p_in": 0.5, "p_out": 0.1, "sigma": 0.3}),
])
def test_generate_is_deterministic(kind, params):
    g1, c1 = generate(kind, params, np.random.default_rng(7))
    g2, c2 = generate(kind, params, np.random.default_rng(7))
    assert g1 == g2 and np.array_equal(c1, c2)
    if g1.coords is not None:
        assert np.array_equal(g1.coords, g2.coords)
    with pytest.raises(ValueError):
        generate("nope", params, 0)
