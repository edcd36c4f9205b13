import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

import oracles
from conftest import gnp, graphs, named
from netselect.features import (FEATURE_NAMES, assortativity, avg_clustering, degree_percentiles,
                                effective_diameter, feature_vector, hop_counts,
                                interpolated_quantile, interval_points, transitivity)
from netselect.generators import gen_er
from netselect.graph import Graph, permute_nodes


def test_feature_order():
    assert FEATURE_NAMES == ("avg_cc", "transitivity", "assortativity", "eff_diam",
                             "degdist_p1", "degdist_p2", "degdist_p3", "degdist_p4",
                             "degdist_p5", "degdist_p6")


# -- clustering and transitivity ---------------------------------------------------

def test_avg_clustering_examples():
    assert avg_clustering(named("K4")) == 1.0
    assert avg_clustering(named("S5")) == 0.0
    assert avg_clustering(named("paw")) == pytest.approx(7 / 12, abs=1e-15)


def test_transitivity_examples():
    assert transitivity(named("triangle")) == 1.0
    assert transitivity(named("S5")) == 0.0
    assert transitivity(named("paw")) == pytest.approx(0.6, abs=1e-15)
    assert transitivity(Graph.from_edges(3, [])) == 0.0


def test_clique_clustering_is_one():
    for n in range(3, 9):
        k = Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)])
        assert avg_clustering(k) == 1.0


@given(graphs(max_n=20))
def test_triangle_free_graphs_have_zero_transitivity(g):
    bipartite = Graph.from_edges(g.n, [(u, v) for u, v in g.edges().tolist() if (u + v) % 2])
    assert transitivity(bipartite) == 0.0


# -- assortativity ---------------------------------------------------------------

def test_assortativity_examples():
    assert assortativity(named("P4")) == pytest.approx(-0.5, abs=1e-15)
    assert assortativity(named("C5")) is None
    assert assortativity(named("K4")) is None


def test_assortativity_needs_an_edge():
    with pytest.raises(ValueError):
        assortativity(Graph.from_edges(3, []))


def test_assortativity_of_preferential_attachment_is_not_positive():
    from netselect.generators import gen_pa
    vals = [assortativity(gen_pa(2000, 0.002, s)) for s in range(30)]
    assert max(vals) < 0.05
    assert np.mean(vals) < 0


# -- effective diameter -----------------------------------------------------------

def test_effective_diameter_examples():
    assert effective_diameter(named("K4")) == pytest.approx(0.9, abs=1e-12)
    assert effective_diameter(named("P4")) == pytest.approx(2.4, abs=1e-12)


def test_hop_counts_p4():
    # ordered pairs: 6 at distance 1, 4 at 2, 2 at 3
    assert hop_counts(named("P4"), range(4)).tolist() == [0, 6, 4, 2]


def test_effective_diameter_disconnected_uses_reachable_pairs():
    g = Graph.from_edges(5, [(0, 1), (2, 3)])
    assert effective_diameter(g) == pytest.approx(0.9)


def test_effective_diameter_needs_a_pair():
    with pytest.raises(ValueError):
        effective_diameter(Graph.from_edges(4, []))


def test_interpolated_quantile_cdf_is_monotone():
    counts = hop_counts(gnp(60, 0.05, 2), range(60))
    cdf = np.cumsum(counts) / counts.sum()
    assert np.all(np.diff(cdf) >= 0) and cdf[-1] == 1.0
    assert interpolated_quantile(counts, 1.0) == pytest.approx(len(counts) - 1)


def test_sampled_diameter_close_to_exact():
    for s in range(3):
        g = gen_er(1500, 0.004, s)
        exact = effective_diameter(g)
        approx = effective_diameter(g, exact_limit=1000, seed=s)
        assert abs(approx / exact - 1) <= 0.05


def test_sampled_diameter_is_seeded():
    g = gen_er(1500, 0.004, 0)
    a = effective_diameter(g, exact_limit=100, seed=3)
    assert a == effective_diameter(g, exact_limit=100, seed=3)


# -- degree percentiles -----------------------------------------------------------

def test_star_percentiles():
    got = degree_percentiles(named("S5"))
    assert got == (0.0, 5 / 6, 0.0, 0.0, 0.0, 1 / 6)


def test_star_interval_points():
    ip = interval_points(named("S5").degrees)
    mu, ps = 10 / 6, 0.3 * np.sqrt(5 - 25 / 9)
    expected = [1, mu - 2 * ps, mu - ps, mu, mu + ps, mu + 2 * ps, 5]
    np.testing.assert_allclose(ip, expected, rtol=0, atol=1e-12)


def test_regular_graph_percentiles():
    assert degree_percentiles(named("C5")) == (0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    assert degree_percentiles([3, 3, 3, 3], k=4) == (0.0, 0.0, 1.0, 0.0)


def test_boundary_values_go_right():
    # mu = 2, sigma = 0.816 (p = 1): points 1 | 1.18 2 2.82 | 3 ; degree 2
    # sits on an interior point and belongs to the interval it opens
    got = degree_percentiles([1, 1, 3, 3, 2, 2], k=4, p=1.0)
    assert got[2] == pytest.approx(2 / 6)
    assert sum(got) == pytest.approx(1.0)


@pytest.mark.parametrize("k, p", [(3, 0.3), (2, 0.3), (6, 0.0), (6, -1.0)])
def test_percentile_preconditions(k, p):
    with pytest.raises(ValueError):
        degree_percentiles([1, 2, 3], k=k, p=p)


@given(st.lists(st.integers(0, 50), min_size=1, max_size=200),
       st.sampled_from([4, 6, 8, 10]), st.floats(0.05, 2.0))
def test_percentiles_partition(deg, k, p):
    got = degree_percentiles(deg, k=k, p=p)
    assert len(got) == k
    assert all(0.0 <= x <= 1.0 for x in got)
    assert abs(sum(got) - 1.0) <= 1e-12


@given(st.lists(st.integers(0, 50), min_size=2, max_size=200))
def test_percentiles_match_interval_scan(deg):
    """First-matching interval scan, the literal reading of the partition rule."""
    ip = interval_points(deg)
    if len(set(deg)) == 1:
        return
    counts = [0] * 6
    for d in deg:
        for i in range(6):
            lo, hi = ip[i] if i else -np.inf, ip[i + 1] if i < 5 else np.inf
            if lo <= d < hi:
                counts[i] += 1
                break
    # the first and last intervals are bounded by the sample extremes, so
    # treating them as open-ended changes nothing
    assert degree_percentiles(deg) == tuple(c / len(deg) for c in counts)


# -- feature vector -----------------------------------------------------------------

def test_k4_feature_vector():
    fv = feature_vector(named("K4"))
    assert fv.values() == (1.0, 1.0, 0.0, pytest.approx(0.9), 0.0, 0.0, 0.0, 1.0, 0.0, 0.0)
    assert {"assortativity_undefined", "sigma_zero"} <= fv.flags


def test_feature_vector_flags():
    fv = feature_vector(Graph.from_edges(5, [(0, 1), (2, 3)]))
    assert {"disconnected", "no_triplets", "assortativity_undefined"} <= fv.flags


def test_feature_vector_needs_edges():
    with pytest.raises(ValueError):
        feature_vector(Graph.from_edges(3, []))


def test_feature_vector_deterministic():
    g = gen_er(2500, 0.003, 1)
    assert feature_vector(g, seed=4).values() == feature_vector(g, seed=4).values()
    assert "diameter_sampled" in feature_vector(g, seed=4).flags


@given(graphs(min_n=2, max_n=40, min_m=1))
def test_feature_ranges(g):
    fv = feature_vector(g)
    assert 0 <= fv.avg_cc <= 1 and 0 <= fv.transitivity <= 1
    assert -1 - 1e-12 <= fv.assortativity <= 1 + 1e-12
    assert fv.eff_diam >= 0


def test_isomorphism_invariance_100_graphs():
    rng = np.random.default_rng(7)
    for t in range(100):
        n = int(rng.integers(5, 201))
        g = gnp(n, float(rng.uniform(1.0, 6.0)) / n, t)
        if g.m == 0:
            continue
        assert feature_vector(permute_nodes(g, t)).values() == feature_vector(g).values()


def test_oracle_equivalence_200_graphs():
    rng = np.random.default_rng(2024)
    checked = 0
    for t in range(200):
        n = int(rng.integers(2, 51))
        g = gnp(n, float(rng.uniform(0.02, 0.5)), 10_000 + t)
        if g.m == 0:
            g = Graph.from_edges(n, [(0, 1)])
        adj = oracles.adjacency(g)
        assert avg_clustering(g) == pytest.approx(oracles.clustering(adj), abs=1e-9)
        assert transitivity(g) == pytest.approx(oracles.transitivity(adj), abs=1e-9)
        r, ro = assortativity(g), oracles.assortativity(adj)
        assert (r is None) == (ro is None)
        if r is not None:
            assert r == pytest.approx(ro, abs=1e-9)
        assert effective_diameter(g) == pytest.approx(oracles.effective_diameter(adj), abs=1e-9)
        checked += 1
    assert checked == 200


def test_networkx_agreement():
    nx = pytest.importorskip("networkx")
    for s in range(10):
        g = gnp(80, 0.08, s)
        h = nx.Graph()
        h.add_nodes_from(range(g.n))
        h.add_edges_from(g.edges().tolist())
        assert avg_clustering(g) == pytest.approx(nx.average_clustering(h), abs=1e-12)
        assert transitivity(g) == pytest.approx(nx.transitivity(h), abs=1e-12)
        assert assortativity(g) == pytest.approx(nx.degree_pearson_correlation_coefficient(h), abs=1e-9)
