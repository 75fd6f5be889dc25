import math

import networkx as nx
import numpy as np
import pytest
from scipy import stats

from subgraph_detect.analytic import expected_cycle_count
from subgraph_detect.errors import DomainError, SizeCapError
from subgraph_detect.graphs import (
    DisjointSet,
    Graph,
    components,
    count_simple_cycles,
    gen_er,
    gen_planted,
    induced,
    is_forest,
    to_networkx,
)
from subgraph_detect.statistics import edges_within, triangles


def test_from_edges_normalises_order():
    g = Graph.from_edges(4, [(3, 1), (0, 2), (1, 0)])
    assert g.edge_list() == [(0, 1), (0, 2), (1, 3)]
    assert g == Graph.from_edges(4, [(1, 0), (2, 0), (1, 3)])
    assert hash(g) == hash(Graph.from_edges(4, [(1, 3), (0, 1), (0, 2)]))
    assert g.has_edge(3, 1) and not g.has_edge(2, 3)


@pytest.mark.parametrize("pairs", [[(0, 0)], [(0, 1), (1, 0)], [(0, 4)], [(-1, 2)]])
def test_from_edges_rejects_invalid(pairs):
    with pytest.raises(DomainError):
        Graph.from_edges(4, pairs)


def test_edges_are_read_only(k4):
    with pytest.raises(ValueError):
        k4.edges[0, 0] = 3


def test_views(k4, path5):
    assert k4.num_edges == 6
    assert k4.degrees.tolist() == [3, 3, 3, 3]
    assert path5.degrees.tolist() == [1, 2, 2, 2, 1]
    assert sorted(path5.neighbors(2).tolist()) == [1, 3]
    assert path5.adjacency[0] == frozenset({1})
    assert path5.bitmasks[1] == 0b101
    assert (k4.csr != k4.csr.T).nnz == 0


def test_gen_er_extremes():
    assert gen_er(5, 0.0, 1).num_edges == 0
    assert gen_er(5, 1.0, 1).num_edges == 10
    with pytest.raises(DomainError):
        gen_er(5, 1.5, 1)


def test_gen_er_is_deterministic():
    assert gen_er(300, 0.02, 42) == gen_er(300, 0.02, 42)
    assert gen_er(300, 0.02, 42) != gen_er(300, 0.02, 43)


@pytest.mark.parametrize("p", [0.001, 0.5])
def test_gen_er_edge_count_mean(p):
    N, R = 400, 40
    mean = N * (N - 1) / 2 * p
    counts = np.array([gen_er(N, p, seed).num_edges for seed in range(R)])
    sd = np.sqrt(mean * (1 - p) / R)
    assert abs(counts.mean() - mean) < 5 * sd


def test_gen_planted_structure():
    inst = gen_planted(50, 0.0, 8, 1.0, seed=3)
    S = set(inst.community)
    assert len(S) == 8 and list(inst.community) == sorted(S)
    assert inst.graph.num_edges == 28
    assert all(i in S and j in S for i, j in inst.graph.edge_list())
    assert gen_planted(50, 0.1, 8, 0.5, 9).graph == gen_planted(50, 0.1, 8, 0.5, 9).graph


def test_gen_planted_invalid():
    with pytest.raises(DomainError):
        gen_planted(10, 0.5, 4, 0.2, 0)
    with pytest.raises(DomainError):
        gen_planted(10, 0.1, 11, 0.2, 0)


def test_components_and_induced(triangle_with_tail):
    part = components(triangle_with_tail)
    assert part.sizes == [5, 1]
    assert part.count == 2
    sub = induced(triangle_with_tail, [4, 2, 3])
    assert sub.num_vertices == 3
    assert sub.edge_list() == [(0, 1), (1, 2)]
    assert induced(triangle_with_tail, []).num_vertices == 0
    with pytest.raises(DomainError):
        induced(triangle_with_tail, [7])


def test_is_forest(path5, triangle_with_tail, k4):
    assert is_forest(path5)
    assert is_forest(Graph.empty(3)).cyclomatic_number == 0
    check = is_forest(triangle_with_tail)
    assert not check and check.cyclomatic_number == 1
    assert is_forest(k4).cyclomatic_number == 3


def test_disjoint_set():
    ds = DisjointSet(4)
    assert ds.union(0, 1)
    assert ds.union(2, 3)
    assert not ds.union(1, 0)
    assert ds.union(1, 3)
    assert ds.components == 1
    assert ds.find(0) == ds.find(2)


def test_count_simple_cycles(k4, path5):
    assert count_simple_cycles(k4) == 7
    assert count_simple_cycles(path5) == 0
    assert count_simple_cycles(Graph.complete(5)) == 37
    with pytest.raises(SizeCapError):
        count_simple_cycles(Graph.empty(17))


def test_cycle_and_triangle_counts_against_networkx():
    # at least one simple cycle per independent cycle
    for seed in range(5):
        g = gen_er(10, 0.25, seed)
        h = to_networkx(g)
        rank = g.num_edges - g.num_vertices + nx.number_connected_components(h)
        assert rank == is_forest(g).cyclomatic_number
        assert triangles(g) == sum(nx.triangles(h).values()) // 3
        cycles = count_simple_cycles(g)
        assert (cycles == 0) == (rank == 0)
        assert cycles >= rank


def test_gen_planted_without_signal_is_null():
    N, p, n, R = 200, 0.05, 20, 300
    planted = [gen_planted(N, p, n, p, seed).graph.num_edges for seed in range(R)]
    null = [gen_er(N, p, 10_000 + seed).num_edges for seed in range(R)]
    assert stats.ks_2samp(planted, null).pvalue > 1e-3


@pytest.mark.slow
def test_gen_planted_within_community_mean():
    N, p0, n, p1, R = 500, 0.002, 50, 0.06, 2000
    values = []
    for seed in range(R):
        inst = gen_planted(N, p0, n, p1, seed)
        values.append(edges_within(inst.graph, inst.community))
    values = np.array(values)
    assert math.comb(n, 2) * p1 == pytest.approx(73.5)
    se = values.std(ddof=1) / math.sqrt(R)
    assert abs(values.mean() - 73.5) < 3 * se


@pytest.mark.slow
@pytest.mark.parametrize("lam", [0.3, 0.6])
def test_cycle_count_mean(lam):
    n, R = 12, 4000
    values = np.array([count_simple_cycles(gen_er(n, lam / n, seed)) for seed in range(R)])
    se = values.std(ddof=1) / math.sqrt(R)
    assert abs(values.mean() - expected_cycle_count(n, lam / n)) < 4 * se
