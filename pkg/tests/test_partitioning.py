import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mapcentrality.flow import LINK_TELEPORT, compute_flow
from mapcentrality.graph import parse_edge_list
from mapcentrality.mapeq import codelength, codelength_one_level
from mapcentrality.partition import Partition
from mapcentrality.partitioning import (SearchConfig, effective_num_modules,
                                        mixing, modularity,
                                        optimize_two_level)

from conftest import M_OPT, random_graph, random_partition
from oracles import modularity_brute, set_partitions


def exhaustive_best(f):
    return min(codelength(f, Partition.from_labels(lab))
               for lab in set_partitions(f.n))


def clique(nodes):
    return "".join(f"{a} {b}\n" for i, a in enumerate(nodes)
                   for b in nodes[i + 1:])


def test_config_validation():
    with pytest.raises(ValueError):
        SearchConfig(num_runs=0)
    with pytest.raises(ValueError):
        SearchConfig(min_gain=-1.0)


def test_toy8_recovers_m_opt(toy8):
    r = optimize_two_level(toy8, compute_flow(toy8), SearchConfig(num_runs=10))
    assert r.partition.same_grouping(Partition.from_labels(M_OPT))
    assert r.codelength == pytest.approx(2.474197, abs=1e-6)
    assert len(r.run_codelengths) == 10
    assert r.codelength == min(r.run_codelengths)


def test_k5_one_module():
    g = parse_edge_list(clique(list("abcde")))
    f = compute_flow(g)
    r = optimize_two_level(g, f, SearchConfig(num_runs=5))
    assert r.num_modules == 1
    assert r.codelength == pytest.approx(codelength_one_level(f), abs=1e-12)
    assert r.codelength == pytest.approx(exhaustive_best(f), abs=1e-12)


def test_two_k4_cliques():
    g = parse_edge_list(clique(list("abcd")) + clique(list("efgh")) + "d e\n")
    f = compute_flow(g)
    r = optimize_two_level(g, f, SearchConfig(num_runs=5))
    assert r.partition.same_grouping(Partition.from_labels([0] * 4 + [1] * 4))
    assert r.codelength == pytest.approx(exhaustive_best(f), abs=1e-12)


def test_deterministic(toy8):
    f = compute_flow(toy8)
    cfg = SearchConfig(num_runs=4, seed=9)
    a = optimize_two_level(toy8, f, cfg)
    b = optimize_two_level(toy8, f, cfg)
    assert a.partition == b.partition
    assert a.run_codelengths == b.run_codelengths


def test_zero_rate_nodes_isolated():
    # "s" has no in-links, so it gets no recorded flow
    g = parse_edge_list("s a\na b\nb c\nc a\n", directed=True)
    f = compute_flow(g, LINK_TELEPORT, 0.15)
    assert f.visit_rate[0] == 0
    r = optimize_two_level(g, f, SearchConfig(num_runs=3))
    lab = r.partition.leaf_of
    assert np.sum(lab == lab[0]) == 1


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000))
def test_never_worse_than_one_level(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 20, 0.2, weighted=True, connected=True)
    f = compute_flow(g)
    r = optimize_two_level(g, f, SearchConfig(num_runs=2, seed=seed))
    assert r.codelength <= r.one_level_codelength + 1e-12
    assert r.codelength == pytest.approx(codelength(f, r.partition), abs=1e-12)


@pytest.mark.slow
def test_exhaustive_oracle_small():
    rng = np.random.default_rng(5)
    hits = 0
    for t in range(20):
        n = int(rng.integers(3, 8))
        g = random_graph(rng, n, 0.4, connected=True)
        f = compute_flow(g)
        r = optimize_two_level(g, f, SearchConfig(num_runs=20, seed=t))
        hits += abs(r.codelength - exhaustive_best(f)) <= 1e-9
    assert hits >= 19


def test_effective_modules():
    assert effective_num_modules(Partition.from_labels([0] * 4 + [1] * 4)) == \
        pytest.approx(2.0)
    assert effective_num_modules(Partition.one_level(5)) == pytest.approx(1.0)
    sub = Partition.from_labels([0, 0, 0, 1, 1, 1, 1, 1])
    h = -(3 / 8) * math.log2(3 / 8) - (5 / 8) * math.log2(5 / 8)
    assert effective_num_modules(sub) == pytest.approx(2 ** h)
    assert effective_num_modules(sub) == pytest.approx(1.938, abs=5e-4)


def test_mixing(toy8, m_opt):
    assert mixing(toy8, m_opt) == pytest.approx(0.1)
    assert mixing(toy8, Partition.one_level(8)) == 0.0
    assert mixing(toy8, Partition.singletons(8)) == 1.0


def test_modularity_toy8(toy8, m_opt):
    # e = (5, 4), d = (11, 9), L = 10
    q = 5 / 10 - (11 / 20) ** 2 + 4 / 10 - (9 / 20) ** 2
    assert modularity(toy8, m_opt) == pytest.approx(q)
    assert modularity(toy8, m_opt) == pytest.approx(0.395)


def test_modularity_trivial(toy8):
    assert modularity(toy8, Partition.one_level(8)) == pytest.approx(0.0)
    tri = parse_edge_list("a b\nb c\nc a\n")
    assert modularity(tri, Partition.singletons(3)) == pytest.approx(-1 / 3)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_modularity_matches_oracle(seed):
    rng = np.random.default_rng(seed)
    g = random_graph(rng, 15, 0.25, connected=True)
    m = random_partition(rng, g.n, 4)
    edges = list(zip(g.sources.tolist(), g.targets.tolist()))
    assert modularity(g, m) == pytest.approx(
        modularity_brute(edges, m.leaf_of.tolist(), g.n,
                         g.weights.tolist()), abs=1e-12)


def test_modularity_directed_matches_networkx():
    nx = pytest.importorskip("networkx")
    rng = np.random.default_rng(1)
    g = random_graph(rng, 15, 0.2, directed=True, weighted=True, connected=True)
    m = random_partition(rng, g.n, 3)
    G = nx.DiGraph()
    G.add_nodes_from(range(g.n))
    G.add_weighted_edges_from(zip(g.sources.tolist(), g.targets.tolist(),
                                  g.weights.tolist()))
    comms = [set(c) for c in m.modules()]
    assert modularity(g, m) == pytest.approx(
        nx.community.modularity(G, comms, weight="weight"), abs=1e-12)
