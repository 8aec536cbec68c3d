import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from mapcentrality.flow import (LINK_TELEPORT, NODE_FLOW, NODE_TELEPORT, RAW,
                                WITH_EXIT, ConvergenceError,
                                aggregate_partition_flows, compute_flow,
                                visit_rates_link_teleport,
                                visit_rates_node_teleport,
                                visit_rates_undirected)
from mapcentrality.graph import Graph, GraphError, parse_edge_list
from mapcentrality.partition import Partition, PartitionError

from conftest import random_graph, random_partition
from oracles import module_rates

TOY8_P = [0.15, 0.10, 0.10, 0.20, 0.20, 0.10, 0.10, 0.05]
K4 = "a b\na c\na d\nb c\nb d\nc d\n"


def check_marginals(f):
    assert f.visit_rate.sum() == pytest.approx(1.0, abs=1e-9)
    assert np.all(f.visit_rate >= 0)
    total = f.arc_flow.sum() + f.teleport.sum()
    assert total == pytest.approx(1.0, abs=1e-9)
    np.testing.assert_allclose(f.in_flow(), f.visit_rate, atol=1e-9)


def test_toy8_raw(toy8):
    f = visit_rates_undirected(toy8)
    np.testing.assert_allclose(f.visit_rate, TOY8_P, atol=1e-15)
    check_marginals(f)


def test_raw_two_nodes_weighted():
    g = parse_edge_list("a b 7\n")
    np.testing.assert_allclose(visit_rates_undirected(g).visit_rate, [0.5, 0.5])


def test_raw_regular_uniform():
    g = parse_edge_list("a b\nb c\nc d\nd e\ne a\n")
    np.testing.assert_allclose(visit_rates_undirected(g).visit_rate, 0.2)


def test_raw_rejects_directed():
    with pytest.raises(GraphError):
        visit_rates_undirected(parse_edge_list("a b\n", directed=True))


def test_empty_graph_rejected():
    with pytest.raises(GraphError):
        compute_flow(Graph(["a"], [], []))


@pytest.mark.parametrize("tau", [0.0, 0.15, 0.5])
def test_node_teleport_k4(tau):
    f = visit_rates_node_teleport(parse_edge_list(K4), tau)
    np.testing.assert_allclose(f.visit_rate, 0.25, atol=1e-12)
    check_marginals(f)


def test_node_teleport_zero_matches_raw(toy8):
    f = visit_rates_node_teleport(toy8, 0.0)
    np.testing.assert_allclose(f.visit_rate, TOY8_P, atol=1e-10)


def test_node_teleport_bipartite_zero_converges():
    # a 4-cycle is periodic; the plain iteration would oscillate
    g = parse_edge_list("a b\nb c\nc d\nd a\n")
    f = visit_rates_node_teleport(g, 0.0)
    np.testing.assert_allclose(f.visit_rate, 0.25, atol=1e-10)


@pytest.mark.parametrize("fn", [visit_rates_node_teleport,
                                visit_rates_link_teleport])
def test_directed_two_cycle(fn):
    g = parse_edge_list("a b\nb a\n", directed=True)
    np.testing.assert_allclose(fn(g, 0.15).visit_rate, [0.5, 0.5], atol=1e-12)


def test_node_teleport_dangling():
    g = parse_edge_list("a b\nb c\n", directed=True)
    f = visit_rates_node_teleport(g, 0.15)
    check_marginals(f)
    assert f.teleport[2] == pytest.approx(f.visit_rate[2])


def test_convergence_error():
    rng = np.random.default_rng(0)
    g = random_graph(rng, 30, 0.2, directed=True, connected=True)
    with pytest.raises(ConvergenceError) as exc:
        visit_rates_node_teleport(g, 0.15, tol=1e-300, max_iter=3)
    assert exc.value.iterations == 3
    assert exc.value.residual > 0


@pytest.mark.parametrize("tau", [0.0, 1.0])
def test_link_teleport_rate_domain(toy8, tau):
    with pytest.raises(ValueError):
        visit_rates_link_teleport(toy8, tau)


def test_link_teleport_toy8(toy8):
    f = visit_rates_link_teleport(toy8, 0.15)
    np.testing.assert_allclose(f.visit_rate, TOY8_P, atol=1e-9)
    assert not f.teleport.any()


def test_link_teleport_strength_proportional():
    rng = np.random.default_rng(7)
    for _ in range(10):
        g = random_graph(rng, 25, 0.15, weighted=True, connected=True)
        f = visit_rates_link_teleport(g, 0.15)
        np.testing.assert_allclose(f.visit_rate, g.strength / g.strength.sum(),
                                   atol=1e-9)


@settings(max_examples=25, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([RAW, NODE_TELEPORT,
                                                LINK_TELEPORT]))
def test_marginals_property(seed, model):
    rng = np.random.default_rng(seed)
    directed = model != RAW and bool(rng.integers(2))
    g = random_graph(rng, 12, 0.25, directed=directed, weighted=True,
                     connected=True)
    check_marginals(compute_flow(g, model, 0.15))


def test_model_tags(toy8):
    assert compute_flow(toy8).model_tag == "raw"
    assert compute_flow(toy8, NODE_TELEPORT, 0.15).model_tag == \
        "node-teleport(0.15)"


def test_unknown_model(toy8):
    with pytest.raises(ValueError):
        compute_flow(toy8, "lazy")


# ----------------------------------------------------------------------
# aggregation

def test_aggregate_m_opt(toy8, m_opt):
    pf = aggregate_partition_flows(compute_flow(toy8), m_opt)
    np.testing.assert_allclose(pf.exit, [0.05, 0.05], atol=1e-12)
    np.testing.assert_allclose(pf.enter, [0.05, 0.05], atol=1e-12)
    np.testing.assert_allclose(pf.flow, [0.55, 0.45], atol=1e-12)
    np.testing.assert_allclose(pf.usage, [0.60, 0.50], atol=1e-12)
    assert pf.index_usage == pytest.approx(0.1)


def test_aggregate_m_sub(toy8, m_sub):
    pf = aggregate_partition_flows(compute_flow(toy8), m_sub)
    np.testing.assert_allclose(pf.exit, [0.15, 0.15], atol=1e-12)


def test_aggregate_one_level(toy8):
    pf = aggregate_partition_flows(compute_flow(toy8), Partition.one_level(8))
    assert pf.index_usage == 0.0
    assert pf.usage.tolist() == pytest.approx([1.0])


def test_node_flow_convention(toy8, m_opt):
    pf = aggregate_partition_flows(compute_flow(toy8), m_opt, NODE_FLOW)
    np.testing.assert_allclose(pf.usage, pf.flow)
    assert pf.with_convention(WITH_EXIT).usage == pytest.approx([0.6, 0.5])


def test_aggregate_size_mismatch(toy8):
    with pytest.raises(PartitionError):
        aggregate_partition_flows(compute_flow(toy8), Partition.one_level(7))


def test_unknown_convention(toy8, m_opt):
    with pytest.raises(ValueError):
        aggregate_partition_flows(compute_flow(toy8), m_opt, "both")


def test_nested_rates(toy8):
    m = Partition([(0, 0), (0, 0), (0, 1), (0, 1), (1,), (1,), (1,), (1,)])
    pf = aggregate_partition_flows(compute_flow(toy8), m)
    top = pf.module_rates((0,))
    assert top.exit == pytest.approx(0.05)
    assert top.flow == pytest.approx(0.55)
    # only top-level enter rates feed the root codebook
    assert pf.index_usage == pytest.approx(0.1)
    # leaf (0, 0) = nodes 1, 2: links 1-3, 1-4, 2-4 leave it
    assert pf.module_rates((0, 0)).exit == pytest.approx(0.15)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.sampled_from([RAW, NODE_TELEPORT,
                                                LINK_TELEPORT]))
def test_aggregate_matches_dense_oracle(seed, model):
    rng = np.random.default_rng(seed)
    directed = model != RAW and bool(rng.integers(2))
    g = random_graph(rng, 10, 0.3, directed=directed, connected=True)
    f = compute_flow(g, model, 0.15)
    m = random_partition(rng, g.n, 3)
    pf = aggregate_partition_flows(f, m)
    exit_, enter, flow = module_rates(f, m.leaf_of.tolist())
    k = m.num_modules
    np.testing.assert_allclose(pf.exit, [exit_[i] for i in range(k)], atol=1e-12)
    np.testing.assert_allclose(pf.enter, [enter[i] for i in range(k)], atol=1e-12)
    np.testing.assert_allclose(pf.flow, [flow[i] for i in range(k)], atol=1e-12)
    assert pf.enter.sum() == pytest.approx(pf.exit.sum(), abs=1e-9)
    assert pf.index_usage == pytest.approx(pf.enter.sum(), abs=1e-9)
    if not directed:
        np.testing.assert_allclose(pf.enter, pf.exit, atol=1e-9)
