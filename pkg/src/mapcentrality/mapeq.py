"""
Map equation codelengths and map equation centrality.

Map equation centrality of a node is the number of bits saved per step when
the node is silenced (its visits are no longer encoded) and the codebook of
its module is redesigned without it. Only the node's own module changes, so
the score depends on the node's visit rate ``p_u`` and the codebook usage
``p_m`` of its leaf module::

    lambda(u) = -(p_m - p_u) * log2((p_m - p_u) / p_m)
"""

from __future__ import annotations

from typing import Iterable

import numpy as np

from .flow import (WITH_EXIT, FlowField, PartitionFlows,
                   aggregate_partition_flows)
from .partition import Partition, PartitionError
from .ranking import CentralityVector


def plogp(x):
    """``x * log2(x)`` with ``0 log 0 = 0``; works on scalars and arrays."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    pos = x > 0
    out[pos] = x[pos] * np.log2(x[pos])
    return out if out.ndim else float(out)


def entropy(p) -> float:
    """Shannon entropy in bits of a distribution (normalised first)."""
    p = np.asarray(p, dtype=float)
    total = p.sum()
    if total <= 0:
        return 0.0
    return float(-plogp(p / total).sum())


def codelength_one_level(f: FlowField) -> float:
    """Entropy of the visit rates: the codelength of the one-level partition."""
    return float(-plogp(f.visit_rate).sum())


def codelength(f: FlowField, m: Partition) -> float:
    """
    Map equation codelength of a (possibly hierarchical) partition.

    Every codebook contributes ``usage * entropy(entries)``: the root uses
    the entry rates of the top modules, a nested super-module uses its own
    exit rate plus its children's entry rates, and a leaf module uses its
    exit rate plus its nodes' visit rates.
    """
    pf = aggregate_partition_flows(f, m, WITH_EXIT)
    return codelength_from_flows(pf)


def codelength_from_flows(pf: PartitionFlows) -> float:
    children: dict[tuple, list[float]] = {}
    for i, p in enumerate(pf.leaf_paths):
        children.setdefault(p[:-1], []).append(float(pf.enter[i]))
    for p, r in pf.internal.items():
        children.setdefault(p[:-1], []).append(r.enter)

    root = np.asarray(children.get((), []))
    total = float(plogp(root.sum()) - plogp(root).sum())

    for p, r in pf.internal.items():
        entries = np.asarray(children[p])
        total += float(plogp(r.exit + entries.sum()) - plogp(r.exit)
                       - plogp(entries).sum())

    k = pf.num_modules
    node_terms = np.bincount(pf.leaf_of, weights=plogp(pf.visit_rate),
                             minlength=k)
    empty = np.bincount(pf.leaf_of, minlength=k) == 0
    if empty.any():
        raise PartitionError("empty leaf module")
    total += float((plogp(pf.flow + pf.exit) - plogp(pf.exit)
                    - node_terms).sum())
    return total


# ----------------------------------------------------------------------
# centrality

def _silencing_gain(p_m, p_silenced):
    """``-(p_m - p_s) log2((p_m - p_s) / p_m)``, zero where ``p_m`` is zero."""
    p_m = np.asarray(p_m, dtype=float)
    rest = np.maximum(p_m - np.asarray(p_silenced, dtype=float), 0.0)
    out = np.zeros(np.broadcast(p_m, rest).shape)
    ok = (p_m > 0) & (rest > 0)
    rest_b = np.broadcast_to(rest, out.shape)
    pm_b = np.broadcast_to(p_m, out.shape)
    out[ok] = -rest_b[ok] * np.log2(rest_b[ok] / pm_b[ok])
    return out if out.ndim else float(out)


def mec_node(pf: PartitionFlows, u: int) -> float:
    """Map equation centrality of node ``u`` in bits."""
    if not 0 <= u < len(pf.leaf_of):
        raise PartitionError(f"node {u} not in partition")
    m = pf.leaf_of[u]
    return _silencing_gain(pf.usage[m], pf.visit_rate[u])


def mec_set(pf: PartitionFlows, nodes: Iterable[int]) -> float:
    """
    Joint map equation centrality of silencing all ``nodes`` at once: the
    per-module gains summed over modules that contain silenced nodes.
    """
    nodes = np.unique(np.fromiter(nodes, dtype=np.int64))
    if len(nodes) == 0:
        raise ValueError("node set must be non-empty")
    if nodes[0] < 0 or nodes[-1] >= len(pf.leaf_of):
        raise PartitionError("node set outside partition")
    mods = pf.leaf_of[nodes]
    silenced = np.bincount(mods, weights=pf.visit_rate[nodes],
                           minlength=pf.num_modules)
    hit = np.unique(mods)
    return float(np.sum(_silencing_gain(pf.usage[hit], silenced[hit])))


_BLOCK = 1 << 14


def mec_all(pf: PartitionFlows, flow_model: str | None = None
            ) -> CentralityVector:
    """Map equation centrality of every node in one linear pass."""
    p = pf.visit_rate
    n = len(p)
    out = np.empty(n)
    # cache-sized blocks with reused buffers keep temporaries out of
    # main memory
    b = min(n, _BLOCK)
    p_m, rest, bad = np.empty(b), np.empty(b), np.empty(b, dtype=bool)
    with np.errstate(divide="ignore", invalid="ignore"):
        for s in range(0, n, _BLOCK):
            e = min(n, s + _BLOCK)
            k = e - s
            pm_k, rest_k, bad_k, o = p_m[:k], rest[:k], bad[:k], out[s:e]
            # leaf ids are validated by Partition, so clipping never applies
            np.take(pf.usage, pf.leaf_of[s:e], out=pm_k, mode="clip")
            np.subtract(pm_k, p[s:e], out=rest_k)
            np.divide(rest_k, pm_k, out=o)
            np.log2(o, out=o)
            np.multiply(o, rest_k, out=o)
            np.negative(o, out=o)
            np.less_equal(rest_k, 0.0, out=bad_k)
            o[bad_k] = 0.0
    return CentralityVector(out, "mec", flow_model, pf.convention)


def map_equation_centrality(f: FlowField, m: Partition,
                            convention: str = WITH_EXIT) -> CentralityVector:
    pf = aggregate_partition_flows(f, m, convention)
    return mec_all(pf, f.model_tag)
