"""
Comparison centralities: degree, betweenness, PageRank, modularity
vitality, community hub-bridge and community-based centrality.
"""

from __future__ import annotations

from collections import deque

import numpy as np

from .flow import DEFAULT_TAU, visit_rates_node_teleport
from .graph import Graph
from .partition import Partition
from .partitioning import modularity
from .ranking import CentralityVector


def degree_centrality(g: Graph) -> CentralityVector:
    """Total unweighted degree divided by ``n - 1``."""
    if g.n < 2:
        raise ValueError("degree centrality needs at least two nodes")
    return CentralityVector(g.degree / (g.n - 1.0), "dc")


def betweenness_centrality(g: Graph, normalized: bool = True
                           ) -> CentralityVector:
    """
    Unweighted shortest-path betweenness (Brandes). Normalised by the
    number of node pairs not involving the node: ``(n-1)(n-2)/2`` when
    undirected, ``(n-1)(n-2)`` when directed.
    """
    n = g.n
    adj = g.neighbor_lists("out")
    cb = np.zeros(n)
    for s in range(n):
        stack = []
        preds: list[list[int]] = [[] for _ in range(n)]
        sigma = np.zeros(n)
        sigma[s] = 1.0
        dist = np.full(n, -1, dtype=np.int64)
        dist[s] = 0
        queue = deque([s])
        while queue:
            v = queue.popleft()
            stack.append(v)
            dv = dist[v]
            for w in adj[v].tolist():
                if dist[w] < 0:
                    dist[w] = dv + 1
                    queue.append(w)
                if dist[w] == dv + 1:
                    sigma[w] += sigma[v]
                    preds[w].append(v)
        delta = np.zeros(n)
        while stack:
            w = stack.pop()
            coeff = (1.0 + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                cb[w] += delta[w]
    if not g.directed:
        cb /= 2.0
    if normalized and n > 2:
        pairs = (n - 1) * (n - 2)
        cb /= pairs if g.directed else pairs / 2.0
    return CentralityVector(cb, "bc")


def pagerank(g: Graph, tau: float = DEFAULT_TAU, **kwargs) -> CentralityVector:
    """Visit rates under recorded node teleportation."""
    f = visit_rates_node_teleport(g, tau, **kwargs)
    return CentralityVector(f.visit_rate, "pr", f.model_tag)


def modularity_vitality(g: Graph, m: Partition, signed: bool = False
                        ) -> CentralityVector:
    """
    Change in modularity when a node and its links are deleted,
    ``Q(G, M) - Q(G - u, M - u)``; absolute value unless ``signed``.

    Uses per-node incremental updates of the module totals, so the cost is
    linear in the number of links.
    """
    q = modularity(g, m)
    lab = m.leaf_of
    k = m.num_modules
    L = g.total_weight
    internal = lab[g.sources] == lab[g.targets]
    e = np.bincount(lab[g.sources[internal]], weights=g.weights[internal],
                    minlength=k)
    adj = g.adjacency.tocsr()
    out = np.zeros(g.n)

    if not g.directed:
        d = np.bincount(lab, weights=g.strength, minlength=k)
        sum_e, sum_d2 = e.sum(), (d ** 2).sum()
        for u in range(g.n):
            a = lab[u]
            nbr = adj.indices[adj.indptr[u]:adj.indptr[u + 1]]
            w = adj.data[adj.indptr[u]:adj.indptr[u + 1]]
            s_u = w.sum()
            L2 = L - s_u
            if L2 <= 0:
                out[u] = q
                continue
            to_mod = np.bincount(lab[nbr], weights=w, minlength=k)
            hit = np.union1d(np.flatnonzero(to_mod), [a])
            d_new = d[hit] - to_mod[hit]
            d_new[np.searchsorted(hit, a)] -= s_u
            d2 = sum_d2 - (d[hit] ** 2).sum() + (d_new ** 2).sum()
            e2 = sum_e - to_mod[a]
            out[u] = q - (e2 / L2 - d2 / (4 * L2 ** 2))
    else:
        d_out = np.bincount(lab, weights=g.out_strength, minlength=k)
        d_in = np.bincount(lab, weights=g.in_strength, minlength=k)
        sum_e, sum_dd = e.sum(), (d_out * d_in).sum()
        adj_in = g.adjacency.T.tocsr()
        for u in range(g.n):
            a = lab[u]
            onb = adj.indices[adj.indptr[u]:adj.indptr[u + 1]]
            ow = adj.data[adj.indptr[u]:adj.indptr[u + 1]]
            inb = adj_in.indices[adj_in.indptr[u]:adj_in.indptr[u + 1]]
            iw = adj_in.data[adj_in.indptr[u]:adj_in.indptr[u + 1]]
            L2 = L - ow.sum() - iw.sum()
            if L2 <= 0:
                out[u] = q
                continue
            to_mod = np.bincount(lab[onb], weights=ow, minlength=k)
            from_mod = np.bincount(lab[inb], weights=iw, minlength=k)
            hit = np.union1d(np.flatnonzero(to_mod), np.flatnonzero(from_mod))
            hit = np.union1d(hit, [a])
            do_new = d_out[hit] - from_mod[hit]
            di_new = d_in[hit] - to_mod[hit]
            ia = np.searchsorted(hit, a)
            do_new[ia] -= ow.sum()
            di_new[ia] -= iw.sum()
            dd = sum_dd - (d_out[hit] * d_in[hit]).sum() + (do_new * di_new).sum()
            e2 = sum_e - to_mod[a] - from_mod[a]
            out[u] = q - (e2 / L2 - dd / L2 ** 2)
    if not signed:
        out = np.abs(out)
    return CentralityVector(out, "mv")


def module_link_profile(g: Graph, m: Partition):
    """
    Per-node neighbour counts by module.

    Returns ``(k_own, k_outside, nnc, per_module)`` where ``per_module`` is a
    list of ``{module: count}`` dicts. Directed graphs use out-neighbours.
    """
    lab = m.leaf_of
    nbrs = g.neighbor_lists("out")
    k_own = np.zeros(g.n)
    k_out = np.zeros(g.n)
    nnc = np.zeros(g.n)
    per_module = []
    for u in range(g.n):
        mods, counts = np.unique(lab[nbrs[u]], return_counts=True)
        prof = dict(zip(mods.tolist(), counts.tolist()))
        per_module.append(prof)
        own = prof.get(int(lab[u]), 0)
        k_own[u] = own
        k_out[u] = len(nbrs[u]) - own
        nnc[u] = len(prof) - (1 if own else 0)
    return k_own, k_out, nnc, per_module


def community_hub_bridge(g: Graph, m: Partition, literal: bool = False
                         ) -> CentralityVector:
    """
    ``|m_u| * k_u^{own} + NNC_u * k_u^{outside}``.

    With ``literal=True`` the first term sums ``|m| * k_u^m`` over every
    module instead of only the node's own module.
    """
    sizes = m.module_sizes
    lab = m.leaf_of
    k_own, k_out, nnc, prof = module_link_profile(g, m)
    if literal:
        intra = np.array([sum(sizes[mod] * c for mod, c in p.items())
                          for p in prof], dtype=float)
    else:
        intra = sizes[lab] * k_own
    return CentralityVector(intra + nnc * k_out, "chb")


def community_based_centrality(g: Graph, m: Partition) -> CentralityVector:
    """``sum_m k_u^m * |m| / N`` over out-neighbours."""
    sizes = m.module_sizes
    _, _, _, prof = module_link_profile(g, m)
    scores = np.array([sum(sizes[mod] * c for mod, c in p.items())
                       for p in prof], dtype=float) / g.n
    return CentralityVector(scores, "cbc")
