"""
Greedy two-level map equation search and partition statistics.

The search is Louvain-style: every node starts in its own module, nodes are
moved to the neighbouring module that shortens the codelength the most until
no move helps, modules are then collapsed into super-nodes and the procedure
repeats on the coarser network. The best of several seeded runs is kept.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .flow import FlowField
from .graph import Graph
from .mapeq import codelength, codelength_one_level, entropy, plogp
from .partition import Partition


@dataclass(frozen=True)
class SearchConfig:
    num_runs: int = 100
    seed: int = 0
    max_sweeps: int = 100
    min_gain: float = 1e-10

    def __post_init__(self):
        if self.num_runs < 1:
            raise ValueError("num_runs must be at least 1")
        if self.min_gain < 0:
            raise ValueError("min_gain must be non-negative")
        if self.max_sweeps < 1:
            raise ValueError("max_sweeps must be at least 1")


@dataclass(frozen=True)
class SearchResult:
    partition: Partition
    codelength: float
    one_level_codelength: float
    best_run: int
    run_codelengths: list = field(default_factory=list)

    @property
    def num_modules(self) -> int:
        return self.partition.num_modules


def _plogp(x: float) -> float:
    return x * np.log2(x) if x > 0 else 0.0


class _Level:
    """Super-node network with module bookkeeping for local moves."""

    def __init__(self, n_orig, flow, tele, size, src, dst, arc_flow):
        self.n_orig = n_orig
        self.flow = flow
        self.tele = tele
        self.size = size
        self.total_tele = float(tele.sum())
        N = len(flow)
        keep = (src != dst) & (arc_flow > 0)
        src, dst, arc_flow = src[keep], dst[keep], arc_flow[keep]
        key = src * N + dst
        uniq, inv = np.unique(key, return_inverse=True)
        w = np.zeros(len(uniq))
        np.add.at(w, inv, arc_flow)
        s, d = uniq // N, uniq % N
        self.out_total = np.bincount(s, weights=w, minlength=N)
        self.in_total = np.bincount(d, weights=w, minlength=N)
        self.out_arcs = _split(s, d, w, N)
        order = np.argsort(d, kind="stable")
        self.in_arcs = _split(d[order], s[order], w[order], N)
        self.N = N

        self.module = np.arange(N)
        self.m_flow = flow.astype(float).copy()
        self.m_tele = tele.astype(float).copy()
        self.m_size = size.astype(float).copy()
        self.m_exit_link = self.out_total.copy()
        self.m_enter_link = self.in_total.copy()
        self.m_members = np.ones(N, dtype=np.int64)
        self.free: list[int] = []

        enter = self._enter_full(self.m_enter_link, self.m_tele, self.m_size)
        exit_ = self._exit_full(self.m_exit_link, self.m_tele, self.m_size)
        self.sum_enter = float(enter.sum())
        self.sum_pl_enter = float(plogp(enter).sum())
        self.sum_pl_exit = float(plogp(exit_).sum())
        self.sum_pl_exit_flow = float(plogp(exit_ + self.m_flow).sum())

    def _exit_full(self, link, tele, size):
        if self.total_tele == 0:
            return link
        return link + tele * (self.n_orig - size) / self.n_orig

    def _enter_full(self, link, tele, size):
        if self.total_tele == 0:
            return link
        return link + (self.total_tele - tele) * size / self.n_orig

    def objective(self) -> float:
        """Codelength without the constant node-entropy term."""
        return (_plogp(self.sum_enter) - self.sum_pl_enter
                - self.sum_pl_exit + self.sum_pl_exit_flow)

    def _module_terms(self, enter_link, exit_link, flow, tele, size):
        enter = self._enter_full(enter_link, tele, size)
        exit_ = self._exit_full(exit_link, tele, size)
        return enter, _plogp(enter), _plogp(exit_), _plogp(exit_ + flow)

    def _move_delta(self, i, a, b, out_to, in_from):
        """Objective change and new module states for moving ``i`` a -> b."""
        fi, ti, si = self.flow[i], self.tele[i], self.size[i]
        oi, ii = self.out_total[i], self.in_total[i]
        oa, ia = out_to.get(a, 0.0), in_from.get(a, 0.0)
        ob, ib = out_to.get(b, 0.0), in_from.get(b, 0.0)

        new_a = (self.m_enter_link[a] - (ii - ia) + oa,
                 self.m_exit_link[a] - (oi - oa) + ia,
                 self.m_flow[a] - fi, self.m_tele[a] - ti, self.m_size[a] - si)
        new_b = (self.m_enter_link[b] - ob + (ii - ib),
                 self.m_exit_link[b] - ib + (oi - ob),
                 self.m_flow[b] + fi, self.m_tele[b] + ti, self.m_size[b] + si)
        old_a = self._module_terms(self.m_enter_link[a], self.m_exit_link[a],
                                   self.m_flow[a], self.m_tele[a],
                                   self.m_size[a])
        old_b = self._module_terms(self.m_enter_link[b], self.m_exit_link[b],
                                   self.m_flow[b], self.m_tele[b],
                                   self.m_size[b])
        na = self._module_terms(*new_a)
        nb = self._module_terms(*new_b)

        sum_enter = self.sum_enter - old_a[0] - old_b[0] + na[0] + nb[0]
        d_pl_enter = na[1] + nb[1] - old_a[1] - old_b[1]
        d_pl_exit = na[2] + nb[2] - old_a[2] - old_b[2]
        d_pl_exit_flow = na[3] + nb[3] - old_a[3] - old_b[3]
        delta = (_plogp(sum_enter) - _plogp(self.sum_enter) - d_pl_enter
                 - d_pl_exit + d_pl_exit_flow)
        return delta, (sum_enter, d_pl_enter, d_pl_exit, d_pl_exit_flow,
                       new_a, new_b)

    def _apply(self, i, a, b, state):
        sum_enter, d_en, d_ex, d_exf, new_a, new_b = state
        self.sum_enter = sum_enter
        self.sum_pl_enter += d_en
        self.sum_pl_exit += d_ex
        self.sum_pl_exit_flow += d_exf
        for m, (en, ex, fl, te, sz) in ((a, new_a), (b, new_b)):
            self.m_enter_link[m] = en
            self.m_exit_link[m] = ex
            self.m_flow[m] = fl
            self.m_tele[m] = te
            self.m_size[m] = sz
        self.m_members[a] -= 1
        self.m_members[b] += 1
        if self.m_members[a] == 0:
            self.m_enter_link[a] = self.m_exit_link[a] = 0.0
            self.m_flow[a] = self.m_tele[a] = self.m_size[a] = 0.0
            self.free.append(a)
        if b in self.free:
            self.free.remove(b)
        self.module[i] = b

    def sweep_all(self, rng, max_sweeps, min_gain) -> int:
        """Local moves until convergence; returns the number of moves."""
        active = np.flatnonzero(self.flow > 0)
        moves = 0
        for _ in range(max_sweeps):
            moved = 0
            for i in rng.permutation(active).tolist():
                a = int(self.module[i])
                out_to: dict[int, float] = {}
                in_from: dict[int, float] = {}
                nbrs, w = self.out_arcs[i]
                for j, x in zip(nbrs, w):
                    m = int(self.module[j])
                    out_to[m] = out_to.get(m, 0.0) + x
                nbrs, w = self.in_arcs[i]
                for j, x in zip(nbrs, w):
                    m = int(self.module[j])
                    in_from[m] = in_from.get(m, 0.0) + x
                candidates = set(out_to) | set(in_from)
                candidates.discard(a)
                if self.m_members[a] > 1 and self.free:
                    candidates.add(self.free[-1])
                best, best_state, best_m = -min_gain, None, a
                for b in sorted(candidates):
                    delta, state = self._move_delta(i, a, b, out_to, in_from)
                    if delta < best:
                        best, best_state, best_m = delta, state, b
                if best_state is not None:
                    self._apply(i, a, best_m, best_state)
                    moved += 1
            moves += moved
            if moved == 0:
                break
        return moves


def _split(keys, vals, w, N):
    """Group ``vals``/``w`` by sorted ``keys`` into per-index list pairs."""
    bounds = np.searchsorted(keys, np.arange(N + 1))
    v, x = vals.tolist(), w.tolist()
    return [(v[bounds[k]:bounds[k + 1]], x[bounds[k]:bounds[k + 1]])
            for k in range(N)]


def _single_run(f: FlowField, cfg: SearchConfig, rng) -> np.ndarray:
    n = f.n
    assign = np.arange(n)
    flow = f.visit_rate.astype(float)
    tele = f.teleport.astype(float)
    size = np.ones(n)
    src, dst, af = f.arc_src, f.arc_dst, f.arc_flow
    while True:
        level = _Level(n, flow, tele, size, src, dst, af)
        moves = level.sweep_all(rng, cfg.max_sweeps, cfg.min_gain)
        _, mod = np.unique(level.module, return_inverse=True)
        k = int(mod.max()) + 1
        if moves == 0 or k == level.N:
            break
        assign = mod[assign]
        flow = np.bincount(mod, weights=flow, minlength=k)
        tele = np.bincount(mod, weights=tele, minlength=k)
        size = np.bincount(mod, weights=size, minlength=k)
        src, dst = mod[src], mod[dst]
        if k == 1:
            break
    return assign


def optimize_two_level(g: Graph | None, f: FlowField,
                       cfg: SearchConfig = SearchConfig()) -> SearchResult:
    """
    Search for a two-level partition minimising the map equation.

    Runs ``cfg.num_runs`` randomised searches (run ``r`` seeded with
    ``cfg.seed + r``) and keeps the shortest codelength, ties going to the
    earliest run. Never returns a partition worse than the one-level
    partition. Nodes with zero visit rate stay in singleton modules.

    ``g`` is accepted for interface symmetry; the search uses the flow only.
    """
    if g is not None and g.n != f.n:
        raise ValueError("graph and flow disagree on node count")
    one = codelength_one_level(f)
    best = None
    lengths = []
    for run in range(cfg.num_runs):
        rng = np.random.default_rng(cfg.seed + run)
        labels = _single_run(f, cfg, rng)
        part = Partition.from_labels(labels).canonical()
        L = codelength(f, part)
        lengths.append(L)
        if best is None or L < best[1]:
            best = (part, L, run)

    part, L, run = best
    zero = f.visit_rate <= 0
    if L > one:
        lab = np.where(zero, np.arange(f.n) + 1, 0)
        part = Partition.from_labels(lab).canonical()
        L = codelength(f, part)
    elif zero.any():
        # zero-rate nodes cost nothing anywhere; isolate them
        lab = np.where(zero, part.leaf_of.max() + 1 + np.arange(f.n),
                       part.leaf_of)
        part = Partition.from_labels(lab).canonical()
        L = codelength(f, part)
    return SearchResult(part, L, one, run, lengths)


# ----------------------------------------------------------------------
# partition statistics

def effective_num_modules(m: Partition) -> float:
    """Perplexity ``2**H`` of the relative leaf-module sizes."""
    return float(2.0 ** entropy(m.module_sizes))


def mixing(g: Graph, m: Partition) -> float:
    """Fraction of links whose endpoints sit in different leaf modules."""
    if g.link_count == 0:
        raise ValueError("mixing needs at least one link")
    lab = m.leaf_of
    return float(np.mean(lab[g.sources] != lab[g.targets]))


def modularity(g: Graph, m: Partition) -> float:
    """
    Weighted Newman-Girvan modularity of the leaf modules;
    the directed variant uses in- and out-strength products.
    """
    if g.link_count == 0:
        raise ValueError("modularity needs at least one link")
    lab = m.leaf_of
    k = m.num_modules
    L = g.total_weight
    internal = lab[g.sources] == lab[g.targets]
    e = np.bincount(lab[g.sources[internal]], weights=g.weights[internal],
                    minlength=k)
    if g.directed:
        d_out = np.bincount(lab, weights=g.out_strength, minlength=k)
        d_in = np.bincount(lab, weights=g.in_strength, minlength=k)
        return float((e / L - d_out * d_in / L ** 2).sum())
    d = np.bincount(lab, weights=g.strength, minlength=k)
    return float((e / L - (d / (2 * L)) ** 2).sum())
