"""
Spreading processes used to judge centrality rankings: the linear threshold
model, discrete-time SIR with unit recovery time, the imprecision function
and the perplexity of a node selection over modules.
"""

from __future__ import annotations

import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .graph import Graph, epidemic_threshold
from .mapeq import entropy
from .partition import Partition
from .ranking import rank_nodes, top_count


@dataclass(frozen=True)
class LtConfig:
    threshold: float = 0.5
    seed_fraction: float = 0.0
    synchronous: bool = True

    def __post_init__(self):
        if not 0.0 < self.threshold <= 1.0:
            raise ValueError("threshold must lie in (0, 1]")
        if not 0.0 <= self.seed_fraction <= 1.0:
            raise ValueError("seed_fraction must lie in [0, 1]")
        if not self.synchronous:
            raise ValueError("only synchronous updates are supported")


@dataclass(frozen=True)
class SirConfig:
    p: float = 0.1
    repetitions: int = 1000
    seed: int = 0

    def __post_init__(self):
        if not 0.0 <= self.p <= 1.0:
            raise ValueError("infection probability must lie in [0, 1]")
        if self.repetitions < 1:
            raise ValueError("repetitions must be at least 1")

    @classmethod
    def at_threshold(cls, g: Graph, **kwargs) -> "SirConfig":
        """Infection probability set to the epidemic threshold (clamped)."""
        p = min(1.0, max(0.0, epidemic_threshold(g)))
        return cls(p=p, **kwargs)


@dataclass(frozen=True)
class SpreadOutcome:
    value: float
    steps: int = 0
    counts: list = field(default_factory=list)
    active: np.ndarray | None = None


# ----------------------------------------------------------------------
# linear threshold

def linear_threshold(g: Graph, seeds: Iterable[int], t: float = 0.5,
                     direction: str = "in") -> SpreadOutcome:
    """
    Synchronous linear threshold cascade.

    Each round, every inactive node with at least one neighbour becomes
    active if the active fraction of its neighbours is at least ``t``.
    Directed graphs look at in-neighbours by default (``direction="out"``
    flips this). The outcome value is the final active fraction and
    ``steps`` counts the rounds that activated someone.
    """
    LtConfig(threshold=t)
    n = g.n
    active = np.zeros(n, dtype=bool)
    active[np.fromiter(seeds, dtype=np.int64)] = True
    mode = "all" if not g.directed else direction
    a = g._out_csr if mode in ("out", "all") else g._in_csr
    a = (a > 0).astype(float).tocsr()
    k = np.asarray(a.sum(axis=1)).ravel()
    has_nbr = k > 0
    rounds = 0
    for _ in range(n):
        frac = np.zeros(n)
        frac[has_nbr] = (a @ active.astype(float))[has_nbr] / k[has_nbr]
        new = ~active & has_nbr & (frac >= t - 1e-12)
        if not new.any():
            break
        active |= new
        rounds += 1
    return SpreadOutcome(float(active.mean()) if n else 0.0, rounds,
                         [int(active.sum())], active)


def lt_activation_by_ranking(g: Graph, scores, x: float, t: float = 0.5,
                             direction: str = "in") -> float:
    """Activation size when the top ``ceil(x n)`` nodes by score are seeds."""
    seeds = rank_nodes(scores)[:top_count(x, g.n)]
    return linear_threshold(g, seeds, t, direction).value


# ----------------------------------------------------------------------
# SIR

def _sir_counts(nbrs: list, u: int, cfg: SirConfig) -> np.ndarray:
    n = len(nbrs)
    counts = np.empty(cfg.repetitions, dtype=np.int64)
    p = cfg.p
    for rep in range(cfg.repetitions):
        if p == 0.0:
            counts[rep] = 1
            continue
        rng = np.random.default_rng([cfg.seed, u, rep])
        state = np.zeros(n, dtype=np.int8)  # 0 S, 1 I, 2 R
        state[u] = 1
        infected = [u]
        recovered = 0
        while infected:
            nxt = []
            for v in infected:
                nb = nbrs[v]
                if len(nb) == 0:
                    continue
                sus = nb[state[nb] == 0]
                if len(sus) == 0:
                    continue
                hit = sus[rng.random(len(sus)) < p]
                state[hit] = 1
                nxt.extend(hit.tolist())
            state[infected] = 2
            recovered += len(infected)
            infected = nxt
        counts[rep] = recovered
    return counts


def sir_counts(g: Graph, u: int, cfg: SirConfig) -> np.ndarray:
    """Recovered-node counts of each repetition seeded at ``u``."""
    return _sir_counts(g.neighbor_lists("out"), int(u), cfg)


def sir_spreading_power(g: Graph, u: int, cfg: SirConfig) -> float:
    """
    Mean number of recovered nodes (seed included) of a discrete-time SIR
    process started at ``u``: each infected node infects each susceptible
    out-neighbour with probability ``p`` and recovers after one step.

    Repetition ``r`` draws from a generator seeded with ``(seed, u, r)``.
    """
    return float(sir_counts(g, u, cfg).mean())


def _power_worker(args):
    nbrs, nodes, cfg = args
    return [float(_sir_counts(nbrs, u, cfg).mean()) for u in nodes]


def default_workers() -> int:
    return int(os.environ.get("MAPCENTRALITY_THREADS", "1"))


def spreading_powers(g: Graph, cfg: SirConfig,
                     nodes: Sequence[int] | None = None,
                     workers: int | None = None) -> np.ndarray:
    """SIR spreading power of every node in ``nodes`` (default: all).
    Results do not depend on ``workers``."""
    nodes = list(range(g.n)) if nodes is None else [int(u) for u in nodes]
    workers = default_workers() if workers is None else workers
    nbrs = g.neighbor_lists("out")
    if workers <= 1 or len(nodes) < 2:
        return np.asarray(_power_worker((nbrs, nodes, cfg)))
    chunks = [nodes[i::workers] for i in range(workers)]
    out = np.empty(len(nodes))
    with ProcessPoolExecutor(max_workers=workers) as ex:
        results = ex.map(_power_worker, [(nbrs, c, cfg) for c in chunks])
        for i, res in enumerate(results):
            out[i::workers] = res
    return out


# ----------------------------------------------------------------------
# evaluation measures

def imprecision(ranking: Sequence[int], power, x: float) -> float:
    """
    ``1 - M_c(x) / M_SIR(x)``: one minus the mean power of the top
    ``ceil(x n)`` nodes of ``ranking`` relative to the mean power of the true
    top nodes. Not clamped; ties in ``power`` can make it negative.
    """
    power = np.asarray(power, dtype=float)
    k = top_count(x, len(power))
    if k < 1:
        raise ValueError(f"x={x} selects no nodes out of {len(power)}")
    ranking = np.asarray(ranking, dtype=np.int64)
    m_c = power[ranking[:k]].mean()
    m_sir = np.sort(power)[::-1][:k].mean()
    return float(1.0 - m_c / m_sir)


def selection_perplexity(m: Partition, selected: Iterable[int]) -> float:
    """``2**H`` of how the selected nodes distribute over leaf modules."""
    sel = np.fromiter(selected, dtype=np.int64)
    if len(sel) == 0:
        raise ValueError("selection must be non-empty")
    counts = np.bincount(m.leaf_of[sel], minlength=m.num_modules)
    return float(2.0 ** entropy(counts))
