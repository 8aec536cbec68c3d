"""
Random-walk flow models and their aggregation over partitions.

Three models are supported:

``raw``
    Undirected graphs only; visit rates are proportional to node strength.
``node-teleport``
    PageRank. With rate ``tau`` the walker jumps to a uniformly chosen node
    (dangling nodes always jump). Teleportation steps are *recorded*: they
    are part of the encoded flow.
``link-teleport``
    Unrecorded link teleportation. With rate ``tau`` the walker jumps to the
    head of a link chosen proportionally to its weight. Only the link-following
    steps are encoded, so visit rates are the in-flow of those steps.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy import sparse as sp

from .graph import Graph, GraphError
from .partition import Partition, PartitionError

RAW = "raw"
NODE_TELEPORT = "node-teleport"
LINK_TELEPORT = "link-teleport"
FLOW_MODELS = (RAW, LINK_TELEPORT, NODE_TELEPORT)

WITH_EXIT = "with-exit"
NODE_FLOW = "node-flow"
CONVENTIONS = (WITH_EXIT, NODE_FLOW)

DEFAULT_TAU = 0.15
DEFAULT_TOL = 1e-12
DEFAULT_MAX_ITER = 10_000


class ConvergenceError(RuntimeError):
    """Power iteration did not reach the tolerance."""

    def __init__(self, residual: float, iterations: int):
        super().__init__(f"power iteration did not converge after "
                         f"{iterations} iterations (residual {residual:.3e})")
        self.residual = residual
        self.iterations = iterations


@dataclass(frozen=True)
class FlowField:
    """
    Node visit rates plus recorded per-arc flow.

    ``teleport[u]`` is the recorded flow leaving ``u`` by teleportation; it
    lands uniformly on all ``n`` nodes. It is zero for models without
    recorded teleportation. Arc flows plus teleport flows sum to one and the
    in-flow of every node equals its visit rate.
    """

    visit_rate: np.ndarray
    arc_src: np.ndarray
    arc_dst: np.ndarray
    arc_flow: np.ndarray
    teleport: np.ndarray
    model: str = RAW
    tau: float = 0.0

    @property
    def n(self) -> int:
        return len(self.visit_rate)

    @property
    def model_tag(self) -> str:
        return self.model if self.model == RAW else f"{self.model}({self.tau:g})"

    def in_flow(self) -> np.ndarray:
        """Recorded flow into each node (equals ``visit_rate``)."""
        inflow = np.bincount(self.arc_dst, weights=self.arc_flow,
                             minlength=self.n)
        return inflow + self.teleport.sum() / self.n

    def dense_link_flow(self) -> np.ndarray:
        """``n x n`` matrix of recorded step flow including teleportation.
        Intended for small graphs."""
        f = np.zeros((self.n, self.n))
        np.add.at(f, (self.arc_src, self.arc_dst), self.arc_flow)
        f += self.teleport[:, None] / self.n
        return f


def _empty_check(g: Graph):
    if g.n == 0 or g.link_count == 0:
        raise GraphError("flow needs a graph with at least one link")


def visit_rates_undirected(g: Graph) -> FlowField:
    """Analytic stationary flow ``p_u = s_u / sum(s)`` of an undirected
    graph."""
    if g.directed:
        raise GraphError("raw flow is only defined for undirected graphs; "
                         "use a teleportation model")
    _empty_check(g)
    src, dst, w = g.arcs
    total = w.sum()
    p = g.strength / total
    return FlowField(p, src, dst, w / total, np.zeros(g.n), RAW, 0.0)


def _row_normalised(g: Graph):
    a = g.adjacency
    s = g.out_strength
    dangling = s == 0
    inv = np.zeros_like(s)
    inv[~dangling] = 1.0 / s[~dangling]
    return sp.diags(inv) @ a, dangling


def _power_iterate(step, p0, tol, max_iter, lazy=False):
    p = p0
    residual = np.inf
    for it in range(1, max_iter + 1):
        q = step(p)
        if lazy:
            q = 0.5 * (p + q)
        q /= q.sum()
        residual = float(np.abs(q - p).sum())
        p = q
        if residual < tol:
            return p
    raise ConvergenceError(residual, max_iter)


def visit_rates_node_teleport(g: Graph, tau: float = DEFAULT_TAU,
                              tol: float = DEFAULT_TOL,
                              max_iter: int = DEFAULT_MAX_ITER) -> FlowField:
    """
    PageRank flow with recorded uniform node teleportation.

    :param tau: teleportation rate in ``[0, 1)``; ``0`` needs a strongly
        connected graph
    :raises ConvergenceError: if the L1 change stays above ``tol``
    """
    if not 0.0 <= tau < 1.0:
        raise ValueError("tau must lie in [0, 1)")
    _empty_check(g)
    n = g.n
    pt, dangling = _row_normalised(g)
    ptT = pt.T.tocsr()

    def step(p):
        jump = tau * p[~dangling].sum() + p[dangling].sum()
        return (1.0 - tau) * (ptT @ p) + jump / n

    # tau = 0 may leave a periodic chain; the lazy walk has the same
    # stationary vector and always converges
    p = _power_iterate(step, np.full(n, 1.0 / n), tol, max_iter,
                       lazy=tau == 0.0)
    src, dst, w = g.arcs
    s = g.out_strength
    arc = p[src] * (1.0 - tau) * w / s[src]
    tele = np.where(dangling, p, tau * p)
    return FlowField(p, src, dst, arc, tele, NODE_TELEPORT, float(tau))


def visit_rates_link_teleport(g: Graph, tau: float = DEFAULT_TAU,
                              tol: float = DEFAULT_TOL,
                              max_iter: int = DEFAULT_MAX_ITER) -> FlowField:
    """
    Flow under unrecorded link teleportation.

    The auxiliary walk follows out-links with probability ``1 - tau`` and
    otherwise jumps to the head of a weight-proportionally chosen link.
    Only link-following steps are recorded.

    :param tau: teleportation rate in ``(0, 1)``
    """
    if not 0.0 < tau < 1.0:
        raise ValueError("tau must lie in (0, 1)")
    _empty_check(g)
    n = g.n
    pt, dangling = _row_normalised(g)
    ptT = pt.T.tocsr()
    land = g.in_strength / g.in_strength.sum()

    def step(a):
        jump = tau * a[~dangling].sum() + a[dangling].sum()
        return (1.0 - tau) * (ptT @ a) + jump * land

    alpha = _power_iterate(step, np.full(n, 1.0 / n), tol, max_iter)
    src, dst, w = g.arcs
    s = g.out_strength
    arc = alpha[src] * (1.0 - tau) * w / s[src]
    arc /= arc.sum()
    p = np.bincount(dst, weights=arc, minlength=n)
    return FlowField(p, src, dst, arc, np.zeros(n), LINK_TELEPORT, float(tau))


def compute_flow(g: Graph, model: str = RAW, tau: float = DEFAULT_TAU,
                 tol: float = DEFAULT_TOL,
                 max_iter: int = DEFAULT_MAX_ITER) -> FlowField:
    """Dispatch on the flow model name."""
    if model == RAW:
        return visit_rates_undirected(g)
    if model == NODE_TELEPORT:
        return visit_rates_node_teleport(g, tau, tol, max_iter)
    if model == LINK_TELEPORT:
        return visit_rates_link_teleport(g, tau, tol, max_iter)
    raise ValueError(f"unknown flow model {model!r}; choose from {FLOW_MODELS}")


# ----------------------------------------------------------------------
# aggregation over partitions

@dataclass(frozen=True)
class ModuleFlow:
    enter: float
    exit: float
    flow: float


@dataclass(frozen=True)
class PartitionFlows:
    """
    Module-level rates of a flow field under a partition.

    Leaf-module arrays are indexed by ``Partition.leaf_of``. ``usage`` holds
    the codebook usage rate ``p_m`` under ``convention``: node flow plus exit
    rate for ``with-exit``, node flow alone for ``node-flow``.
    ``internal`` maps paths of nested super-modules to their rates.
    """

    visit_rate: np.ndarray
    leaf_of: np.ndarray
    leaf_paths: list
    enter: np.ndarray
    exit: np.ndarray
    flow: np.ndarray
    usage: np.ndarray
    index_usage: float
    convention: str = WITH_EXIT
    internal: dict = field(default_factory=dict)

    @property
    def num_modules(self) -> int:
        return len(self.leaf_paths)

    def with_convention(self, convention: str) -> "PartitionFlows":
        usage = _usage(self.flow, self.exit, convention)
        return PartitionFlows(self.visit_rate, self.leaf_of, self.leaf_paths,
                              self.enter, self.exit, self.flow, usage,
                              self.index_usage, convention, self.internal)

    def module_rates(self, path: tuple) -> ModuleFlow:
        """Rates of any module, leaf or internal, by path."""
        if path in self.internal:
            return self.internal[path]
        i = self.leaf_paths.index(path)
        return ModuleFlow(float(self.enter[i]), float(self.exit[i]),
                          float(self.flow[i]))


def _usage(flow, exit_, convention):
    if convention == WITH_EXIT:
        return flow + exit_
    if convention == NODE_FLOW:
        return flow.copy()
    raise ValueError(f"unknown convention {convention!r}; "
                     f"choose from {CONVENTIONS}")


def _boundary_rates(f: FlowField, lab: np.ndarray, k: int, sizes: np.ndarray):
    """Enter/exit/flow for modules labelled ``0..k-1`` (``-1`` = outside all)."""
    a, b = lab[f.arc_src], lab[f.arc_dst]
    cross = a != b
    out_a = cross & (a >= 0)
    in_b = cross & (b >= 0)
    exit_ = np.bincount(a[out_a], weights=f.arc_flow[out_a], minlength=k)
    enter = np.bincount(b[in_b], weights=f.arc_flow[in_b], minlength=k)
    inside = lab >= 0
    flow = np.bincount(lab[inside], weights=f.visit_rate[inside], minlength=k)
    if f.teleport.any():
        n = f.n
        tel_m = np.bincount(lab[inside], weights=f.teleport[inside],
                            minlength=k)
        total = f.teleport.sum()
        exit_ = exit_ + tel_m * (n - sizes) / n
        enter = enter + (total - tel_m) * sizes / n
    return enter, exit_, flow


def aggregate_partition_flows(f: FlowField, m: Partition,
                              convention: str = WITH_EXIT) -> PartitionFlows:
    """
    Aggregate a flow field into module enter, exit and node-flow rates at
    every level of the module tree.

    :raises PartitionError: if the partition does not cover the flow's nodes
    """
    if m.n != f.n:
        raise PartitionError(f"partition covers {m.n} nodes, graph has {f.n}")
    leaf_of = m.leaf_of
    k = m.num_modules
    sizes = np.bincount(leaf_of, minlength=k)
    enter, exit_, flow = _boundary_rates(f, leaf_of, k, sizes)

    internal: dict[tuple, ModuleFlow] = {}
    for d in range(1, m.depth):
        index: dict[tuple, int] = {}
        lab = np.full(m.n, -1, dtype=np.int64)
        for u, p in enumerate(m.paths):
            if len(p) > d:
                lab[u] = index.setdefault(p[:d], len(index))
        if not index:
            continue
        sz = np.bincount(lab[lab >= 0], minlength=len(index))
        en, ex, fl = _boundary_rates(f, lab, len(index), sz)
        for path, i in index.items():
            internal[path] = ModuleFlow(float(en[i]), float(ex[i]),
                                        float(fl[i]))

    top: dict[tuple, float] = {}
    for i, p in enumerate(m.leaf_paths):
        if len(p) == 1:
            top[p] = float(enter[i])
    for p, r in internal.items():
        if len(p) == 1:
            top[p] = r.enter
    q = float(sum(top.values()))

    return PartitionFlows(f.visit_rate, leaf_of, m.leaf_paths, enter, exit_,
                          flow, _usage(flow, exit_, convention), q,
                          convention, internal)
