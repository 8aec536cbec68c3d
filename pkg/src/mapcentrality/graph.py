"""
Sparse network representation, edge-list ingestion, degree statistics,
link rewiring and the SIR epidemic threshold.
"""

from __future__ import annotations

import io
import logging
import math
from functools import cached_property
from typing import Iterable, Sequence, TextIO

import numpy as np
from scipy import sparse as sp

log = logging.getLogger(__name__)


class GraphError(Exception):
    """Raised for invalid graph input or impossible graph operations."""


class ParseError(GraphError):
    """Malformed edge-list line."""

    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


class RewiringError(GraphError):
    """Rewiring could not place a link within the retry bound."""


class Graph:
    """
    Immutable weighted graph with dense integer node ids.

    Undirected links are stored once, with ``source < target``; the
    adjacency matrix is symmetric. Parallel links are merged by summing
    their weights and self-loops are dropped (their count is kept in
    :attr:`self_loops_dropped`).

    :param labels: external node identifiers, indexed by dense id
    :param sources: link source ids
    :param targets: link target ids
    :param weights: positive link weights (default: all ones)
    :param directed: whether links are directed
    """

    def __init__(self, labels: Sequence[str], sources, targets, weights=None,
                 directed: bool = False):
        self.labels: list[str] = [str(x) for x in labels]
        self.directed = bool(directed)
        n = len(self.labels)

        src = np.asarray(sources, dtype=np.int64).reshape(-1)
        dst = np.asarray(targets, dtype=np.int64).reshape(-1)
        if weights is None:
            w = np.ones(len(src), dtype=float)
        else:
            w = np.asarray(weights, dtype=float).reshape(-1)
        if not (len(src) == len(dst) == len(w)):
            raise GraphError("sources, targets and weights differ in length")
        if len(src) and (src.min() < 0 or dst.min() < 0
                         or src.max() >= n or dst.max() >= n):
            raise GraphError("link endpoint outside node range")
        if np.any(~(w > 0)) or not np.all(np.isfinite(w)):
            raise GraphError("link weights must be finite and positive")

        loops = src == dst
        self.self_loops_dropped = int(loops.sum())
        if self.self_loops_dropped:
            log.warning("dropped %d self-loop(s)", self.self_loops_dropped)
            src, dst, w = src[~loops], dst[~loops], w[~loops]

        if not self.directed:
            src, dst = np.minimum(src, dst), np.maximum(src, dst)
        key = src * max(n, 1) + dst
        uniq, inv = np.unique(key, return_inverse=True)
        merged = np.zeros(len(uniq))
        np.add.at(merged, inv, w)
        self.sources = (uniq // max(n, 1)).astype(np.int64)
        self.targets = (uniq % max(n, 1)).astype(np.int64)
        self.weights = merged
        for arr in (self.sources, self.targets, self.weights):
            arr.setflags(write=False)

    # ------------------------------------------------------------------
    # construction helpers

    @classmethod
    def from_edges(cls, edges: Iterable[tuple], directed: bool = False,
                   labels: Sequence[str] | None = None) -> "Graph":
        """
        Build a graph from ``(u, v)`` or ``(u, v, w)`` tuples.

        Without ``labels`` the endpoints are treated as external labels and
        assigned dense ids in order of first appearance.
        """
        edges = list(edges)
        if labels is None:
            index: dict[str, int] = {}
            for e in edges:
                for x in e[:2]:
                    index.setdefault(str(x), len(index))
            labels = list(index)
            ids = [(index[str(e[0])], index[str(e[1])]) for e in edges]
        else:
            ids = [(int(e[0]), int(e[1])) for e in edges]
        w = [float(e[2]) if len(e) > 2 else 1.0 for e in edges]
        src = [a for a, _ in ids]
        dst = [b for _, b in ids]
        return cls(labels, src, dst, w, directed=directed)

    # ------------------------------------------------------------------
    # basic properties

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def link_count(self) -> int:
        return len(self.sources)

    @property
    def total_weight(self) -> float:
        return float(self.weights.sum())

    def index_of(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise KeyError(f"unknown node {label!r}") from None

    @cached_property
    def _index(self) -> dict[str, int]:
        return {lab: i for i, lab in enumerate(self.labels)}

    def __repr__(self):
        kind = "directed" if self.directed else "undirected"
        return f"<Graph {kind} n={self.n} links={self.link_count}>"

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (self.labels == other.labels
                and self.directed == other.directed
                and np.array_equal(self.sources, other.sources)
                and np.array_equal(self.targets, other.targets)
                and np.array_equal(self.weights, other.weights))

    __hash__ = None

    # ------------------------------------------------------------------
    # adjacency views

    @cached_property
    def adjacency(self) -> sp.csr_matrix:
        """Weighted adjacency; entry ``[u, v]`` is the weight of u->v.
        Symmetric for undirected graphs."""
        src, dst, w = self.arcs
        return sp.csr_matrix((w, (src, dst)), shape=(self.n, self.n))

    @cached_property
    def arcs(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Directed arcs ``(src, dst, weight)``; undirected links appear in
        both directions."""
        if self.directed:
            return self.sources, self.targets, self.weights
        return (np.concatenate([self.sources, self.targets]),
                np.concatenate([self.targets, self.sources]),
                np.concatenate([self.weights, self.weights]))

    @cached_property
    def _out_csr(self) -> sp.csr_matrix:
        a = self.adjacency.copy()
        a.sort_indices()
        return a

    @cached_property
    def _in_csr(self) -> sp.csr_matrix:
        a = self.adjacency.T.tocsr()
        a.sort_indices()
        return a

    def out_neighbors(self, u: int) -> np.ndarray:
        a = self._out_csr
        return a.indices[a.indptr[u]:a.indptr[u + 1]]

    def in_neighbors(self, u: int) -> np.ndarray:
        a = self._in_csr
        return a.indices[a.indptr[u]:a.indptr[u + 1]]

    def neighbors(self, u: int) -> np.ndarray:
        """Neighbours ignoring direction."""
        if not self.directed:
            return self.out_neighbors(u)
        return np.union1d(self.out_neighbors(u), self.in_neighbors(u))

    def neighbor_lists(self, mode: str = "out") -> list[np.ndarray]:
        """Per-node neighbour arrays; ``mode`` is ``out``, ``in`` or ``all``."""
        if mode == "out":
            a = self._out_csr
        elif mode == "in":
            a = self._in_csr
        elif mode == "all":
            if not self.directed:
                a = self._out_csr
            else:
                return [self.neighbors(u) for u in range(self.n)]
        else:
            raise ValueError(f"unknown neighbour mode {mode!r}")
        return [a.indices[a.indptr[u]:a.indptr[u + 1]] for u in range(self.n)]

    # ------------------------------------------------------------------
    # strengths and degrees

    @cached_property
    def out_strength(self) -> np.ndarray:
        src, _, w = self.arcs
        return np.bincount(src, weights=w, minlength=self.n)

    @cached_property
    def in_strength(self) -> np.ndarray:
        _, dst, w = self.arcs
        return np.bincount(dst, weights=w, minlength=self.n)

    @property
    def strength(self) -> np.ndarray:
        """Sum of incident weights (in + out for directed graphs)."""
        if self.directed:
            return self.out_strength + self.in_strength
        return self.out_strength

    @cached_property
    def degree(self) -> np.ndarray:
        """Unweighted total degree (in + out link count when directed)."""
        return (np.bincount(self.sources, minlength=self.n)
                + np.bincount(self.targets, minlength=self.n))

    @cached_property
    def out_degree(self) -> np.ndarray:
        src, _, _ = self.arcs
        return np.bincount(src, minlength=self.n)

    @cached_property
    def in_degree(self) -> np.ndarray:
        _, dst, _ = self.arcs
        return np.bincount(dst, minlength=self.n)

    def degree_stats(self) -> "DegreeStats":
        k = self.degree.astype(float)
        return DegreeStats(mean_degree=float(k.mean()),
                           mean_square_degree=float((k ** 2).mean()))

    def edge_set(self) -> set[tuple[int, int]]:
        return set(zip(self.sources.tolist(), self.targets.tolist()))

    def without_node(self, u: int) -> "Graph":
        """Copy with node ``u`` and its incident links removed."""
        keep = (self.sources != u) & (self.targets != u)
        remap = np.arange(self.n)
        remap[u + 1:] -= 1
        labels = self.labels[:u] + self.labels[u + 1:]
        return Graph(labels, remap[self.sources[keep]],
                     remap[self.targets[keep]], self.weights[keep],
                     directed=self.directed)


class DegreeStats:
    """First and second moment of the unweighted degree sequence."""

    __slots__ = ("mean_degree", "mean_square_degree")

    def __init__(self, mean_degree: float, mean_square_degree: float):
        self.mean_degree = mean_degree
        self.mean_square_degree = mean_square_degree

    def __repr__(self):
        return (f"DegreeStats(mean_degree={self.mean_degree!r}, "
                f"mean_square_degree={self.mean_square_degree!r})")


# ----------------------------------------------------------------------
# edge-list IO

def parse_edge_list(text: str | TextIO, directed: bool = False) -> Graph:
    """
    Parse a whitespace-separated edge list.

    Each non-blank line not starting with ``#`` holds ``source target
    [weight]``. Node ids are assigned in order of first appearance and a
    missing weight defaults to 1.

    :raises ParseError: on a line with the wrong number of tokens or an
        unparsable weight
    :raises GraphError: on a non-positive weight
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    index: dict[str, int] = {}
    src, dst, w = [], [], []
    for lineno, line in enumerate(text, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) not in (2, 3):
            raise ParseError(lineno, f"expected 2 or 3 tokens, got {len(tok)}")
        weight = 1.0
        if len(tok) == 3:
            try:
                weight = float(tok[2])
            except ValueError:
                raise ParseError(lineno, f"bad weight {tok[2]!r}") from None
            if not weight > 0 or not math.isfinite(weight):
                raise GraphError(f"line {lineno}: weight must be positive, "
                                 f"got {tok[2]}")
        a = index.setdefault(tok[0], len(index))
        b = index.setdefault(tok[1], len(index))
        src.append(a)
        dst.append(b)
        w.append(weight)
    return Graph(list(index), src, dst, w, directed=directed)


def read_edge_list(path, directed: bool = False) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh, directed=directed)


def format_edge_list(g: Graph) -> str:
    """Serialise as ``label label weight`` lines in dense-id order."""
    lines = [f"{g.labels[u]} {g.labels[v]} {w!r}"
             for u, v, w in zip(g.sources.tolist(), g.targets.tolist(),
                                g.weights.tolist())]
    return "\n".join(lines) + ("\n" if lines else "")


def write_edge_list(g: Graph, path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_edge_list(g))


# ----------------------------------------------------------------------
# statistics and perturbations

def epidemic_threshold(g: Graph) -> float:
    """
    SIR epidemic threshold ``<k> / (<k^2> - <k>)`` from the unweighted
    total degree sequence. Values above 1 are returned unclamped.
    """
    if g.link_count == 0:
        raise GraphError("epidemic threshold needs at least one link")
    st = g.degree_stats()
    denom = st.mean_square_degree - st.mean_degree
    if denom == 0:
        raise ZeroDivisionError("<k^2> equals <k>; threshold undefined")
    return st.mean_degree / denom


def rewire(g: Graph, r: float, seed: int = 0, method: str = "uniform",
           max_tries: int = 1000) -> Graph:
    """
    Randomly rewire a fraction ``r`` of the links.

    ``method="uniform"`` replaces each of ``floor(r * |E|)`` uniformly chosen
    links by a link between a uniformly drawn pair of distinct nodes that
    is not already linked; the weight moves with the link.
    ``method="swap"`` performs degree-preserving double-edge swaps touching
    the same number of links.

    :raises RewiringError: if no admissible replacement is found within
        ``max_tries`` draws
    """
    if not 0.0 <= r <= 1.0:
        raise ValueError("r must lie in [0, 1]")
    rng = np.random.default_rng(seed)
    m = g.link_count
    k = int(math.floor(r * m + 1e-12))
    if k == 0 or m == 0:
        return g
    if method == "uniform":
        src, dst = _rewire_uniform(g, k, rng, max_tries)
    elif method == "swap":
        src, dst = _rewire_swap(g, k, rng, max_tries)
    else:
        raise ValueError(f"unknown rewiring method {method!r}")
    return Graph(g.labels, src, dst, g.weights, directed=g.directed)


def _key(a: int, b: int, directed: bool) -> tuple[int, int]:
    return (a, b) if directed or a < b else (b, a)


def _rewire_uniform(g: Graph, k: int, rng, max_tries: int):
    n = g.n
    src = g.sources.tolist()
    dst = g.targets.tolist()
    present = set(zip(src, dst))
    for i in rng.choice(len(src), size=k, replace=False).tolist():
        present.discard((src[i], dst[i]))
        for _ in range(max_tries):
            a, b = rng.integers(n, size=2).tolist()
            if a == b:
                continue
            key = _key(a, b, g.directed)
            if key in present:
                continue
            present.add(key)
            src[i], dst[i] = key
            break
        else:
            raise RewiringError(f"no free node pair after {max_tries} draws")
    return src, dst


def _rewire_swap(g: Graph, k: int, rng, max_tries: int):
    src = g.sources.tolist()
    dst = g.targets.tolist()
    m = len(src)
    if m < 2:
        raise RewiringError("double-edge swaps need at least two links")
    present = set(zip(src, dst))
    swaps = max(1, k // 2)
    for _ in range(swaps):
        for _ in range(max_tries):
            i, j = rng.choice(m, size=2, replace=False).tolist()
            a, b, c, d = src[i], dst[i], src[j], dst[j]
            if not g.directed and rng.random() < 0.5:
                c, d = d, c
            if a == d or c == b:
                continue
            e1, e2 = _key(a, d, g.directed), _key(c, b, g.directed)
            if e1 == e2 or e1 in present or e2 in present:
                continue
            present.difference_update({(src[i], dst[i]), (src[j], dst[j])})
            present.update({e1, e2})
            src[i], dst[i] = e1
            src[j], dst[j] = e2
            break
        else:
            raise RewiringError(f"no admissible swap after {max_tries} draws")
    return src, dst
