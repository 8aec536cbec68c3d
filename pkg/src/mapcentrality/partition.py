"""
Node partitions into (possibly nested) modules and the partition file format.

A partition assigns every node a *module path*, a tuple of module ids read
from the root down. Paths of length one give a two-level partition; longer
paths nest modules inside super-modules. The leaf module of a node is its
full path.
"""

from __future__ import annotations

import io
from functools import cached_property
from typing import Sequence, TextIO

import numpy as np


class PartitionError(ValueError):
    """Invalid partition, or a partition that does not match a graph."""


class Partition:
    """
    :param paths: one module path per dense node id
    """

    def __init__(self, paths: Sequence[Sequence[int]]):
        self.paths: tuple[tuple[int, ...], ...] = tuple(
            tuple(int(x) for x in p) for p in paths)
        for u, p in enumerate(self.paths):
            if not p:
                raise PartitionError(f"node {u} has an empty module path")
        leaves = set(self.paths)
        for p in leaves:
            for d in range(1, len(p)):
                if p[:d] in leaves:
                    raise PartitionError(
                        f"module {':'.join(map(str, p[:d]))} holds both nodes"
                        " and sub-modules")

    @classmethod
    def from_labels(cls, labels) -> "Partition":
        """Two-level partition from one module label per node."""
        return cls([(int(x),) for x in labels])

    @classmethod
    def from_modules(cls, modules: Sequence[Sequence[int]], n: int | None = None
                     ) -> "Partition":
        """Two-level partition from lists of node ids."""
        if n is None:
            n = sum(len(m) for m in modules)
        lab = np.full(n, -1, dtype=np.int64)
        for i, m in enumerate(modules):
            for u in m:
                if lab[u] != -1:
                    raise PartitionError(f"node {u} assigned twice")
                lab[u] = i
        if np.any(lab < 0):
            raise PartitionError(f"node {int(np.argmin(lab))} unassigned")
        return cls.from_labels(lab)

    @classmethod
    def one_level(cls, n: int) -> "Partition":
        return cls([(0,)] * n)

    @classmethod
    def singletons(cls, n: int) -> "Partition":
        return cls([(u,) for u in range(n)])

    def __len__(self):
        return len(self.paths)

    @property
    def n(self) -> int:
        return len(self.paths)

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.paths == other.paths

    def __hash__(self):
        return hash(self.paths)

    def __repr__(self):
        return f"<Partition n={self.n} modules={self.num_modules}>"

    # ------------------------------------------------------------------

    @cached_property
    def _leaf_index(self) -> tuple[np.ndarray, list[tuple[int, ...]]]:
        index: dict[tuple[int, ...], int] = {}
        lab = np.fromiter((index.setdefault(p, len(index)) for p in self.paths),
                          dtype=np.int64, count=self.n)
        return lab, list(index)

    @property
    def leaf_of(self) -> np.ndarray:
        """Dense leaf-module id per node, numbered by first appearance."""
        return self._leaf_index[0]

    @property
    def leaf_paths(self) -> list[tuple[int, ...]]:
        return self._leaf_index[1]

    @property
    def num_modules(self) -> int:
        """Number of leaf modules."""
        return len(self.leaf_paths)

    @property
    def module_sizes(self) -> np.ndarray:
        return np.bincount(self.leaf_of, minlength=self.num_modules)

    @property
    def depth(self) -> int:
        return max((len(p) for p in self.paths), default=0)

    @property
    def is_two_level(self) -> bool:
        return all(len(p) == 1 for p in self.paths)

    def modules(self) -> list[list[int]]:
        """Node ids per leaf module, in leaf-id order."""
        out: list[list[int]] = [[] for _ in range(self.num_modules)]
        for u, m in enumerate(self.leaf_of.tolist()):
            out[m].append(u)
        return out

    @cached_property
    def internal_paths(self) -> list[tuple[int, ...]]:
        """Paths of non-root modules that contain sub-modules."""
        seen: dict[tuple[int, ...], None] = {}
        for p in self.leaf_paths:
            for d in range(1, len(p)):
                seen.setdefault(p[:d], None)
        return list(seen)

    def canonical(self) -> "Partition":
        """Relabel module ids at every level by first appearance."""
        maps: dict[tuple[int, ...], dict[int, int]] = {}
        out = []
        for p in self.paths:
            q = []
            for d, x in enumerate(p):
                m = maps.setdefault(tuple(q), {})
                q.append(m.setdefault(x, len(m)))
            out.append(tuple(q))
        return Partition(out)

    def same_grouping(self, other: "Partition") -> bool:
        return self.canonical() == other.canonical()

    def without_node(self, u: int) -> "Partition":
        return Partition(self.paths[:u] + self.paths[u + 1:])


# ----------------------------------------------------------------------
# file format: "label module-path" with ':'-separated path segments

def parse_partition(text: str | TextIO, labels: Sequence[str]) -> Partition:
    """
    Read a partition for a graph with the given node labels.

    :raises PartitionError: on unknown, duplicate or missing nodes, or a
        malformed line
    """
    if isinstance(text, str):
        text = io.StringIO(text)
    index = {lab: i for i, lab in enumerate(labels)}
    paths: list[tuple[int, ...] | None] = [None] * len(labels)
    for lineno, line in enumerate(text, start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        tok = line.split()
        if len(tok) != 2:
            raise PartitionError(f"line {lineno}: expected 'label module-path'")
        if tok[0] not in index:
            raise PartitionError(f"line {lineno}: unknown node {tok[0]!r}")
        u = index[tok[0]]
        if paths[u] is not None:
            raise PartitionError(f"line {lineno}: node {tok[0]!r} repeated")
        try:
            paths[u] = tuple(int(x) for x in tok[1].split(":"))
        except ValueError:
            raise PartitionError(
                f"line {lineno}: bad module path {tok[1]!r}") from None
    missing = [labels[u] for u, p in enumerate(paths) if p is None]
    if missing:
        raise PartitionError(f"nodes missing from partition: {missing[:5]}")
    return Partition(paths)


def read_partition(path, labels: Sequence[str]) -> Partition:
    with open(path, encoding="utf-8") as fh:
        return parse_partition(fh, labels)


def format_partition(m: Partition, labels: Sequence[str]) -> str:
    return "".join(f"{labels[u]} {':'.join(map(str, p))}\n"
                   for u, p in enumerate(m.paths))


def write_partition(m: Partition, labels: Sequence[str], path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(format_partition(m, labels))
