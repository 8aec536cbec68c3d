"""Score vectors and the tie-broken node ranking shared by all measures."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class CentralityVector:
    scores: np.ndarray
    method: str
    flow_model: str | None = None
    convention: str | None = None

    def __len__(self):
        return len(self.scores)

    def ranking(self) -> np.ndarray:
        return rank_nodes(self.scores)


def rank_nodes(scores) -> np.ndarray:
    """Node ids by descending score; ties go to the smaller id."""
    scores = np.asarray(scores, dtype=float)
    ids = np.arange(len(scores))
    return np.lexsort((ids, -scores))


def top_count(x: float, n: int) -> int:
    """``ceil(x * n)``, robust to binary rounding of ``x``."""
    return int(math.ceil(x * n - 1e-9))


def top_fraction(scores, x: float) -> np.ndarray:
    """The ``ceil(x * n)`` highest-ranked node ids."""
    return rank_nodes(scores)[:top_count(x, len(scores))]
