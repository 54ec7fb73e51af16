from __future__ import annotations

import typing
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment
from scipy.spatial.distance import cdist


@dataclass(frozen=True)
class NodeMapping:
    """Minimum-cost matching between two prototype sets.

    `pairs` holds (prev_index, curr_index) tuples sorted by prev_index; its
    length is min(G_prev, G_curr).
    """

    pairs: typing.Tuple[typing.Tuple[int, int], ...]
    total_cost: float

    def __len__(self):
        return len(self.pairs)

    @property
    def prev_indices(self) -> np.ndarray:
        return np.array([g for g, _ in self.pairs], dtype=int)

    @property
    def curr_indices(self) -> np.ndarray:
        return np.array([h for _, h in self.pairs], dtype=int)

    @property
    def mean_cost(self) -> float:
        return self.total_cost / len(self.pairs) if self.pairs else 0.0

    def as_matrix(self, shape: typing.Tuple[int, int]) -> np.ndarray:
        """Binary assignment matrix A of shape (G_prev, G_curr)."""
        matrix = np.zeros(shape, dtype=int)
        if self.pairs:
            matrix[self.prev_indices, self.curr_indices] = 1
        return matrix


def pairwise_distances(prev: np.ndarray, curr: np.ndarray) -> np.ndarray:
    """Euclidean cost matrix of shape (len(prev), len(curr))."""

    prev = np.atleast_2d(np.asarray(prev, dtype=float))
    curr = np.atleast_2d(np.asarray(curr, dtype=float))

    if prev.size == 0 or curr.size == 0:
        raise ValueError("both position lists must be non-empty")

    if prev.shape[1] != curr.shape[1]:
        raise ValueError(
            f"dimension mismatch: prev {prev.shape}, curr {curr.shape}"
        )

    return cdist(prev, curr)


def solve_assignment(cost: np.ndarray) -> NodeMapping:
    """Exact rectangular assignment (modified Jonker-Volgenant, via scipy).

    Matches min(G_prev, G_curr) pairs at minimum summed cost; the surplus
    side stays unmatched.
    """

    cost = np.asarray(cost, dtype=float)

    if cost.ndim != 2:
        raise ValueError(f"cost matrix must be 2-D, got shape {cost.shape}")

    if not np.all(np.isfinite(cost)):
        raise ValueError("cost matrix must be finite")

    rows, cols = linear_sum_assignment(cost)

    return NodeMapping(
        pairs=tuple((int(g), int(h)) for g, h in zip(rows, cols)),
        total_cost=float(cost[rows, cols].sum()),
    )
