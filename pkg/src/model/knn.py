from __future__ import annotations

import typing
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

from src.base import logger

LOGGER = logger.set()


@dataclass(frozen=True)
class ReferenceSet:
    """Labeled reference points of the nearest-neighbor vote."""

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        points = np.atleast_2d(np.asarray(self.points, dtype=float))
        labels = np.asarray(self.labels)

        if len(points) == 0 or points.size == 0:
            raise ValueError("a reference set needs at least one point")

        if len(points) != len(labels):
            raise ValueError(f"{len(points)} reference points but {len(labels)} labels")

        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    def __len__(self):
        return len(self.points)

    @property
    def dim(self) -> int:
        return self.points.shape[1]

    def append(self, points: np.ndarray, labels: np.ndarray) -> ReferenceSet:
        return ReferenceSet(
            points=np.vstack([self.points, points]),
            labels=np.concatenate([self.labels, labels]),
        )

    def tail(self, size: int) -> ReferenceSet:
        """The `size` most recently appended points."""
        return ReferenceSet(points=self.points[-size:], labels=self.labels[-size:])


def knn_neighbors(
    queries: np.ndarray, refs: ReferenceSet, k: int
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Exact k nearest references of every query.

    Distance ties are ranked by reference insertion index. `k` is clamped to
    the reference count.

    Returns
    -------
    (np.ndarray, np.ndarray)
        Neighbor indices and Euclidean distances, both of shape (n_queries, k).
    """

    queries = np.asarray(queries, dtype=float)

    if queries.ndim == 1:
        queries = queries[np.newaxis, :]

    if queries.shape[1] != refs.dim:
        raise ValueError(
            f"queries have dimension {queries.shape[1]}, references {refs.dim}"
        )

    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")

    k = min(int(k), len(refs))

    distances = cdist(queries, refs.points)
    order = np.argsort(distances, axis=1, kind="stable")[:, :k]

    return order, np.take_along_axis(distances, order, axis=1)


def vote(
    neighbor_labels: np.ndarray, neighbor_distances: np.ndarray, classes: np.ndarray
) -> np.ndarray:
    """Majority vote with deterministic tie breaking.

    Ties on the vote count go to the class whose voters have the smallest
    summed distance, then to the class of the best ranked voter.
    """

    n, k = neighbor_labels.shape
    codes = np.searchsorted(classes, neighbor_labels)
    rows = np.repeat(np.arange(n), k)

    counts = np.zeros((n, len(classes)), dtype=int)
    np.add.at(counts, (rows, codes.ravel()), 1)

    dist_sum = np.zeros((n, len(classes)))
    np.add.at(dist_sum, (rows, codes.ravel()), neighbor_distances.ravel())

    first_rank = np.full((n, len(classes)), k)
    for j in reversed(range(k)):
        first_rank[np.arange(n), codes[:, j]] = j

    tied = counts == counts.max(axis=1, keepdims=True)

    masked_dist = np.where(tied, dist_sum, np.inf)
    tied &= masked_dist == masked_dist.min(axis=1, keepdims=True)

    masked_rank = np.where(tied, first_rank, k + 1)

    return classes[np.argmin(masked_rank, axis=1)]


def knn_predict_batch(queries: np.ndarray, refs: ReferenceSet, k: int) -> np.ndarray:
    """Majority label of the k nearest references for every query."""

    queries = np.asarray(queries, dtype=float)

    if len(queries) == 0:
        return np.empty(0, dtype=refs.labels.dtype)

    if k > len(refs):
        LOGGER.warning(f"k={k} clamped to the {len(refs)} available references")

    order, distances = knn_neighbors(queries, refs, k)
    classes = np.unique(refs.labels)

    return vote(refs.labels[order], distances, classes)


def knn_predict(query: np.ndarray, refs: ReferenceSet, k: int):
    query = np.asarray(query, dtype=float)

    if query.ndim != 1:
        raise ValueError(f"a single query vector is expected, got shape {query.shape}")

    return knn_predict_batch(query[np.newaxis, :], refs, k)[0]
