"""Growing Neural Gas: a topology-preserving, incrementally grown set of prototypes.

The graph is stored densely: node positions and accumulated errors as arrays,
and edge ages as a symmetric integer matrix where -1 marks a missing edge.
Node ids grow monotonically and nodes are never reordered, so array order is
also stable id order.

Edges between two nodes that never win do not age, so such nodes would
outlive the data they once covered. Every node therefore remembers the last
signal it won, and nodes idle for longer than `max_idle_signals` are retired.
"""

from __future__ import annotations

import typing
from dataclasses import asdict, dataclass, replace

import numpy as np
from scipy.spatial.distance import cdist

from src.base.exceptions import GngError

NO_EDGE = -1


@dataclass(frozen=True)
class GngParams:
    """GNG hyperparameters.

    Parameters
    ----------
    max_nodes : int
        Growth budget; the node count never exceeds it.
    eps_winner : float
        Learning rate of the nearest node.
    eps_neighbor : float
        Learning rate of the graph neighbors of the nearest node.
    max_edge_age : int
        Edges older than this are deleted.
    insertion_interval : int
        Number of signals between node insertions.
    error_split_decay : float
        Factor applied to the two nodes whose error is split on insertion.
    error_global_decay : float
        Factor applied to every error after each signal.
    max_idle_signals : int
        A node that has not won for more than this many signals is retired.
    """

    max_nodes: int = 200
    eps_winner: float = 0.05
    eps_neighbor: float = 0.006
    max_edge_age: int = 50
    insertion_interval: int = 100
    error_split_decay: float = 0.5
    error_global_decay: float = 0.995
    max_idle_signals: int = 1000

    def __post_init__(self):

        if self.max_nodes < 2:
            raise GngError(f"max_nodes must be >= 2, got {self.max_nodes}")

        if not 0 < self.eps_winner <= 1:
            raise GngError(f"eps_winner must lie in (0, 1], got {self.eps_winner}")

        if not 0 < self.eps_neighbor < 1:
            raise GngError(f"eps_neighbor must lie in (0, 1), got {self.eps_neighbor}")

        if self.eps_neighbor >= self.eps_winner:
            raise GngError("eps_neighbor must be smaller than eps_winner")

        if self.max_edge_age < 1:
            raise GngError(f"max_edge_age must be >= 1, got {self.max_edge_age}")

        if self.insertion_interval < 1:
            raise GngError(
                f"insertion_interval must be >= 1, got {self.insertion_interval}"
            )

        for name in ("error_split_decay", "error_global_decay"):
            value = getattr(self, name)
            if not 0 < value < 1:
                raise GngError(f"{name} must lie in (0, 1), got {value}")

        if self.max_idle_signals < 1:
            raise GngError(
                f"max_idle_signals must be >= 1, got {self.max_idle_signals}"
            )

    def with_max_nodes(self, max_nodes: int) -> GngParams:
        return replace(self, max_nodes=int(max_nodes))


@dataclass(frozen=True)
class GngNode:
    id: int
    position: np.ndarray
    error: float


class GrowingNeuralGas:
    """Incremental GNG graph, updated one signal at a time.

    Parameters
    ----------
    first_two : array-like
        Two distinct finite vectors of equal dimension; they become the
        initial nodes, joined by an edge of age 0.
    params : GngParams
        Hyperparameters.
    random_state : int or np.random.Generator, optional
        Source of the per-pass shuffling in `fit_batch`.
    """

    def __init__(
        self,
        first_two: typing.Sequence,
        params: GngParams = None,
        random_state: typing.Union[int, np.random.Generator, None] = None,
    ):
        self.params = params or GngParams()
        self.rng = np.random.default_rng(random_state)

        a, b = (np.asarray(v, dtype=float) for v in first_two)

        if a.ndim != 1 or a.shape != b.shape:
            raise GngError(
                f"initial vectors must share one dimension, got {a.shape} and {b.shape}"
            )

        if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
            raise GngError("initial vectors must be finite")

        if np.array_equal(a, b):
            raise GngError("initial vectors must be distinct")

        self.positions = np.vstack([a, b])
        self.errors = np.zeros(2)
        self.ids = np.array([0, 1])
        self.last_active = np.full(2, -1)
        self.ages = np.array([[NO_EDGE, 0], [0, NO_EDGE]])
        self.signal_count = 0
        self._next_id = 2

    def __repr__(self):
        return (
            f"GrowingNeuralGas(n_nodes={self.n_nodes}, n_edges={self.n_edges}, "
            f"signals={self.signal_count})"
        )

    @property
    def dim(self) -> int:
        return self.positions.shape[1]

    @property
    def n_nodes(self) -> int:
        return len(self.positions)

    @property
    def n_edges(self) -> int:
        return int(np.count_nonzero(np.triu(self.ages >= 0, k=1)))

    @property
    def nodes(self) -> typing.List[GngNode]:
        return [
            GngNode(id=int(i), position=p.copy(), error=float(e))
            for i, p, e in zip(self.ids, self.positions, self.errors)
        ]

    def edges(self) -> typing.List[typing.Tuple[int, int, int]]:
        """Edges as (id_a, id_b, age) with id_a < id_b."""
        rows, cols = np.nonzero(np.triu(self.ages >= 0, k=1))
        return [
            (int(self.ids[i]), int(self.ids[j]), int(self.ages[i, j]))
            for i, j in zip(rows, cols)
        ]

    def neighbors(self, index: int) -> np.ndarray:
        return np.flatnonzero(self.ages[index] >= 0)

    def present(self, x: np.ndarray) -> GrowingNeuralGas:
        """Adapts the graph to a single signal."""

        x = np.asarray(x, dtype=float)

        if x.shape != (self.dim,):
            raise GngError(f"signal has shape {x.shape}, model expects ({self.dim},)")

        if not np.all(np.isfinite(x)):
            raise GngError("signal must be finite")

        p = self.params

        sq_dist = np.sum((self.positions - x) ** 2, axis=1)
        s1, s2 = np.argsort(sq_dist, kind="stable")[:2]

        nbrs = self.neighbors(s1)
        self.ages[s1, nbrs] += 1
        self.ages[nbrs, s1] += 1

        self.errors[s1] += sq_dist[s1]

        self.positions[s1] += p.eps_winner * (x - self.positions[s1])
        self.positions[nbrs] += p.eps_neighbor * (x - self.positions[nbrs])

        self.ages[s1, s2] = 0
        self.ages[s2, s1] = 0

        self.last_active[s1] = self.signal_count

        stale = nbrs[self.ages[s1, nbrs] > p.max_edge_age]

        if len(stale) > 0:
            self.ages[s1, stale] = NO_EDGE
            self.ages[stale, s1] = NO_EDGE

            isolated = [i for i in stale if not np.any(self.ages[i] >= 0)]
            removable = max(self.n_nodes - 2, 0)

            if isolated and removable:
                self._remove_nodes(isolated[:removable])

        self.signal_count += 1
        self._retire_idle_nodes()

        if (
            self.signal_count % p.insertion_interval == 0
            and self.n_nodes < p.max_nodes
        ):
            self._insert_node()

        self.errors *= p.error_global_decay

        return self

    def fit_batch(
        self,
        xs: np.ndarray,
        passes: int = 1,
        rng: typing.Optional[np.random.Generator] = None,
    ) -> GrowingNeuralGas:
        """Presents every vector of `xs`, reshuffled at each pass."""

        xs = np.asarray(xs, dtype=float)

        if len(xs) == 0:
            raise GngError("cannot fit on an empty batch")

        if passes < 1:
            raise GngError(f"passes must be >= 1, got {passes}")

        rng = self.rng if rng is None else rng

        for _ in range(passes):
            for i in rng.permutation(len(xs)):
                self.present(xs[i])

        return self

    def snapshot(self) -> np.ndarray:
        """Copy of the node positions in stable id order."""
        return self.positions.copy()

    def active_mask(self, since: int) -> np.ndarray:
        """Nodes that won a signal, or were inserted, at or after signal `since`."""
        return self.last_active >= since

    def quantization_error(self, xs: np.ndarray) -> float:
        """Mean squared distance of `xs` to their nearest node."""
        xs = np.atleast_2d(np.asarray(xs, dtype=float))
        return float(np.mean(np.min(cdist(xs, self.positions, "sqeuclidean"), axis=1)))

    def to_dict(self) -> dict:
        return {
            "params": asdict(self.params),
            "signal_count": self.signal_count,
            "nodes": [
                {"id": n.id, "position": n.position, "error": n.error}
                for n in self.nodes
            ],
            "edges": [
                {"source": a, "target": b, "age": age} for a, b, age in self.edges()
            ],
        }

    def _remove_nodes(self, indices: typing.Sequence[int]) -> None:
        indices = np.asarray(sorted(indices))
        self.positions = np.delete(self.positions, indices, axis=0)
        self.errors = np.delete(self.errors, indices)
        self.ids = np.delete(self.ids, indices)
        self.last_active = np.delete(self.last_active, indices)
        self.ages = np.delete(np.delete(self.ages, indices, axis=0), indices, axis=1)

    def _retire_idle_nodes(self) -> None:
        """Removes nodes idle for more than `max_idle_signals`, least recent first."""

        idle = np.flatnonzero(
            self.signal_count - self.last_active > self.params.max_idle_signals
        )
        removable = self.n_nodes - 2

        if len(idle) == 0 or removable <= 0:
            return

        idle = idle[np.argsort(self.last_active[idle], kind="stable")]
        self._remove_nodes(idle[:removable])

    def _insert_node(self) -> None:
        """Inserts a node halfway between the max-error node and its worst neighbor."""

        q = int(np.argmax(self.errors))

        nbrs = self.neighbors(q)
        if len(nbrs) == 0:
            return

        f = int(nbrs[np.argmax(self.errors[nbrs])])

        self.positions = np.vstack(
            [self.positions, 0.5 * (self.positions[q] + self.positions[f])]
        )
        self.ages = np.pad(self.ages, ((0, 1), (0, 1)), constant_values=NO_EDGE)
        r = self.n_nodes - 1

        self.ages[q, f] = self.ages[f, q] = NO_EDGE
        self.ages[q, r] = self.ages[r, q] = 0
        self.ages[f, r] = self.ages[r, f] = 0

        self.errors[q] *= self.params.error_split_decay
        self.errors[f] *= self.params.error_split_decay
        self.errors = np.append(self.errors, self.errors[q])

        self.ids = np.append(self.ids, self._next_id)
        self.last_active = np.append(self.last_active, self.signal_count)
        self._next_id += 1


def pick_initial_pair(
    xs: np.ndarray, rng: np.random.Generator
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Draws two distinct vectors of `xs` to seed a GNG graph."""

    xs = np.asarray(xs, dtype=float)

    if len(xs) < 2:
        raise GngError("at least two vectors are needed to seed the GNG")

    order = rng.permutation(len(xs))
    first = xs[order[0]]

    for i in order[1:]:
        if not np.array_equal(xs[i], first):
            return first.copy(), xs[i].copy()

    raise GngError("all vectors are identical, the GNG cannot be seeded")


def gng_init(
    first_two: typing.Sequence,
    params: GngParams = None,
    random_state: typing.Union[int, np.random.Generator, None] = None,
) -> GrowingNeuralGas:
    return GrowingNeuralGas(first_two, params=params, random_state=random_state)


def gng_present(model: GrowingNeuralGas, x: np.ndarray) -> GrowingNeuralGas:
    return model.present(x)


def gng_fit_batch(
    model: GrowingNeuralGas,
    xs: np.ndarray,
    passes: int = 1,
    rng: typing.Optional[np.random.Generator] = None,
) -> GrowingNeuralGas:
    return model.fit_batch(xs, passes=passes, rng=rng)


def gng_snapshot(model: GrowingNeuralGas) -> np.ndarray:
    return model.snapshot()


def gng_export(model: GrowingNeuralGas) -> dict:
    return model.to_dict()
