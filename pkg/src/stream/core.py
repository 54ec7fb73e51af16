from __future__ import annotations

import math
import typing
from dataclasses import dataclass, field

import numpy as np
from sklearn.preprocessing import MinMaxScaler

from src.base import logger
from src.base.exceptions import StreamError
from src.model.gng import GngParams

LOGGER = logger.set()


@dataclass(frozen=True)
class LabeledInstance:
    """One stream sample: a finite feature vector and an optional class id."""

    features: np.ndarray
    label: typing.Optional[int] = None

    def __post_init__(self):
        features = np.asarray(self.features, dtype=float)

        if features.ndim != 1:
            raise StreamError(f"features must be a vector, got shape {features.shape}")

        if not np.all(np.isfinite(features)):
            raise StreamError("features contain NaN or Inf")

        object.__setattr__(self, "features", features)


@dataclass(frozen=True)
class Batch:
    """A group of consecutive unsupervised instances, features only.

    `offset` is the position of the first instance inside the unsupervised
    suffix, so evaluation labels can be aligned without being carried here.
    """

    index: int
    features: np.ndarray
    offset: int = 0

    def __len__(self):
        return len(self.features)

    @property
    def instances(self) -> typing.List[LabeledInstance]:
        return [LabeledInstance(features=x) for x in self.features]


@dataclass(frozen=True)
class ModelView:
    """What the learners are allowed to see of a split."""

    X_supervised: np.ndarray
    y_supervised: np.ndarray
    X_unsupervised: np.ndarray
    classes: np.ndarray


@dataclass(frozen=True)
class StreamSplit:
    X_supervised: np.ndarray
    y_supervised: np.ndarray
    X_unsupervised: np.ndarray
    y_unsupervised: np.ndarray
    classes: np.ndarray

    @property
    def t_s(self) -> int:
        return len(self.X_supervised)

    @property
    def n_unsupervised(self) -> int:
        return len(self.X_unsupervised)

    @property
    def n_features(self) -> int:
        return self.X_supervised.shape[1]

    def model_view(self) -> ModelView:
        return ModelView(
            X_supervised=self.X_supervised,
            y_supervised=self.y_supervised,
            X_unsupervised=self.X_unsupervised,
            classes=self.classes,
        )

    def with_evaluation_labels(self, y_unsupervised: np.ndarray) -> StreamSplit:
        """Copy of the split with a different evaluation channel."""
        return StreamSplit(
            X_supervised=self.X_supervised,
            y_supervised=self.y_supervised,
            X_unsupervised=self.X_unsupervised,
            y_unsupervised=np.asarray(y_unsupervised),
            classes=self.classes,
        )


@dataclass
class RunConfig:
    labeled_fraction: float = 0.05
    num_batches: int = 100
    g_base: int = 100
    k_predict: int = 5
    k_gng: int = 3
    passes: int = 3
    seed: int = 0
    sld_window: typing.Optional[float] = None
    window_overlap: float = 0.2
    gng_params: GngParams = field(default_factory=GngParams)

    def __post_init__(self):

        if not 0 < self.labeled_fraction < 1:
            raise StreamError(
                f"labeled_fraction must lie in (0, 1), got {self.labeled_fraction}"
            )

        for name in ("num_batches", "g_base", "k_predict", "k_gng", "passes"):
            value = getattr(self, name)
            if int(value) != value or value < 1:
                raise StreamError(f"{name} must be a positive integer, got {value}")

        if self.seed < 0:
            raise StreamError(f"seed must be unsigned, got {self.seed}")

        if self.sld_window is not None and self.sld_window < 1:
            raise StreamError(f"sld_window must be >= 1, got {self.sld_window}")

        if not 0 <= self.window_overlap < 1:
            raise StreamError(
                f"window_overlap must lie in [0, 1), got {self.window_overlap}"
            )


def as_arrays(
    instances: typing.Sequence[LabeledInstance],
) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Stacks a list of labeled instances into (X, y) arrays."""

    if len(instances) == 0:
        raise StreamError("empty instance list")

    if any(instance.label is None for instance in instances):
        raise StreamError("every instance needs a ground-truth label")

    X = np.vstack([instance.features for instance in instances])
    y = np.array([instance.label for instance in instances], dtype=int)

    return X, y


def split_stream(
    X: np.ndarray,
    y: np.ndarray,
    labeled_fraction: float,
    classes: typing.Optional[typing.Sequence[int]] = None,
) -> StreamSplit:
    """Splits a labeled stream into the supervised prefix and the EVL suffix.

    Parameters
    ----------
    X : np.ndarray
        Feature matrix of shape (n_instances, n_features), in arrival order.
    y : np.ndarray
        Ground-truth labels. Labels of the suffix are kept only for evaluation.
    labeled_fraction : float
        Fraction in (0, 1); the prefix holds floor(fraction * n) instances.
    classes : sequence of int, optional
        Declared class set. Defaults to the labels found in `y`.

    Returns
    -------
    StreamSplit
    """

    X = np.asarray(X, dtype=float)
    y = np.asarray(y)

    if len(X) == 0:
        raise StreamError("cannot split an empty stream")

    if len(X) != len(y):
        raise StreamError(f"{len(X)} feature rows but {len(y)} labels")

    if not 0 < labeled_fraction < 1:
        raise StreamError(
            f"labeled_fraction must lie in (0, 1), got {labeled_fraction}"
        )

    if not np.all(np.isfinite(X)):
        raise StreamError("features contain NaN or Inf")

    classes = np.unique(y) if classes is None else np.asarray(classes)

    unknown = np.setdiff1d(np.unique(y), classes)
    if len(unknown) > 0:
        raise StreamError(f"labels {unknown.tolist()} are not in the class set")

    t_s = math.floor(labeled_fraction * len(X))

    if t_s == 0:
        raise StreamError(
            f"fraction {labeled_fraction} of {len(X)} instances leaves no supervised prefix"
        )

    if t_s == len(X):
        raise StreamError(
            f"fraction {labeled_fraction} of {len(X)} instances leaves no unsupervised suffix"
        )

    return StreamSplit(
        X_supervised=X[:t_s].copy(),
        y_supervised=y[:t_s].copy(),
        X_unsupervised=X[t_s:].copy(),
        y_unsupervised=y[t_s:].copy(),
        classes=classes,
    )


def batch_size(n_unsupervised: int, num_batches: int) -> int:
    return math.ceil(n_unsupervised / num_batches)


def batch_count(n_unsupervised: int, num_batches: int) -> int:
    """Number of batches `batch_iter` actually yields."""
    return math.ceil(n_unsupervised / batch_size(n_unsupervised, num_batches))


def batch_iter(
    split: typing.Union[StreamSplit, ModelView], num_batches: int
) -> typing.Iterator[Batch]:
    """Yields the unsupervised suffix in batches of B = ceil(len / num_batches).

    Batch indices start at 1; the last batch may be shorter. When the
    ceiling leaves nothing for the trailing batches fewer than
    `num_batches` batches are produced.
    """

    if num_batches < 1:
        raise StreamError(f"num_batches must be >= 1, got {num_batches}")

    X = split.X_unsupervised
    n = len(X)

    if n == 0:
        raise StreamError("the unsupervised suffix is empty")

    size = batch_size(n, num_batches)

    for index, start in enumerate(range(0, n, size), start=1):
        yield Batch(index=index, features=X[start : start + size], offset=start)


def class_counts(labels: np.ndarray, classes: typing.Sequence[int]) -> typing.Dict:
    labels = np.asarray(labels)
    return {c: int(np.sum(labels == c)) for c in np.asarray(classes).tolist()}


def class_proportions(
    labels: np.ndarray, classes: typing.Sequence[int]
) -> typing.Dict:
    counts = class_counts(labels, classes)
    total = sum(counts.values())
    return {c: (n / total if total else 0.0) for c, n in counts.items()}


def class_imbalance_ratio(
    labels: np.ndarray, classes: typing.Optional[typing.Sequence[int]] = None
) -> float:
    """Ratio between the most and the least populated class.

    Raises
    ------
    StreamError
        When a declared class has no supervised instance.
    """

    labels = np.asarray(labels)

    if len(labels) == 0:
        raise StreamError("no supervised labels")

    classes = np.unique(labels) if classes is None else classes

    counts = class_counts(labels, classes)

    missing = [c for c, n in counts.items() if n == 0]
    if missing:
        raise StreamError(
            f"classes {missing} are absent from the supervised prefix, cannot size the GNG"
        )

    return max(counts.values()) / min(counts.values())


def normalize_stream(
    X: np.ndarray, n_supervised: int
) -> typing.Tuple[np.ndarray, MinMaxScaler]:
    """Min-max scaling with statistics of the supervised prefix only."""

    if not 0 < n_supervised <= len(X):
        raise StreamError(
            f"cannot fit the scaler on {n_supervised} rows of a {len(X)}-row stream"
        )

    scaler = MinMaxScaler()
    scaler.fit(X[:n_supervised])

    return scaler.transform(X), scaler
