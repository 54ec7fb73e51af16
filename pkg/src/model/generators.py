"""Synthetic drifting Gaussian streams.

Each class owns one or more Gaussian concepts. Every `drift_interval`
instances the concept centers take one drift step, following a closed-form
schedule (`concept_centers`). Instances are drawn round-robin over classes,
and round-robin over the concepts of a class.
"""

from __future__ import annotations

import math
import typing
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from src.base.exceptions import DatasetError
from src.config import get_catalog_entry


class DriftKind(str, Enum):
    RECTILINEAR = "rectilinear-translation"
    ROTATION = "rotation"
    SURROUND = "surround"
    EXPANSION = "expansion"
    MULTI_MODAL = "multi-modal"
    STATIC = "static"


@dataclass(frozen=True)
class DatasetSpec:
    name: str
    n_features: int
    n_classes: int
    n_instances: int
    drift_interval: typing.Optional[int] = None
    drift_kind: typing.Optional[DriftKind] = None

    def __post_init__(self):

        if self.n_features < 1:
            raise DatasetError(f"n_features must be >= 1, got {self.n_features}")

        if self.n_classes < 1:
            raise DatasetError(f"n_classes must be >= 1, got {self.n_classes}")

        if self.drift_kind is not None:
            object.__setattr__(self, "drift_kind", DriftKind(self.drift_kind))

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "n_features": self.n_features,
            "n_classes": self.n_classes,
            "n_instances": self.n_instances,
            "drift_interval": self.drift_interval,
            "drift_kind": None if self.drift_kind is None else self.drift_kind.value,
        }


@dataclass(frozen=True)
class GeneratorParams:
    """Parameters of a drifting Gaussian stream.

    Parameters
    ----------
    spec : DatasetSpec
        Shape of the stream and drift family.
    class_centers : np.ndarray
        Initial concept centers, shape (n_classes, n_concepts, n_features).
    covariance : np.ndarray
        Concept covariances, shape (n_classes, n_concepts, n_features, n_features).
    displacement : np.ndarray
        Per-step translation, broadcastable to `class_centers`.
    angular_step : float
        Rotation per step in radians, in the plane of the first two features.
    pivot : np.ndarray
        Center of rotation, expansion and of the surround circuit.
    expansion_amplitude : float
        Relative radial amplitude of the periodic expansion.
    expansion_period : int
        Period of the expansion, in drift steps.
    surround_extent : np.ndarray
        Side lengths of the rectangular circuit travelled by moving classes.
    surround_speed : float
        Distance travelled along the circuit per drift step.
    seed : int
        Random seed of the sampler.
    """

    spec: DatasetSpec
    class_centers: np.ndarray
    covariance: np.ndarray
    displacement: np.ndarray = field(default_factory=lambda: np.zeros(1))
    angular_step: float = 0.0
    pivot: typing.Optional[np.ndarray] = None
    expansion_amplitude: float = 0.0
    expansion_period: int = 1
    surround_extent: np.ndarray = field(default_factory=lambda: np.array([2.0, 2.0]))
    surround_speed: float = 0.0
    seed: int = 0

    def __post_init__(self):
        spec = self.spec

        if spec.n_classes < 2:
            raise DatasetError("a generated stream needs at least two classes")

        centers = np.asarray(self.class_centers, dtype=float)

        if centers.ndim != 3 or centers.shape[0] != spec.n_classes:
            raise DatasetError(
                f"class_centers must have shape (n_classes, n_concepts, n_features), "
                f"got {centers.shape}"
            )

        if centers.shape[2] != spec.n_features:
            raise DatasetError(
                f"class_centers have {centers.shape[2]} features, spec declares "
                f"{spec.n_features}"
            )

        covariance = np.broadcast_to(
            np.asarray(self.covariance, dtype=float),
            centers.shape + (spec.n_features,),
        ).copy()

        try:
            np.linalg.cholesky(covariance)
        except np.linalg.LinAlgError:
            raise DatasetError("every concept covariance must be positive definite")

        if spec.drift_kind != DriftKind.STATIC and not spec.drift_interval:
            raise DatasetError(f"{spec.drift_kind} streams need a drift_interval")

        if self.expansion_period < 1:
            raise DatasetError("expansion_period must be >= 1")

        pivot = np.zeros(spec.n_features) if self.pivot is None else self.pivot

        object.__setattr__(self, "class_centers", centers)
        object.__setattr__(self, "covariance", covariance)
        object.__setattr__(
            self,
            "displacement",
            np.broadcast_to(np.asarray(self.displacement, dtype=float), centers.shape),
        )
        object.__setattr__(self, "pivot", np.asarray(pivot, dtype=float))
        object.__setattr__(
            self, "surround_extent", np.asarray(self.surround_extent, dtype=float)
        )

    @property
    def n_concepts(self) -> int:
        return self.class_centers.shape[1]

    def to_dict(self) -> dict:
        return {
            "spec": self.spec.to_dict(),
            "class_centers": self.class_centers,
            "covariance": self.covariance,
            "displacement": np.asarray(self.displacement),
            "angular_step": self.angular_step,
            "pivot": self.pivot,
            "expansion_amplitude": self.expansion_amplitude,
            "expansion_period": self.expansion_period,
            "surround_extent": self.surround_extent,
            "surround_speed": self.surround_speed,
            "seed": self.seed,
        }


def rotate_plane(points: np.ndarray, angle: float, pivot: np.ndarray) -> np.ndarray:
    """Rotates the first two coordinates of `points` about `pivot`."""

    if points.shape[-1] < 2:
        return points.copy()

    cos, sin = math.cos(angle), math.sin(angle)
    shifted = points - pivot
    rotated = shifted.copy()
    rotated[..., 0] = cos * shifted[..., 0] - sin * shifted[..., 1]
    rotated[..., 1] = sin * shifted[..., 0] + cos * shifted[..., 1]

    return rotated + pivot


def rectangle_offset(distance: float, extent: np.ndarray) -> np.ndarray:
    """Offset after travelling `distance` along a rectangle of sides `extent`.

    The circuit starts at its lower-left corner and runs counterclockwise.
    """

    width, height = extent[:2]
    s = distance % (2 * (width + height))

    if s < width:
        return np.array([s, 0.0])
    if s < width + height:
        return np.array([width, s - width])
    if s < 2 * width + height:
        return np.array([width - (s - width - height), height])

    return np.array([0.0, height - (s - 2 * width - height)])


def concept_centers(params: GeneratorParams, step: int) -> np.ndarray:
    """Concept centers after `step` drift steps, shape (n_classes, n_concepts, N)."""

    kind = params.spec.drift_kind
    centers = params.class_centers

    if kind == DriftKind.STATIC or step == 0:
        return centers.copy()

    if kind in (DriftKind.RECTILINEAR, DriftKind.MULTI_MODAL):
        return centers + step * params.displacement

    if kind == DriftKind.ROTATION:
        return rotate_plane(centers, step * params.angular_step, params.pivot)

    if kind == DriftKind.EXPANSION:
        scale = 1 + params.expansion_amplitude * math.sin(
            2 * math.pi * step / params.expansion_period
        )
        rotated = rotate_plane(centers, step * params.angular_step, params.pivot)
        return params.pivot + scale * (rotated - params.pivot)

    if kind == DriftKind.SURROUND:
        moved = centers.copy()
        offset = rectangle_offset(step * params.surround_speed, params.surround_extent)
        moved[1:, :, :2] += offset
        return moved

    raise DatasetError(f"unsupported drift kind {kind}")


def generate_stream(params: GeneratorParams) -> typing.Tuple[np.ndarray, np.ndarray]:
    """Samples the stream described by `params`.

    Returns
    -------
    (np.ndarray, np.ndarray)
        Features of shape (n_instances, n_features) and integer labels.
    """

    spec = params.spec
    n = spec.n_instances
    rng = np.random.default_rng(params.seed)

    t = np.arange(n)
    labels = t % spec.n_classes
    concepts = (t // spec.n_classes) % params.n_concepts

    if spec.drift_kind == DriftKind.STATIC:
        steps = np.zeros(n, dtype=int)
    else:
        steps = t // spec.drift_interval

    schedule = np.stack([concept_centers(params, s) for s in range(steps[-1] + 1)])
    means = schedule[steps, labels, concepts]

    chol = np.linalg.cholesky(params.covariance)[labels, concepts]
    noise = rng.standard_normal((n, spec.n_features))

    X = means + np.einsum("tij,tj->ti", chol, noise)

    return X, labels.astype(int)


def params_from_config(entry: dict, seed: int = 0, n_instances=None) -> GeneratorParams:
    """Builds generator parameters from one entry of the dataset catalog."""

    centers = np.asarray(entry["class_centers"], dtype=float)
    n_classes, _, n_features = centers.shape

    if "covariance" in entry:
        covariance = np.asarray(entry["covariance"], dtype=float)
    else:
        variance = np.asarray(np.asarray(entry.get("std", 1.0), dtype=float) ** 2)
        covariance = variance[..., np.newaxis, np.newaxis] * np.eye(n_features)

    spec = DatasetSpec(
        name=entry["name"],
        n_features=n_features,
        n_classes=n_classes,
        n_instances=int(n_instances or entry["n_instances"]),
        drift_interval=entry.get("drift_interval"),
        drift_kind=entry.get("drift_kind", DriftKind.STATIC.value),
    )

    return GeneratorParams(
        spec=spec,
        class_centers=centers,
        covariance=covariance,
        displacement=entry.get("displacement", 0.0),
        angular_step=float(entry.get("angular_step", 0.0)),
        pivot=entry.get("pivot"),
        expansion_amplitude=float(entry.get("expansion_amplitude", 0.0)),
        expansion_period=int(entry.get("expansion_period", 1)),
        surround_extent=entry.get("surround_extent", [2.0, 2.0]),
        surround_speed=float(entry.get("surround_speed", 0.0)),
        seed=int(seed),
    )


def get_generator_params(
    name: str, seed: int = 0, n_instances: typing.Optional[int] = None
) -> GeneratorParams:
    """Generator parameters of a named stream of `config/datasets.yaml`."""

    return params_from_config(get_catalog_entry(name), seed=seed, n_instances=n_instances)
