"""Prototype tracking under extreme verification latency.

A single persistent GNG characterizes the stream. Its nodes are labeled from
the supervised prefix, then, batch after batch, relabeled from the previous
(projected) nodes, matched to them, rigidly registered and projected one
step ahead to predict the next batch. Only the nodes that were active while
a batch was learned form its prototype set.
"""

from __future__ import annotations

import math
import time
import typing
from dataclasses import dataclass, field

import numpy as np
from tqdm import tqdm

from src.base import logger
from src.base.exceptions import RegistrationError
from src.model.assignment import NodeMapping, pairwise_distances, solve_assignment
from src.model.baselines import BASELINES, run_baseline
from src.model.gng import GrowingNeuralGas, pick_initial_pair
from src.model.knn import ReferenceSet, knn_predict_batch
from src.model.registration import (
    RigidTransform,
    fit_rigid,
    project,
    registration_residual,
)
from src.model.trace import BatchRecord, PredictionTrace
from src.stream.core import (
    Batch,
    RunConfig,
    StreamSplit,
    batch_count,
    batch_iter,
    class_imbalance_ratio,
    class_proportions,
)

LOGGER = logger.set()


@dataclass(frozen=True)
class PrototypeSet:
    """Labeled GNG nodes of one batch and their one-step-ahead projection."""

    batch_index: int
    positions: np.ndarray
    labels: np.ndarray
    projected_positions: np.ndarray

    def __post_init__(self):
        sizes = {len(self.positions), len(self.labels), len(self.projected_positions)}

        if len(sizes) != 1 or 0 in sizes:
            raise ValueError(
                "positions, labels and projected positions must share a non-zero length"
            )

    def __len__(self):
        return len(self.positions)

    def reference_set(self) -> ReferenceSet:
        return ReferenceSet(points=self.projected_positions, labels=self.labels)


@dataclass(frozen=True)
class StepDiagnostics:
    mapping: NodeMapping
    transform: RigidTransform
    registration_rms: float
    quantization_error: float
    fallback: bool


@dataclass
class AigasState:
    model: GrowingNeuralGas
    prototypes: PrototypeSet
    config: RunConfig
    classes: np.ndarray
    rng: np.random.Generator
    g0: int
    imbalance_ratio: float
    last_step: typing.Optional[StepDiagnostics] = field(default=None)


def initial_budget(imbalance_ratio: float, g_base: int) -> int:
    """G0 = (1 + xi) G, rounded half up."""
    return int(math.floor((1 + imbalance_ratio) * g_base + 0.5))


def aigas_init(
    X_supervised: np.ndarray,
    y_supervised: np.ndarray,
    cfg: RunConfig,
    classes: typing.Optional[typing.Sequence] = None,
) -> AigasState:
    """Learns and labels the initial node distribution over the supervised prefix."""

    X_supervised = np.asarray(X_supervised, dtype=float)
    y_supervised = np.asarray(y_supervised)
    classes = np.unique(y_supervised) if classes is None else np.asarray(classes)

    LOGGER.info(
        f"Class proportions of the supervised prefix: "
        f"{class_proportions(y_supervised, classes)}"
    )

    xi = class_imbalance_ratio(y_supervised, classes)
    g0 = initial_budget(xi, cfg.g_base)

    LOGGER.info(f"Imbalance ratio {xi:.3f}, GNG budget G0 = {g0}")

    rng = np.random.default_rng(cfg.seed)

    model = GrowingNeuralGas(
        pick_initial_pair(X_supervised, rng),
        params=cfg.gng_params.with_max_nodes(g0),
        random_state=rng,
    )
    model.fit_batch(X_supervised, passes=cfg.passes, rng=rng)

    positions = model.snapshot()[model.active_mask(0)]
    labels = knn_predict_batch(
        positions, ReferenceSet(points=X_supervised, labels=y_supervised), cfg.k_predict
    )

    LOGGER.info(f"Initial prototypes: {len(positions)} nodes")

    return AigasState(
        model=model,
        prototypes=PrototypeSet(
            batch_index=0,
            positions=positions,
            labels=labels,
            projected_positions=positions.copy(),
        ),
        config=cfg,
        classes=classes,
        rng=rng,
        g0=g0,
        imbalance_ratio=xi,
    )


def aigas_step(
    state: AigasState, batch: Batch
) -> typing.Tuple[AigasState, np.ndarray]:
    """Predicts a batch, then updates, relabels, registers and projects the nodes."""

    if len(batch) == 0:
        raise ValueError(f"batch {batch.index} is empty")

    cfg = state.config
    previous = state.prototypes
    references = previous.reference_set()

    predictions = knn_predict_batch(batch.features, references, cfg.k_predict)

    start = state.model.signal_count
    state.model.fit_batch(batch.features, passes=cfg.passes, rng=state.rng)

    # nodes left idle by this batch stay out of labeling, matching and registration
    positions = state.model.snapshot()[state.model.active_mask(start)]

    labels = knn_predict_batch(positions, references, cfg.k_gng)

    mapping = solve_assignment(pairwise_distances(previous.positions, positions))

    fallback = False
    try:
        transform = fit_rigid(previous.positions, positions, mapping)

    except RegistrationError as err:
        LOGGER.warning(f"Batch {batch.index}: {err}; using the identity transform")
        transform = RigidTransform.identity(positions.shape[1])
        fallback = True

    state.prototypes = PrototypeSet(
        batch_index=batch.index,
        positions=positions,
        labels=labels,
        projected_positions=project(positions, transform),
    )

    state.last_step = StepDiagnostics(
        mapping=mapping,
        transform=transform,
        registration_rms=registration_residual(
            previous.positions, positions, mapping, transform
        ),
        quantization_error=state.model.quantization_error(batch.features),
        fallback=fallback,
    )

    return state, predictions


def run_aigas(
    split: StreamSplit, cfg: RunConfig, verbose: bool = False
) -> PredictionTrace:
    """Runs the prototype tracker over every batch of the unsupervised suffix."""

    LOGGER.info("FUNCTION: run_aigas")

    view = split.model_view()

    LOGGER.info("Initialize prototypes")
    state = aigas_init(view.X_supervised, view.y_supervised, cfg, classes=view.classes)

    trace = PredictionTrace(method="aigas", classes=view.classes)

    LOGGER.info("Process unsupervised batches")
    for batch in tqdm(
        batch_iter(view, cfg.num_batches),
        total=batch_count(split.n_unsupervised, cfg.num_batches),
        disable=not verbose,
    ):
        start = time.perf_counter()
        state, predictions = aigas_step(state, batch)
        elapsed = time.perf_counter() - start

        step = state.last_step

        trace.append(
            BatchRecord(
                batch_index=batch.index,
                offset=batch.offset,
                predictions=predictions,
                y_true=split.y_unsupervised[batch.offset : batch.offset + len(batch)],
                n_prototypes=len(state.prototypes),
                wall_time=elapsed,
                transform=step.transform,
                mapping_cost=step.mapping.mean_cost,
                registration_rms=step.registration_rms,
                quantization_error=step.quantization_error,
                fallback=step.fallback,
            )
        )

    trace.final_model = state.model

    return trace


def run_method(
    method: str, split: StreamSplit, cfg: RunConfig, verbose: bool = False
) -> PredictionTrace:
    """Dispatches to the tracker or to one of the naive baselines."""

    method = method.lower()

    if method == "aigas":
        return run_aigas(split, cfg, verbose=verbose)

    if method in BASELINES:
        return run_baseline(method, split, cfg, verbose=verbose)

    raise ValueError(f"unknown method '{method}'")
