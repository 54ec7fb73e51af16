"""Naive nearest-neighbor baselines.

STC keeps the supervised prefix as its only reference set. SLD and INC add
every predicted batch to the references with its own predictions as
pseudo-labels; SLD then keeps only the most recent `window` points.
"""

from __future__ import annotations

import math
import time

from tqdm import tqdm

from src.base import logger
from src.model.knn import ReferenceSet, knn_predict_batch
from src.model.trace import BatchRecord, PredictionTrace
from src.stream.core import RunConfig, StreamSplit, batch_count, batch_iter

LOGGER = logger.set()

BASELINES = ("stc", "sld", "inc")


def sliding_window_size(kind: str, split: StreamSplit, cfg: RunConfig):
    """Reference budget of a baseline; None means unbounded."""

    if kind == "inc":
        return None

    if kind == "sld":
        window = cfg.sld_window if cfg.sld_window is not None else split.t_s
        return None if math.isinf(window) else int(window)

    return split.t_s


def run_baseline(
    kind: str, split: StreamSplit, cfg: RunConfig, verbose: bool = False
) -> PredictionTrace:

    kind = kind.lower()

    if kind not in BASELINES:
        raise ValueError(f"unknown baseline '{kind}', expected one of {BASELINES}")

    LOGGER.info(f"FUNCTION: run_baseline ({kind})")

    view = split.model_view()
    window = sliding_window_size(kind, split, cfg)

    references = ReferenceSet(points=view.X_supervised, labels=view.y_supervised)
    trace = PredictionTrace(method=kind, classes=view.classes)

    for batch in tqdm(
        batch_iter(view, cfg.num_batches),
        total=batch_count(split.n_unsupervised, cfg.num_batches),
        disable=not verbose,
    ):
        start = time.perf_counter()

        n_references = len(references)
        predictions = knn_predict_batch(batch.features, references, cfg.k_predict)

        if kind != "stc":
            references = references.append(batch.features, predictions)

            if window is not None and len(references) > window:
                references = references.tail(window)

        trace.append(
            BatchRecord(
                batch_index=batch.index,
                offset=batch.offset,
                predictions=predictions,
                y_true=split.y_unsupervised[batch.offset : batch.offset + len(batch)],
                n_prototypes=n_references,
                wall_time=time.perf_counter() - start,
            )
        )

    return trace
