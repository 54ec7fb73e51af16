from __future__ import annotations

import typing
from dataclasses import dataclass

import numpy as np
import pandas as pd
from sklearn.metrics import confusion_matrix, precision_recall_fscore_support


@dataclass(frozen=True)
class PrequentialTrace:
    """Running zero-one error over the stream, in percent."""

    values: np.ndarray

    def __len__(self):
        return len(self.values)

    @property
    def final(self) -> float:
        return float(self.values[-1])

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame({"t": np.arange(1, len(self.values) + 1), "value": self.values})


@dataclass(frozen=True)
class F1Report:
    per_class: typing.Dict[typing.Any, typing.Tuple[float, float, float]]
    macro_f1: float
    confusion: np.ndarray
    classes: np.ndarray

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [
                {"class": c, "precision": p, "recall": r, "f1": f}
                for c, (p, r, f) in self.per_class.items()
            ]
        )


def _check_lengths(y_true, y_pred):
    y_true = np.asarray(y_true)
    y_pred = np.asarray(y_pred)

    if len(y_true) != len(y_pred):
        raise ValueError(f"{len(y_true)} true labels but {len(y_pred)} predictions")

    return y_true, y_pred


def prequential_error(y_true, y_pred) -> PrequentialTrace:
    """P_e(t) = 100/t * sum of zero-one losses up to t."""

    y_true, y_pred = _check_lengths(y_true, y_pred)

    if len(y_true) == 0:
        raise ValueError("prequential error needs at least one prediction")

    losses = (y_true != y_pred).astype(float)

    return PrequentialTrace(
        values=100.0 * np.cumsum(losses) / np.arange(1, len(losses) + 1)
    )


def macro_f1(y_true, y_pred, classes) -> F1Report:
    """Per-class precision, recall and F1, plus their unweighted mean.

    Zero denominators count as 0.
    """

    y_true, y_pred = _check_lengths(y_true, y_pred)
    classes = np.asarray(classes)

    unknown = np.setdiff1d(np.concatenate([y_true, y_pred]), classes)
    if len(unknown) > 0:
        raise ValueError(f"labels {unknown.tolist()} are not in the class set")

    precision, recall, f1, _ = precision_recall_fscore_support(
        y_true, y_pred, labels=classes, average=None, zero_division=0
    )

    return F1Report(
        per_class={
            c: (float(p), float(r), float(f))
            for c, p, r, f in zip(classes.tolist(), precision, recall, f1)
        },
        macro_f1=float(np.mean(f1)),
        confusion=confusion_matrix(y_true, y_pred, labels=classes),
        classes=classes,
    )


def window_starts(length: int, window: int, overlap_fraction: float) -> typing.List[int]:
    stride = max(1, int(round(window * (1 - overlap_fraction))))
    return list(range(0, length - window + 1, stride))


def windowed_f1(
    y_true, y_pred, window: int, overlap_fraction: float = 0.2
) -> typing.List[typing.Tuple[float, float]]:
    """Macro F1 over sliding windows.

    Windows advance by round(window * (1 - overlap_fraction)), at least 1;
    each window averages over the classes present in its ground truth.

    Returns
    -------
    list of (float, float)
        (window center t, macro F1) pairs, t counted from 0.
    """

    y_true, y_pred = _check_lengths(y_true, y_pred)

    if not 1 <= window <= len(y_true):
        raise ValueError(f"window must lie in [1, {len(y_true)}], got {window}")

    if not 0 <= overlap_fraction < 1:
        raise ValueError(f"overlap_fraction must lie in [0, 1), got {overlap_fraction}")

    trace = []

    for start in window_starts(len(y_true), window, overlap_fraction):
        truth = y_true[start : start + window]
        pred = y_pred[start : start + window]

        _, _, f1, _ = precision_recall_fscore_support(
            truth, pred, labels=np.unique(truth), average=None, zero_division=0
        )

        trace.append((start + (window - 1) / 2, float(np.mean(f1))))

    return trace


def batch_errors(y_true, y_pred, batch_sizes: typing.Sequence[int]) -> np.ndarray:
    """Error percent of each batch, not accumulated."""

    y_true, y_pred = _check_lengths(y_true, y_pred)

    if sum(batch_sizes) != len(y_true):
        raise ValueError(f"batch sizes sum to {sum(batch_sizes)}, expected {len(y_true)}")

    bounds = np.cumsum([0, *batch_sizes])

    return np.array(
        [
            100.0 * np.mean(y_true[a:b] != y_pred[a:b])
            for a, b in zip(bounds[:-1], bounds[1:])
        ]
    )


def summarize(y_true, y_pred, classes) -> dict:

    y_true, y_pred = _check_lengths(y_true, y_pred)

    return {
        "preq_error": prequential_error(y_true, y_pred).final,
        "macro_f1": macro_f1(y_true, y_pred, classes).macro_f1,
        "accuracy": float(np.mean(y_true == y_pred)),
        "n": int(len(y_true)),
    }
