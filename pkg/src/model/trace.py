from __future__ import annotations

import typing
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from src.model.registration import RigidTransform


@dataclass(frozen=True)
class BatchRecord:
    """Outcome of one processed batch.

    `y_true` comes from the evaluation channel and is attached after the
    predictions are made.
    """

    batch_index: int
    offset: int
    predictions: np.ndarray
    y_true: np.ndarray
    n_prototypes: int
    wall_time: float
    transform: typing.Optional[RigidTransform] = None
    mapping_cost: typing.Optional[float] = None
    registration_rms: typing.Optional[float] = None
    quantization_error: typing.Optional[float] = None
    fallback: bool = False

    def __len__(self):
        return len(self.predictions)

    @property
    def error(self) -> float:
        return float(100.0 * np.mean(self.predictions != self.y_true))

    def to_dict(self) -> dict:
        return {
            "batch_index": self.batch_index,
            "offset": self.offset,
            "size": len(self),
            "n_prototypes": self.n_prototypes,
            "wall_time": self.wall_time,
            "error": self.error,
            "transform": None if self.transform is None else self.transform.to_dict(),
            "identity_fallback": self.fallback,
            "mapping_cost": self.mapping_cost,
            "registration_rms": self.registration_rms,
            "quantization_error": self.quantization_error,
            "y_pred": self.predictions,
            "y_true": self.y_true,
        }


@dataclass
class PredictionTrace:
    method: str
    classes: np.ndarray
    records: typing.List[BatchRecord] = field(default_factory=list)
    final_model: typing.Any = None

    def __len__(self):
        return len(self.records)

    def append(self, record: BatchRecord) -> None:
        self.records.append(record)

    @property
    def predictions(self) -> np.ndarray:
        return np.concatenate([r.predictions for r in self.records])

    @property
    def y_true(self) -> np.ndarray:
        return np.concatenate([r.y_true for r in self.records])

    @property
    def batch_sizes(self) -> typing.List[int]:
        return [len(r) for r in self.records]

    @property
    def wall_time(self) -> float:
        return float(sum(r.wall_time for r in self.records))

    def to_frame(self) -> pd.DataFrame:
        """One row per unsupervised instance: t, batch_index, y_true, y_pred."""
        return pd.DataFrame(
            {
                "t": np.arange(1, sum(self.batch_sizes) + 1),
                "batch_index": np.repeat(
                    [r.batch_index for r in self.records], self.batch_sizes
                ),
                "y_true": self.y_true,
                "y_pred": self.predictions,
            }
        )

    def to_jsonl_records(self) -> typing.List[dict]:
        return [dict(method=self.method, **r.to_dict()) for r in self.records]
