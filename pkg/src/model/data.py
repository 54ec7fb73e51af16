from __future__ import annotations

import math
import typing
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import pandas as pd
from sklearn.preprocessing import MinMaxScaler

from src.base import logger
from src.base.exceptions import DatasetError
from src.model.generators import DatasetSpec
from src.stream.core import normalize_stream

LOGGER = logger.set()


@dataclass(frozen=True)
class StreamData:
    """A loaded stream: features, dense class ids and their provenance."""

    X: np.ndarray
    y: np.ndarray
    spec: DatasetSpec
    label_mapping: typing.Dict[int, str]
    scaler: typing.Optional[MinMaxScaler] = None


def resolve_label_column(label_column: typing.Union[str, int], n_columns: int) -> int:

    if label_column == "last":
        return n_columns - 1

    try:
        index = int(label_column)
    except (TypeError, ValueError):
        raise DatasetError(f"label column must be 'last' or an integer, got {label_column}")

    if not -n_columns <= index < n_columns:
        raise DatasetError(f"label column {index} is out of range for {n_columns} columns")

    return index % n_columns


def read_raw_table(filepath: typing.Union[str, Path], has_header: bool) -> pd.DataFrame:

    try:
        raw = pd.read_csv(
            filepath,
            header=0 if has_header else None,
            dtype=str,
            keep_default_na=False,
            skip_blank_lines=True,
        )

    except pd.errors.EmptyDataError:
        raise DatasetError(f"{filepath} is empty")

    except pd.errors.ParserError as err:
        raise DatasetError(f"ragged rows in {filepath}: {err}")

    if raw.empty:
        raise DatasetError(f"{filepath} has no data rows")

    short_rows = np.flatnonzero(raw.isna().any(axis=1).to_numpy())
    if len(short_rows) > 0:
        row = short_rows[0] + 1 + int(has_header)
        raise DatasetError(
            f"ragged row {row} in {filepath}: expected {raw.shape[1]} columns"
        )

    return raw


def parse_features(raw: pd.DataFrame, has_header: bool) -> np.ndarray:

    values = raw.apply(lambda column: pd.to_numeric(column.str.strip(), errors="coerce"))
    X = values.to_numpy(dtype=float)

    invalid = ~np.isfinite(X)
    if invalid.any():
        row, column = np.argwhere(invalid)[0]
        raise DatasetError(
            f"row {row + 1 + int(has_header)}: invalid feature value "
            f"'{raw.iat[row, column]}' in column {raw.columns[column]}"
        )

    return X


def load_csv(
    filepath: typing.Union[str, Path],
    label_column: typing.Union[str, int] = "last",
    has_header: bool = False,
    labeled_fraction: typing.Optional[float] = 0.05,
    normalize: bool = True,
    name: typing.Optional[str] = None,
) -> StreamData:
    """Reads a numeric stream CSV, features then class by default.

    Parameters
    ----------
    filepath : str or Path
        CSV file, one instance per row, in arrival order.
    label_column : 'last' or int
        Position of the class column.
    has_header : bool
        Whether the first row holds column names.
    labeled_fraction : float, optional
        Size of the supervised prefix whose min/max statistics scale the
        whole stream. Ignored when `normalize` is False.
    normalize : bool
        Apply prefix-only min-max scaling.
    name : str, optional
        Dataset name; defaults to the file stem.

    Returns
    -------
    StreamData
    """

    LOGGER.info(f"Loading stream from {filepath}")

    raw = read_raw_table(filepath, has_header)
    label_index = resolve_label_column(label_column, raw.shape[1])

    if raw.shape[1] < 2:
        raise DatasetError(f"{filepath} needs at least one feature and one label column")

    feature_columns = [c for i, c in enumerate(raw.columns) if i != label_index]
    X = parse_features(raw[feature_columns], has_header)

    codes, uniques = pd.factorize(raw.iloc[:, label_index].str.strip())
    label_mapping = {i: str(u) for i, u in enumerate(uniques)}

    if len(uniques) < 2:
        LOGGER.warning(f"{filepath} holds a single class")

    scaler = None
    if normalize:
        n_supervised = max(1, math.floor((labeled_fraction or 1.0) * len(X)))
        X, scaler = normalize_stream(X, n_supervised)

    spec = DatasetSpec(
        name=name or Path(filepath).stem,
        n_features=X.shape[1],
        n_classes=len(uniques),
        n_instances=len(X),
    )

    LOGGER.info(
        f"Loaded {spec.n_instances} instances, {spec.n_features} features, "
        f"{spec.n_classes} classes"
    )

    return StreamData(
        X=X, y=codes.astype(int), spec=spec, label_mapping=label_mapping, scaler=scaler
    )


def write_csv(X: np.ndarray, y: np.ndarray, filepath: typing.Union[str, Path]) -> None:
    """Writes features then label, no header, readable by `load_csv`."""

    data = pd.DataFrame(np.asarray(X, dtype=float))
    data["label"] = np.asarray(y)
    data.to_csv(filepath, header=False, index=False)
