from pathlib import Path

import pandas as pd
from tqdm import tqdm

from src.base import logger
from src.base.exceptions import DriftGasError
from src.config import get_config

from app.run import build_config, execute_run, get_output_dir, load_stream

LOGGER = logger.set()

SCORE_COLUMNS = ["preq_error", "macro_f1"]
CELL_COLUMNS = ["dataset", "method", "status", *SCORE_COLUMNS, "error"]


def is_csv_source(source: str) -> bool:
    return source.lower().endswith(".csv") or Path(source).exists()


def aggregate_rows(cells: pd.DataFrame) -> pd.DataFrame:
    """Mean and std of each method's scores over its successful cells."""

    done = cells[cells["status"] == "ok"]

    rows = []
    for method in cells["method"].unique():
        scores = done.loc[done["method"] == method, SCORE_COLUMNS].astype(float)
        row = {"dataset": "Average", "method": method, "status": f"{len(scores)} ok"}

        for column in SCORE_COLUMNS:
            row[column] = scores[column].mean()
            row[f"{column}_std"] = scores[column].std(ddof=0)

        rows.append(row)

    return pd.DataFrame(rows)


def build_table(cells: pd.DataFrame) -> pd.DataFrame:
    return pd.concat([cells, aggregate_rows(cells)], ignore_index=True)


def cmd_sweep(args) -> pd.DataFrame:
    """Runs every dataset x method cell; a failing cell is recorded and skipped."""

    LOGGER.info("FUNCTION: cmd_sweep")

    cfg = build_config(args)
    out_dir = get_output_dir(args.out)

    grid = [(d, m) for d in args.datasets for m in args.methods]
    streams = {}
    load_errors = {}
    cells = []

    for source, method in tqdm(grid, disable=not args.verbose):
        cell = {"dataset": source, "method": method, "status": "ok"}

        try:
            if source in load_errors:
                raise load_errors[source]

            if source not in streams:
                LOGGER.info(f"Load stream {source}")
                try:
                    streams[source] = load_stream(
                        source,
                        not is_csv_source(source),
                        cfg,
                        label_column=args.label_col,
                        has_header=args.has_header,
                    )
                except (DriftGasError, ValueError, OSError) as err:
                    load_errors[source] = err
                    raise

            manifest = execute_run(streams[source], method, cfg, out_dir)
            cell.update({k: manifest["results"][k] for k in SCORE_COLUMNS})

        except (DriftGasError, ValueError, OSError) as err:
            LOGGER.warning(f"Cell {source} x {method} failed: {err}")
            cell.update({"status": "failed", "error": str(err)})

        cells.append(cell)

    table = build_table(pd.DataFrame(cells, columns=CELL_COLUMNS))

    filepaths = get_config("config/filepaths.yaml")
    out_dir.mkdir(parents=True, exist_ok=True)

    table.to_csv(out_dir / filepaths["sweep_table_path"], index=False)

    text = table.to_string(index=False, float_format=lambda x: f"{x:.2f}", na_rep="")
    with open(out_dir / filepaths["sweep_text_path"], "w") as file:
        file.write(text + "\n")

    print(text)

    return table
