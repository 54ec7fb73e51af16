import os
import time
import typing
from dataclasses import asdict, dataclass
from pathlib import Path

import numpy as np
import pandas as pd

from src.base import logger
from src.base.commons import dump_json, dump_jsonl, to_json_string, to_snake_case
from src.base.file import hash_file, hash_string
from src.config import get_config, load_run_config
from src.model import __version__
from src.model.data import load_csv
from src.model.generators import DatasetSpec, generate_stream, get_generator_params
from src.model.gng import gng_export
from src.model.metrics import macro_f1, prequential_error, summarize, windowed_f1
from src.model.pipeline import run_method
from src.stream.core import (
    RunConfig,
    batch_size,
    class_proportions,
    normalize_stream,
    split_stream,
)

LOGGER = logger.set()


@dataclass(frozen=True)
class LoadedStream:
    X: np.ndarray
    y: np.ndarray
    spec: DatasetSpec
    identity: dict
    label_mapping: typing.Dict[int, str]


def get_output_dir(out: typing.Optional[str]) -> Path:
    return Path(out or os.getenv("DRIFTGAS_OUT", "runs"))


def build_config(args) -> RunConfig:
    return load_run_config(
        args.config,
        labeled_fraction=args.labeled_frac,
        num_batches=args.batches,
        g_base=args.g,
        k_predict=args.k,
        k_gng=args.kgng,
        passes=args.passes,
        seed=args.seed,
        sld_window=args.sld_window,
        window_overlap=args.window_overlap,
    )


def load_stream(
    source: str, synthetic: bool, cfg: RunConfig, label_column="last", has_header=False
) -> LoadedStream:
    """Reads a CSV stream or samples a catalog generator, normalized on the prefix."""

    if not synthetic:
        data = load_csv(
            source,
            label_column=label_column,
            has_header=has_header,
            labeled_fraction=cfg.labeled_fraction,
        )

        return LoadedStream(
            X=data.X,
            y=data.y,
            spec=data.spec,
            identity={"source": "csv", "path": str(source), "sha256": hash_file(source)},
            label_mapping=data.label_mapping,
        )

    params = get_generator_params(source, seed=cfg.seed)
    X, y = generate_stream(params)
    X, _ = normalize_stream(X, max(1, int(cfg.labeled_fraction * len(X))))

    return LoadedStream(
        X=X,
        y=y,
        spec=params.spec,
        identity={
            "source": "generator",
            "name": source,
            "sha256": hash_string(to_json_string(params.to_dict())),
        },
        label_mapping={c: str(c) for c in range(params.spec.n_classes)},
    )


def export_run(trace, split, cfg: RunConfig, run_dir: Path) -> typing.Dict[str, str]:

    filepaths = get_config("config/filepaths.yaml")
    run_dir.mkdir(parents=True, exist_ok=True)

    paths = {
        key: run_dir / filepaths[f"{key}_path"]
        for key in ("predictions", "prequential", "f1_window", "transforms")
    }

    trace.to_frame().to_csv(paths["predictions"], index=False)

    prequential_error(trace.y_true, trace.predictions).to_frame().to_csv(
        paths["prequential"], index=False
    )

    window = min(batch_size(split.n_unsupervised, cfg.num_batches), len(trace.y_true))
    pd.DataFrame(
        windowed_f1(trace.y_true, trace.predictions, window, cfg.window_overlap),
        columns=["t", "value"],
    ).to_csv(paths["f1_window"], index=False)

    dump_jsonl(trace.to_jsonl_records(), paths["transforms"])

    if trace.final_model is not None:
        paths["gng_final"] = run_dir / filepaths["gng_final_path"]
        dump_json(gng_export(trace.final_model), paths["gng_final"])

    return {key: str(path) for key, path in paths.items()}


def execute_run(
    stream: LoadedStream,
    method: str,
    cfg: RunConfig,
    out_dir: Path,
    verbose: bool = False,
) -> dict:
    """Splits, runs one method, writes the run directory and returns its manifest."""

    start = time.perf_counter()

    LOGGER.info("Split stream")
    split = split_stream(
        stream.X,
        stream.y,
        cfg.labeled_fraction,
        classes=np.arange(stream.spec.n_classes),
    )

    LOGGER.info(f"Run method {method}")
    trace = run_method(method, split, cfg, verbose=verbose)

    LOGGER.info("Evaluate predictions")
    results = summarize(trace.y_true, trace.predictions, split.classes)
    results["per_class"] = macro_f1(
        trace.y_true, trace.predictions, split.classes
    ).per_class
    results["identity_fallbacks"] = sum(r.fallback for r in trace.records)
    results["method_wall_time"] = trace.wall_time

    filepaths = get_config("config/filepaths.yaml")
    run_dir = out_dir / filepaths["run_dir_template"].format(
        dataset=to_snake_case(stream.spec.name), method=method, seed=cfg.seed
    )

    LOGGER.info(f"Export traces to {run_dir}")
    files = export_run(trace, split, cfg, run_dir)

    manifest = {
        "version": __version__,
        "method": method,
        "config": asdict(cfg),
        "dataset": {
            **stream.identity,
            **stream.spec.to_dict(),
            "label_mapping": stream.label_mapping,
            "supervised_class_proportions": class_proportions(
                split.y_supervised, split.classes
            ),
        },
        "results": results,
        "files": files,
        "wall_time": time.perf_counter() - start,
    }

    manifest_path = run_dir / filepaths["manifest_path"]
    dump_json(manifest, manifest_path, indent=2)
    manifest["files"]["manifest"] = str(manifest_path)

    return manifest


def format_summary(manifest: dict) -> str:
    results = manifest["results"]
    return (
        f"{manifest['method']:<6} {manifest['dataset']['name']:<16} "
        f"preq-error {results['preq_error']:6.2f}  "
        f"macro-F1 {100 * results['macro_f1']:6.2f}"
    )


def cmd_run(args) -> dict:

    LOGGER.info("FUNCTION: cmd_run")

    cfg = build_config(args)
    synthetic = args.synth is not None

    LOGGER.info("Load stream")
    stream = load_stream(
        args.synth if synthetic else args.dataset,
        synthetic,
        cfg,
        label_column=args.label_col,
        has_header=args.has_header,
    )

    manifest = execute_run(
        stream, args.method, cfg, get_output_dir(args.out), verbose=args.verbose
    )

    print(format_summary(manifest))

    return manifest
