import typing
from pathlib import Path

import yaml

from src.base.exceptions import DatasetError, StreamError
from src.model.gng import GngParams
from src.stream.core import RunConfig

PROJECT_ROOT = Path(__file__).resolve().parents[2]

RUN_CONFIG_FIELDS = (
    "labeled_fraction",
    "num_batches",
    "g_base",
    "k_predict",
    "k_gng",
    "passes",
    "seed",
    "sld_window",
    "window_overlap",
)


def resolve_path(filename) -> Path:
    """Relative paths are looked up in the working directory, then in the project root."""

    path = Path(filename)

    if path.is_absolute() or path.exists():
        return path

    return PROJECT_ROOT / path


def get_config(filename):

    with open(resolve_path(filename), "r") as file:
        settings = yaml.safe_load(file)

    return settings


def set_default_values(dictionary, key, default):
    if key not in dictionary:
        return default
    else:
        return dictionary[key]


def get_gng_params(settings: dict) -> GngParams:

    gng_settings = set_default_values(settings, "gng_parameters", None) or {}

    return GngParams(**gng_settings)


def build_run_config(settings: typing.Optional[dict] = None, **overrides) -> RunConfig:
    """Typed run configuration from a settings dict plus command-line overrides.

    Overrides set to None are ignored, so only the flags actually passed
    replace the file defaults.
    """

    settings = dict(settings or {})
    settings.update({k: v for k, v in overrides.items() if v is not None})

    unknown = set(settings) - set(RUN_CONFIG_FIELDS) - {"gng_parameters"}
    if unknown:
        raise StreamError(f"unknown run settings: {sorted(unknown)}")

    values = {
        name: settings[name] for name in RUN_CONFIG_FIELDS if name in settings
    }

    if values.get("sld_window") is not None:
        values["sld_window"] = float(values["sld_window"])

    return RunConfig(gng_params=get_gng_params(settings), **values)


def load_run_config(filename="config/run.yaml", **overrides) -> RunConfig:
    return build_run_config(get_config(filename), **overrides)


def get_catalog_entry(name: str, filename="config/datasets.yaml") -> dict:

    catalog = get_config(filename)

    for entry in catalog:
        if entry["name"] == name:
            return entry

    raise DatasetError(
        f"unknown synthetic stream '{name}', expected one of "
        f"{[entry['name'] for entry in catalog]}"
    )


def get_catalog_names(filename="config/datasets.yaml") -> typing.List[str]:
    return [entry["name"] for entry in get_config(filename)]
