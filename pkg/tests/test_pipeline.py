import copy
import math
import os
from dataclasses import replace
from pathlib import Path

import numpy as np
import pytest

from src.model.baselines import run_baseline, sliding_window_size
from src.model.data import load_csv
from src.model.generators import generate_stream, get_generator_params
from src.model.metrics import macro_f1, prequential_error
from src.model.pipeline import (
    aigas_init,
    aigas_step,
    initial_budget,
    run_aigas,
    run_method,
)
from src.stream.core import (
    Batch,
    RunConfig,
    StreamSplit,
    batch_iter,
    normalize_stream,
    split_stream,
)


def synthetic_split(name, seed=0, n_instances=None, labeled_fraction=0.05):
    params = get_generator_params(name, seed=seed, n_instances=n_instances)
    X, y = generate_stream(params)
    X, _ = normalize_stream(X, math.floor(labeled_fraction * len(X)))
    return split_stream(X, y, labeled_fraction, classes=np.arange(params.spec.n_classes))


@pytest.fixture
def blob_split(two_blobs):
    return split_stream(*two_blobs, 0.1)


@pytest.mark.parametrize("xi, g0", [(1.0, 200), (9.0, 1000), (1.5, 250), (1.125, 213)])
def test_initial_budget(xi, g0):
    assert initial_budget(xi, 100) == g0


def test_init_labels_every_node(blob_split, small_run_config):
    state = aigas_init(blob_split.X_supervised, blob_split.y_supervised, small_run_config)

    assert state.g0 == 20
    assert 2 <= len(state.prototypes) <= state.g0
    assert set(state.prototypes.labels.tolist()) <= {0, 1}
    np.testing.assert_array_equal(
        state.prototypes.projected_positions, state.prototypes.positions
    )


def test_step_predicts_then_updates(blob_split, small_run_config):
    state = aigas_init(blob_split.X_supervised, blob_split.y_supervised, small_run_config)
    batch = next(batch_iter(blob_split.model_view(), 10))

    state, predictions = aigas_step(state, batch)

    assert len(predictions) == len(batch)
    assert state.prototypes.batch_index == 1
    assert state.last_step.transform.is_proper
    assert len(state.prototypes) <= state.g0


def test_stationary_stream_gives_near_identity_transforms(blob_split, small_run_config):
    state = aigas_init(blob_split.X_supervised, blob_split.y_supervised, small_run_config)

    for batch in batch_iter(blob_split.model_view(), 10):
        state, _ = aigas_step(state, batch)

    transform = state.last_step.transform
    assert np.linalg.norm(transform.rotation - np.eye(2)) <= 0.1
    assert np.linalg.norm(transform.translation) <= 0.1


def test_projected_prototypes_follow_a_translating_stream():
    rng = np.random.default_rng(11)
    delta = np.array([0.02, 0.01])
    centers = np.array([[0.0, 0.0], [1.0, 0.0]])
    n_batches, size = 60, 400

    def sample(n, shift):
        y = np.arange(n) % 2
        return centers[y] + shift + 0.05 * rng.standard_normal((n, 2)), y

    X_supervised, y_supervised = sample(400, 0.0)
    batches = [sample(size, b * delta) for b in range(1, n_batches + 1)]

    split = StreamSplit(
        X_supervised=X_supervised,
        y_supervised=y_supervised,
        X_unsupervised=np.vstack([X for X, _ in batches]),
        y_unsupervised=np.concatenate([y for _, y in batches]),
        classes=np.array([0, 1]),
    )
    cfg = RunConfig(num_batches=n_batches, g_base=20, seed=0)
    state = aigas_init(split.X_supervised, split.y_supervised, cfg)

    gaps = []
    for batch in batch_iter(split.model_view(), n_batches):
        state, _ = aigas_step(state, batch)

        if 20 <= batch.index < n_batches:
            X_next, y_next = batches[batch.index]
            prototypes = state.prototypes
            for c in (0, 1):
                projected = prototypes.projected_positions[prototypes.labels == c]
                gaps.append(
                    np.linalg.norm(projected.mean(axis=0) - X_next[y_next == c].mean(axis=0))
                )

    assert max(gaps) <= 2 * np.linalg.norm(delta)

    distances = np.linalg.norm(state.prototypes.positions[:, None] - batches[-1][0], axis=2)
    assert distances.min(axis=1).max() < 0.5


def test_step_rejects_empty_batch(blob_split, small_run_config):
    state = aigas_init(blob_split.X_supervised, blob_split.y_supervised, small_run_config)

    with pytest.raises(ValueError):
        aigas_step(state, Batch(index=1, features=np.empty((0, 2))))


def test_node_labels_depend_on_the_previous_batch_only(blob_split, small_run_config):
    batches = list(batch_iter(blob_split.model_view(), 10))

    clean = aigas_init(blob_split.X_supervised, blob_split.y_supervised, small_run_config)
    tainted = copy.deepcopy(clean)
    tainted.prototypes = replace(
        tainted.prototypes, labels=np.full(len(tainted.prototypes), 7)
    )

    clean, _ = aigas_step(clean, batches[0])
    tainted, _ = aigas_step(tainted, batches[0])
    assert set(tainted.prototypes.labels.tolist()) == {7}

    tainted.prototypes = replace(tainted.prototypes, labels=clean.prototypes.labels)

    clean, clean_predictions = aigas_step(clean, batches[1])
    tainted, tainted_predictions = aigas_step(tainted, batches[1])

    np.testing.assert_array_equal(tainted.prototypes.labels, clean.prototypes.labels)
    np.testing.assert_array_equal(tainted_predictions, clean_predictions)


def test_previous_labels_drive_predictions(blob_split, small_run_config):
    state = aigas_init(blob_split.X_supervised, blob_split.y_supervised, small_run_config)
    state.prototypes = replace(state.prototypes, labels=np.ones(len(state.prototypes), dtype=int))

    state, predictions = aigas_step(state, next(batch_iter(blob_split.model_view(), 10)))

    assert set(predictions.tolist()) == {1}
    assert set(state.prototypes.labels.tolist()) == {1}



def test_run_aigas_collates_every_suffix_instance(blob_split, small_run_config):
    trace = run_aigas(blob_split, small_run_config)

    assert len(trace.predictions) == blob_split.n_unsupervised
    np.testing.assert_array_equal(trace.y_true, blob_split.y_unsupervised)
    assert len(trace) == 10
    assert set(trace.predictions.tolist()) <= {0, 1}
    assert trace.final_model is not None


def test_run_aigas_is_deterministic(blob_split, small_run_config):
    first = run_aigas(blob_split, small_run_config)
    second = run_aigas(blob_split, small_run_config)

    np.testing.assert_array_equal(first.predictions, second.predictions)
    np.testing.assert_array_equal(
        first.final_model.snapshot(), second.final_model.snapshot()
    )


def test_single_batch_stream(blob_split):
    cfg = RunConfig(num_batches=1, g_base=10)

    trace = run_aigas(blob_split, cfg)

    assert len(trace) == 1
    assert len(trace.records[0]) == blob_split.n_unsupervised


@pytest.mark.parametrize("method", ["aigas", "stc", "sld", "inc"])
def test_corrupted_evaluation_labels_change_no_prediction(
    method, blob_split, small_run_config
):
    corrupted = blob_split.with_evaluation_labels(1 - blob_split.y_unsupervised)

    clean = run_method(method, blob_split, small_run_config)
    dirty = run_method(method, corrupted, small_run_config)

    np.testing.assert_array_equal(clean.predictions, dirty.predictions)
    np.testing.assert_array_equal(dirty.y_true, 1 - blob_split.y_unsupervised)


def test_stc_keeps_the_prefix_only(blob_split, small_run_config):
    trace = run_baseline("stc", blob_split, small_run_config)

    assert {r.n_prototypes for r in trace.records} == {blob_split.t_s}


def test_sld_window_bounds_the_references(blob_split):
    cfg = RunConfig(num_batches=10, sld_window=50)
    trace = run_baseline("sld", blob_split, cfg)

    assert [r.n_prototypes for r in trace.records][1:] == [50] * 9
    assert sliding_window_size("sld", blob_split, RunConfig()) == blob_split.t_s


def test_unbounded_sld_equals_inc(blob_split):
    sld = run_baseline("sld", blob_split, RunConfig(num_batches=10, sld_window=math.inf))
    inc = run_baseline("inc", blob_split, RunConfig(num_batches=10))

    np.testing.assert_array_equal(sld.predictions, inc.predictions)
    assert [r.n_prototypes for r in sld.records] == [r.n_prototypes for r in inc.records]


def test_stc_matches_inc_without_drift(blob_split):
    cfg = RunConfig(num_batches=10)
    stc = run_baseline("stc", blob_split, cfg)
    inc = run_baseline("inc", blob_split, cfg)

    classes = blob_split.classes
    assert abs(
        macro_f1(stc.y_true, stc.predictions, classes).macro_f1
        - macro_f1(inc.y_true, inc.predictions, classes).macro_f1
    ) <= 0.05


def test_unknown_method(blob_split):
    with pytest.raises(ValueError):
        run_method("compose", blob_split, RunConfig())


def test_trace_exports(blob_split, small_run_config):
    trace = run_aigas(blob_split, small_run_config)

    frame = trace.to_frame()
    records = trace.to_jsonl_records()

    assert list(frame.columns) == ["t", "batch_index", "y_true", "y_pred"]
    assert len(frame) == blob_split.n_unsupervised
    assert len(records) == len(trace)
    assert records[0]["method"] == "aigas"
    assert records[0]["transform"]["rotation"].shape == (2, 2)


@pytest.mark.slow
def test_tracks_one_moving_class():
    split = synthetic_split("1cdt", seed=0)

    trace = run_aigas(split, RunConfig(seed=0))

    assert prequential_error(trace.y_true, trace.predictions).final <= 2.0


@pytest.mark.slow
def test_tracks_rotating_classes():
    split = synthetic_split("4cr", seed=0)

    trace = run_aigas(split, RunConfig(seed=0))

    assert macro_f1(trace.y_true, trace.predictions, split.classes).macro_f1 >= 0.95


@pytest.mark.slow
def test_static_baseline_degrades_under_translation():
    split = synthetic_split("2cdt", seed=0)
    cfg = RunConfig(seed=0)

    aigas = run_aigas(split, cfg)
    stc = run_baseline("stc", split, cfg)

    aigas_error = prequential_error(aigas.y_true, aigas.predictions).final
    stc_error = prequential_error(stc.y_true, stc.predictions).final

    assert stc_error >= 5 * aigas_error


@pytest.mark.slow
@pytest.mark.parametrize("name, max_error", [("1CDT", 0.5), ("GEARS_2C_2D", 2.0)])
def test_benchmark_files(name, max_error):
    root = os.getenv("DRIFTGAS_BENCHMARK_DIR")
    path = Path(root) / f"{name}.csv" if root else None

    if path is None or not path.exists():
        pytest.skip(f"benchmark file {name}.csv not available")

    data = load_csv(path)
    split = split_stream(data.X, data.y, 0.05, classes=np.arange(data.spec.n_classes))
    trace = run_aigas(split, RunConfig())

    assert prequential_error(trace.y_true, trace.predictions).final <= max_error
