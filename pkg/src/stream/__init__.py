from src.stream.core import (
    Batch,
    LabeledInstance,
    ModelView,
    RunConfig,
    StreamSplit,
    as_arrays,
    batch_count,
    batch_iter,
    batch_size,
    class_counts,
    class_imbalance_ratio,
    class_proportions,
    normalize_stream,
    split_stream,
)
