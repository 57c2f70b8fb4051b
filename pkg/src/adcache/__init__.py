"""Training-free test-time calibration with adaptive per-class feature caches."""

from .adapt import run_adaptation
from .allocation import (
    AugmentSpec,
    augment_feature,
    capacity,
    complete_all,
    complete_queue,
    scaling_factor,
)
from .cache import (
    CacheEntry,
    CacheState,
    ClassQueue,
    confidence_score,
    diversity_score,
    export_snapshot,
    joint_score,
    make_entry,
    score_entries,
)
from .core import AdcConfig, ConfigError, InteractionClass, entropy, l2_normalize, pseudo_label, softmax
from .frequency import FrequencyTable, load_frequency_file, observe
from .metrics import EvalReport, EvaluationUnavailableError, average_precision, build_report, write_report
from .records import PredictionRecord, RecordFormatError, RecordHeader, load_records, save_records
from .retrieval import KeyValuePair, affinity, build_key_value, cache_logits, enhance, fuse, gather_entries
from .selection import update_cache
from .stream import StreamSpec, generate_stream

__version__ = "0.1.0"

__all__ = [
    "AdcConfig",
    "AugmentSpec",
    "CacheEntry",
    "CacheState",
    "ClassQueue",
    "ConfigError",
    "EvalReport",
    "EvaluationUnavailableError",
    "FrequencyTable",
    "InteractionClass",
    "KeyValuePair",
    "PredictionRecord",
    "RecordFormatError",
    "RecordHeader",
    "StreamSpec",
    "affinity",
    "augment_feature",
    "average_precision",
    "build_key_value",
    "build_report",
    "cache_logits",
    "capacity",
    "complete_all",
    "complete_queue",
    "confidence_score",
    "diversity_score",
    "enhance",
    "entropy",
    "export_snapshot",
    "fuse",
    "gather_entries",
    "generate_stream",
    "joint_score",
    "l2_normalize",
    "load_frequency_file",
    "load_records",
    "make_entry",
    "observe",
    "pseudo_label",
    "run_adaptation",
    "save_records",
    "scaling_factor",
    "score_entries",
    "softmax",
    "update_cache",
    "write_report",
]
