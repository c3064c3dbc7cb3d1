"""Memory-based interactive video object segmentation engine."""

from .errors import (
    DimensionMismatchError,
    EmptyMemoryError,
    MemoryDisabledError,
    StalePredictionsError,
)
from .memory import MemoryConfig, MemoryReport, MemoryStore
from .metrics import EvalReport, boundary_f, evaluate_sequence, jaccard
from .pipeline import (
    EncoderConfig,
    PropagationResult,
    decode_mask,
    encode_value,
    propagate,
    toy_encode,
)
from .selection import (
    SelectionConfig,
    SelectionResult,
    composite_key,
    cycle_dissimilarity,
    mask_pixel_count,
    select_next_candidates,
    uniform_baseline,
)
from .tensors import (
    KeyMap,
    MaskMap,
    ValueMap,
    best_match_similarity,
    downsample_mask,
    negative_l2_affinity,
    softmax_columns,
    topk_sparsify,
)

__version__ = "0.1.0"

__all__ = [
    "DimensionMismatchError",
    "EmptyMemoryError",
    "MemoryDisabledError",
    "StalePredictionsError",
    "MemoryConfig",
    "MemoryReport",
    "MemoryStore",
    "EvalReport",
    "boundary_f",
    "evaluate_sequence",
    "jaccard",
    "EncoderConfig",
    "PropagationResult",
    "decode_mask",
    "encode_value",
    "propagate",
    "toy_encode",
    "SelectionConfig",
    "SelectionResult",
    "composite_key",
    "cycle_dissimilarity",
    "mask_pixel_count",
    "select_next_candidates",
    "uniform_baseline",
    "KeyMap",
    "MaskMap",
    "ValueMap",
    "best_match_similarity",
    "downsample_mask",
    "negative_l2_affinity",
    "softmax_columns",
    "topk_sparsify",
    "__version__",
]
