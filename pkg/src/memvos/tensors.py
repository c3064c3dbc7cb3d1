"""Dense feature grids and the similarity primitives everything else builds on.

Keys are (C, h, w) float32 grids matched by negative squared-L2 distance,
values are (P, h, w) payload grids aggregated by attention readout, and masks
are full-resolution (H, W) integer label images with 0 as background.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DimensionMismatchError, EmptyMemoryError

# (H, W) integer label image; 0 = background, 1..O = objects.
MaskMap = np.ndarray

# (P_mem, Q) similarity matrix; raw entries are <= 0, softmaxed columns sum to 1.
AffinityMatrix = np.ndarray

# Query-axis chunking bound for the pairwise-difference tensor (elements).
_AFFINITY_CHUNK_ELEMS = 32_000_000


@dataclass(eq=False)
class KeyMap:
    """Per-frame matching features, laid out (channels, height, width)."""

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float32)
        if data.ndim != 3 or min(data.shape) < 1:
            raise DimensionMismatchError(
                f"key grid must be (C, h, w) with positive dims, got {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("key grid contains non-finite values")
        self.data = data

    @property
    def channels(self) -> int:
        return self.data.shape[0]

    @property
    def height(self) -> int:
        return self.data.shape[1]

    @property
    def width(self) -> int:
        return self.data.shape[2]

    @property
    def grid(self) -> tuple[int, int]:
        return self.data.shape[1], self.data.shape[2]

    def flat(self) -> np.ndarray:
        """Key columns as a (C, h*w) matrix, row-major over the grid."""
        return self.data.reshape(self.channels, -1)


@dataclass(eq=False)
class ValueMap:
    """Per-frame payload grid, laid out (planes, height, width).

    Kept in float64: the toy pipeline stores per-cell label fractions here and
    relies on them staying an exact partition of unity.
    """

    data: np.ndarray

    def __post_init__(self):
        data = np.asarray(self.data, dtype=np.float64)
        if data.ndim != 3 or min(data.shape) < 1:
            raise DimensionMismatchError(
                f"value grid must be (P, h, w) with positive dims, got {data.shape}"
            )
        if not np.all(np.isfinite(data)):
            raise ValueError("value grid contains non-finite values")
        self.data = data

    @property
    def planes(self) -> int:
        return self.data.shape[0]

    @property
    def grid(self) -> tuple[int, int]:
        return self.data.shape[1], self.data.shape[2]

    def flat(self) -> np.ndarray:
        return self.data.reshape(self.planes, -1)


def as_mask(mask: np.ndarray) -> MaskMap:
    """Validate and canonicalize a label image to int32 (H, W), labels >= 0."""
    m = np.asarray(mask)
    if m.ndim != 2:
        raise DimensionMismatchError(f"mask must be 2-D (H, W), got shape {m.shape}")
    if not np.issubdtype(m.dtype, np.integer):
        raise ValueError(f"mask labels must be integers, got dtype {m.dtype}")
    m = m.astype(np.int32, copy=False)
    if m.size and m.min() < 0:
        raise ValueError("mask labels must be >= 0")
    return m


def negative_l2_affinity(memory_keys: np.ndarray, query_keys: np.ndarray) -> AffinityMatrix:
    """Raw attention scores: entry (p, q) = -sum_c (mem[c, p] - query[c, q])^2.

    Every entry is <= 0 and exactly 0 only where the two key columns match.
    Squared differences are accumulated in float64, the result is float32.
    """
    mem = np.asarray(memory_keys, dtype=np.float32)
    query = np.asarray(query_keys, dtype=np.float32)
    if mem.ndim != 2 or query.ndim != 2:
        raise DimensionMismatchError("key columns must be 2-D (C, count) matrices")
    if mem.shape[0] != query.shape[0]:
        raise DimensionMismatchError(
            f"channel mismatch: memory C={mem.shape[0]} vs query C={query.shape[0]}"
        )
    if mem.shape[1] == 0:
        raise EmptyMemoryError("memory holds no key columns")
    n_mem, n_query = mem.shape[1], query.shape[1]
    out = np.empty((n_mem, n_query), dtype=np.float32)
    chunk = max(1, _AFFINITY_CHUNK_ELEMS // max(1, mem.shape[0] * n_mem))
    for start in range(0, n_query, chunk):
        stop = min(start + chunk, n_query)
        diff = mem[:, :, None] - query[:, None, start:stop]
        out[:, start:stop] = -np.einsum("cpq,cpq->pq", diff, diff, dtype=np.float64)
    return out


def softmax_columns(raw: AffinityMatrix) -> AffinityMatrix:
    """Normalize each column with a max-subtracted softmax; columns sum to 1."""
    a = np.asarray(raw)
    if a.ndim != 2:
        raise DimensionMismatchError("affinity must be a 2-D matrix")
    if a.shape[0] == 0:
        raise EmptyMemoryError("cannot normalize an affinity with zero rows")
    a = a.astype(np.float64)
    a -= a.max(axis=0, keepdims=True)
    np.exp(a, out=a)
    a /= a.sum(axis=0, keepdims=True, dtype=np.float64)
    return a.astype(np.float32)


def topk_sparsify(raw: AffinityMatrix, k_top: int) -> AffinityMatrix:
    """Keep the k_top largest entries per column, set the rest to -inf.

    Ties are broken toward lower row indices. k_top >= rows is the identity.
    """
    if k_top < 1:
        raise ValueError(f"k_top must be >= 1, got {k_top}")
    a = np.array(raw, dtype=np.float32, copy=True)
    if a.ndim != 2:
        raise DimensionMismatchError("affinity must be a 2-D matrix")
    if k_top >= a.shape[0]:
        return a
    order = np.argsort(-a, axis=0, kind="stable")
    keep = np.zeros(a.shape, dtype=bool)
    np.put_along_axis(keep, order[:k_top], True, axis=0)
    a[~keep] = -np.inf
    return a


def best_match_similarity(reference: KeyMap, probe: KeyMap) -> np.ndarray:
    """Best achievable similarity of each probe pixel against the reference.

    Output cell p = max over reference pixels q of -||ref[:, q] - probe[:, p]||^2,
    shaped like the probe grid. Identical maps give an exactly-zero grid.
    Grids may differ in size; callers that subtract two directed maps
    positionally must pass equal grids.
    """
    if reference.channels != probe.channels:
        raise DimensionMismatchError(
            f"channel mismatch: {reference.channels} vs {probe.channels}"
        )
    raw = negative_l2_affinity(reference.flat(), probe.flat())
    return raw.max(axis=0).reshape(probe.grid)


def _integral_at(integral: np.ndarray, ys: np.ndarray, xs: np.ndarray) -> np.ndarray:
    """Evaluate a pixel-indicator integral image at fractional coordinates.

    Bilinear interpolation is exact here because the integral of data constant
    on unit pixels is bilinear within every unit cell.
    """
    max_y = integral.shape[0] - 1
    max_x = integral.shape[1] - 1
    y0 = np.clip(np.floor(ys).astype(np.int64), 0, max_y)
    x0 = np.clip(np.floor(xs).astype(np.int64), 0, max_x)
    y1 = np.minimum(y0 + 1, max_y)
    x1 = np.minimum(x0 + 1, max_x)
    fy = (ys - y0)[:, None]
    fx = (xs - x0)[None, :]
    return (
        integral[np.ix_(y0, x0)] * (1 - fy) * (1 - fx)
        + integral[np.ix_(y0, x1)] * (1 - fy) * fx
        + integral[np.ix_(y1, x0)] * fy * (1 - fx)
        + integral[np.ix_(y1, x1)] * fy * fx
    )


def downsample_mask(
    mask: MaskMap, target_h: int, target_w: int, object_id: int | None
) -> np.ndarray:
    """Area-average a label image down to the key grid.

    Each output cell holds the fraction of its source region covered by
    `object_id` (or by any nonzero label when `object_id` is None). Exact for
    divisible sizes, proportional-overlap weighting otherwise.
    """
    m = as_mask(mask)
    src_h, src_w = m.shape
    if target_h < 1 or target_w < 1:
        raise DimensionMismatchError("target grid must be at least 1x1")
    if target_h > src_h or target_w > src_w:
        raise DimensionMismatchError(
            f"target {target_h}x{target_w} exceeds source {src_h}x{src_w}"
        )
    indicator = (m > 0) if object_id is None else (m == object_id)
    integral = np.zeros((src_h + 1, src_w + 1), dtype=np.float64)
    integral[1:, 1:] = indicator.astype(np.float64).cumsum(axis=0).cumsum(axis=1)
    ys = np.linspace(0.0, src_h, target_h + 1)
    xs = np.linspace(0.0, src_w, target_w + 1)
    corner = _integral_at(integral, ys, xs)
    box = corner[1:, 1:] - corner[:-1, 1:] - corner[1:, :-1] + corner[:-1, :-1]
    cell_area = (src_h / target_h) * (src_w / target_w)
    return np.clip(box / cell_area, 0.0, 1.0)
