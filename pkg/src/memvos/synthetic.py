"""Fixed, fully deterministic synthetic videos for tests, benchmarks and the
bundled demo sessions."""

from __future__ import annotations

import numpy as np

from .selection import uniform_baseline
from .tensors import MaskMap

SQUARE_COLOR = (230, 80, 40)
SQUARE_DRIFT = (-2.1, 1.25, 1.9)  # per-frame RGB drift of the moving square
BACKGROUND = (25, 30, 60)


def _solid(height: int, width: int, color) -> np.ndarray:
    frame = np.empty((height, width, 3), dtype=np.uint8)
    frame[:] = np.asarray(color, dtype=np.uint8)
    return frame


def _clip_color(color) -> tuple[int, int, int]:
    return tuple(int(np.clip(round(c), 0, 255)) for c in color)


def _bounce(t: int, limit: int, step: int) -> int:
    """Triangle-wave position in [0, limit] advancing `step` px per tick."""
    if limit <= 0:
        return 0
    phase = (t * step) % (2 * limit)
    return phase if phase <= limit else 2 * limit - phase


def translating_square(
    n_frames: int = 60,
    height: int = 96,
    width: int = 128,
    square: int = 40,
    step: int = 8,
    drift: tuple[float, float, float] = SQUARE_DRIFT,
) -> tuple[list[np.ndarray], list[MaskMap]]:
    """A colored square bouncing horizontally over a flat background.

    The default step equals the encoder stride, so the object stays
    cell-aligned; the square's color drifts linearly so later frames look
    less like frame 0 and extra annotations genuinely help.
    """
    y0 = ((height - square) // 2 // step) * step
    limit = width - square
    frames, masks = [], []
    for t in range(n_frames):
        x0 = _bounce(t, limit, step)
        color = _clip_color(
            np.asarray(SQUARE_COLOR, dtype=np.float64)
            + t * np.asarray(drift, dtype=np.float64)
        )
        frame = _solid(height, width, BACKGROUND)
        frame[y0 : y0 + square, x0 : x0 + square] = color
        mask = np.zeros((height, width), dtype=np.int32)
        mask[y0 : y0 + square, x0 : x0 + square] = 1
        frames.append(frame)
        masks.append(mask)
    return frames, masks


def nested_annotation_sets(n_frames: int) -> tuple[list[int], list[int], list[int]]:
    """Nested uniform annotation sets of sizes 1, 5 and 10."""
    ten = uniform_baseline(n_frames, 10)
    five = ten[::2]
    return [ten[0]], five, ten


def quality_suite_config():
    """Memory configuration the quality-scaling suite is pinned to.

    The temporary tier is frozen so predictions depend on the annotated
    references alone; with it enabled the store adapts to the slow color
    drift and every annotation budget saturates at J = 1.
    """
    from .memory import MemoryConfig

    return MemoryConfig(temporary_memory_enabled=False)


def palindromic_square(
    n_frames: int = 41,
    height: int = 64,
    width: int = 128,
    square: int = 32,
    step: int = 4,
) -> tuple[list[np.ndarray], list[MaskMap]]:
    """A mirrored sequence: frame c-d equals frame c+d around the center."""
    if n_frames % 2 == 0:
        raise ValueError("palindromic sequence needs an odd frame count")
    center = n_frames // 2
    base_frames, base_masks = [], []
    y0 = ((height - square) // 2 // 8) * 8
    limit = width - square
    for t in range(center + 1):
        x0 = _bounce(t, limit, step)
        frame = _solid(height, width, BACKGROUND)
        frame[y0 : y0 + square, x0 : x0 + square] = SQUARE_COLOR
        mask = np.zeros((height, width), dtype=np.int32)
        mask[y0 : y0 + square, x0 : x0 + square] = 1
        base_frames.append(frame)
        base_masks.append(mask)
    frames, masks = [], []
    for t in range(n_frames):
        src = t if t <= center else 2 * center - t
        frames.append(base_frames[src].copy())
        masks.append(base_masks[src].copy())
    return frames, masks


def identical_bands(
    n_frames: int = 12, height: int = 72, width: int = 120
) -> tuple[list[np.ndarray], MaskMap]:
    """Identical frames of three flat vertical color bands, plus the mask of
    the middle band (the natural annotation target for demos)."""
    band = width // 3
    colors = [(200, 60, 50), (60, 180, 70), (50, 90, 210)]
    frame = np.empty((height, width, 3), dtype=np.uint8)
    for i, color in enumerate(colors):
        x1 = width if i == 2 else (i + 1) * band
        frame[:, i * band : x1] = color
    mask = np.zeros((height, width), dtype=np.int32)
    mask[:, band : 2 * band] = 1
    return [frame.copy() for _ in range(n_frames)], mask


def clustered_video(
    n_frames: int = 60,
    n_clusters: int = 3,
    height: int = 64,
    width: int = 96,
    square: int = 32,
) -> tuple[list[np.ndarray], list[MaskMap], list[int]]:
    """Identical frames within each contiguous cluster; the target square sits
    at a different, increasingly distant position per cluster.

    Position (not color) is what separates clusters: the cycle-consistent
    dissimilarity only reacts to pixels mapping to different places, so
    purely photometric scene changes would all score zero.
    """
    if n_clusters < 1:
        raise ValueError("need at least one cluster")
    block = n_frames // n_clusters
    y0 = ((height - square) // 2 // 8) * 8
    gap = (width - square) // max(1, n_clusters - 1)
    gap = (gap // 8) * 8
    frames, masks, cluster_of = [], [], []
    for t in range(n_frames):
        cluster = min(t // block, n_clusters - 1)
        x0 = cluster * gap
        frame = _solid(height, width, BACKGROUND)
        frame[y0 : y0 + square, x0 : x0 + square] = SQUARE_COLOR
        mask = np.zeros((height, width), dtype=np.int32)
        mask[y0 : y0 + square, x0 : x0 + square] = 1
        frames.append(frame)
        masks.append(mask)
        cluster_of.append(cluster)
    return frames, masks, cluster_of
