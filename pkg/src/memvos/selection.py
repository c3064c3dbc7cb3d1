"""Annotation-candidate selection: greedy largest-minimal-distance over
cycle-consistent key dissimilarity, plus the uniform sampling baseline.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DimensionMismatchError
from .tensors import KeyMap, MaskMap, as_mask, best_match_similarity, downsample_mask

DEFAULT_ALPHA = 0.5
DEFAULT_BETA = 9


@dataclass
class SelectionConfig:
    """Knobs for candidate selection.

    alpha blends mask-weighted against plain keys (0 ignores masks, 1 keeps
    only masked regions); beta is the minimum nonzero-pixel count for a frame
    to be a valid candidate; k is the number of candidates per round.
    """

    alpha: float = DEFAULT_ALPHA
    beta: int = DEFAULT_BETA
    k: int = 5

    def __post_init__(self):
        if not 0.0 <= self.alpha <= 1.0:
            raise ValueError(f"alpha must be in [0, 1], got {self.alpha}")
        if self.beta < 0:
            raise ValueError(f"beta must be >= 0, got {self.beta}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


@dataclass
class SelectionResult:
    """Newly selected frames in importance order with their max-min scores."""

    new_candidates: list[int]
    dissimilarity_scores: list[float]
    chosen_history: list[int] = field(default_factory=list)

    def to_json(self) -> list[dict]:
        return [
            {"frame": int(f), "score": float(s)}
            for f, s in zip(self.new_candidates, self.dissimilarity_scores)
        ]


def composite_key(key: KeyMap, mask_grid: np.ndarray, alpha: float) -> KeyMap:
    """Blend a key grid with its mask: alpha * key * mask + (1 - alpha) * key."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must be in [0, 1], got {alpha}")
    grid = np.asarray(mask_grid, dtype=np.float32)
    if grid.shape != key.grid:
        raise DimensionMismatchError(
            f"mask grid {grid.shape} does not match key grid {key.grid}"
        )
    if grid.size and (grid.min() < 0.0 or grid.max() > 1.0):
        raise ValueError("mask grid values must lie in [0, 1]")
    blended = alpha * key.data * grid[None, :, :] + (1.0 - alpha) * key.data
    return KeyMap(blended)


def cycle_dissimilarity(r_a: KeyMap, r_b: KeyMap) -> float:
    """Grid-mean of ReLU(S_ab - S_ba) over the two directed best-match maps.

    Non-negative, and exactly zero for identical composite keys; asymmetric in
    general because the two directed maps live on different frames' matches.
    """
    if r_a.data.shape != r_b.data.shape:
        raise DimensionMismatchError(
            f"composite keys differ in shape: {r_a.data.shape} vs {r_b.data.shape}"
        )
    s_ab = best_match_similarity(r_a, r_b)
    s_ba = best_match_similarity(r_b, r_a)
    gap = np.maximum(0.0, s_ab.astype(np.float64) - s_ba.astype(np.float64))
    return float(gap.sum() / gap.size)


def mask_pixel_count(mask: MaskMap, object_id: int | None = None) -> int:
    """Count full-resolution pixels of one label, or any nonzero when None."""
    m = as_mask(mask)
    if object_id is None:
        return int(np.count_nonzero(m))
    return int(np.count_nonzero(m == object_id))


def uniform_baseline(n_frames: int, k: int) -> list[int]:
    """Evenly spaced frame indices: floor of k points from 0 to n_frames - 1."""
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    if k > n_frames:
        raise ValueError(f"k={k} exceeds frame count {n_frames}")
    return [int(i) for i in np.floor(np.linspace(0, n_frames - 1, k))]


def select_next_candidates(
    keys: list[KeyMap],
    masks: list[MaskMap],
    k: int,
    prev: list[int],
    cfg: SelectionConfig | None = None,
) -> SelectionResult:
    """Greedily pick k new annotation candidates, most diverse first.

    Every frame gets a composite key from its own mask (annotation or current
    prediction). Each round scores every unchosen frame by its minimal cycle
    dissimilarity to all chosen candidates - frames whose masks have fewer
    than beta nonzero pixels score 0 - and appends the argmax, ties broken
    toward the lowest frame index. Chosen frames are never re-selected.
    """
    cfg = cfg or SelectionConfig()
    if k < 1:
        raise ValueError(f"k must be >= 1, got {k}")
    n = len(keys)
    if n < 1:
        raise ValueError("no frames to select from")
    if len(masks) != n:
        raise ValueError(f"keys ({n}) and masks ({len(masks)}) differ in length")
    if not prev:
        raise ValueError("prev candidate list must not be empty")
    prev = [int(i) for i in prev]
    if any(i < 0 or i >= n for i in prev):
        raise ValueError(f"prev indices out of range for {n} frames: {prev}")
    if k > n - len(set(prev)):
        raise ValueError(
            f"cannot select {k} new candidates from {n - len(set(prev))} unchosen frames"
        )

    grid_h, grid_w = keys[0].grid
    composites = []
    for key, mask in zip(keys, masks):
        grid = downsample_mask(mask, grid_h, grid_w, object_id=None)
        composites.append(composite_key(key, grid, cfg.alpha))

    valid = np.array([mask_pixel_count(m) >= cfg.beta for m in masks], dtype=bool)
    chosen = list(prev)
    chosen_set = set(chosen)

    # Running min over chosen candidates; invalid-mask frames are pinned at 0.
    min_scores = np.zeros(n, dtype=np.float64)
    min_scores[valid] = np.inf
    for c in chosen:
        for j in np.flatnonzero(valid):
            d = cycle_dissimilarity(composites[c], composites[int(j)])
            if d < min_scores[j]:
                min_scores[j] = d

    new_candidates: list[int] = []
    scores: list[float] = []
    for _ in range(k):
        best_frame = -1
        best_score = -1.0
        for j in range(n):
            if j in chosen_set:
                continue
            if min_scores[j] > best_score:
                best_score = float(min_scores[j])
                best_frame = j
        new_candidates.append(best_frame)
        scores.append(best_score)
        chosen.append(best_frame)
        chosen_set.add(best_frame)
        for j in np.flatnonzero(valid):
            d = cycle_dissimilarity(composites[best_frame], composites[int(j)])
            if d < min_scores[j]:
                min_scores[j] = d

    return SelectionResult(
        new_candidates=new_candidates,
        dissimilarity_scores=scores,
        chosen_history=chosen,
    )
