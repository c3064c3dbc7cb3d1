"""Independent brute-force reference implementations used as test oracles.

Everything here recomputes from first principles (no caching, no sharing with
the package's code paths) so agreement is meaningful.
"""

from __future__ import annotations

import numpy as np


def oracle_block_fraction(mask: np.ndarray, grid_h: int, grid_w: int) -> np.ndarray:
    """Per-cell nonzero fraction by explicit block means (divisible sizes only)."""
    src_h, src_w = mask.shape
    assert src_h % grid_h == 0 and src_w % grid_w == 0
    sh, sw = src_h // grid_h, src_w // grid_w
    out = np.zeros((grid_h, grid_w))
    for y in range(grid_h):
        for x in range(grid_w):
            cell = mask[y * sh : (y + 1) * sh, x * sw : (x + 1) * sw]
            out[y, x] = np.mean(cell > 0)
    return out


def oracle_directed_similarity(ref: np.ndarray, probe: np.ndarray) -> np.ndarray:
    """For each probe cell, the max of -||ref_col - probe_col||^2 over ref cells."""
    chan = ref.shape[0]
    ref_cols = ref.reshape(chan, -1).T.astype(np.float64)
    probe_cols = probe.reshape(chan, -1).T.astype(np.float64)
    d2 = ((ref_cols[:, None, :] - probe_cols[None, :, :]) ** 2).sum(axis=2)
    return (-d2).max(axis=0).reshape(probe.shape[1:])


def oracle_cycle_dissimilarity(a: np.ndarray, b: np.ndarray) -> float:
    s_ab = oracle_directed_similarity(a, b)
    s_ba = oracle_directed_similarity(b, a)
    return float(np.maximum(0.0, s_ab - s_ba).sum() / s_ab.size)


def oracle_select(
    keys: list[np.ndarray],
    masks: list[np.ndarray],
    k: int,
    prev: list[int],
    alpha: float = 0.5,
    beta: int = 9,
) -> tuple[list[int], list[float]]:
    """Literal greedy largest-minimal-distance selection, recomputed per round.

    Composite keys blend each frame's key with its downsampled nonzero mask;
    frames under the beta pixel threshold score 0; each round appends the
    unchosen frame with the maximal min-dissimilarity to all chosen ones,
    lowest index on ties.
    """
    n = len(keys)
    composites = []
    for key, mask in zip(keys, masks):
        grid = oracle_block_fraction(np.asarray(mask), key.shape[1], key.shape[2])
        composites.append(alpha * key * grid[None] + (1.0 - alpha) * key)
    chosen = [int(i) for i in prev]
    picked, picked_scores = [], []
    for _ in range(k):
        scores = []
        for j in range(n):
            if np.count_nonzero(np.asarray(masks[j])) < beta:
                scores.append(0.0)
            else:
                scores.append(
                    min(
                        oracle_cycle_dissimilarity(composites[c], composites[j])
                        for c in chosen
                    )
                )
        best, best_score = -1, -1.0
        for j in range(n):
            if j in chosen:
                continue
            if scores[j] > best_score:
                best, best_score = j, scores[j]
        chosen.append(best)
        picked.append(best)
        picked_scores.append(best_score)
    return picked, picked_scores


def oracle_jaccard(pred: np.ndarray, gt: np.ndarray, obj: int) -> float:
    inter = union = 0
    for y in range(pred.shape[0]):
        for x in range(pred.shape[1]):
            p = pred[y, x] == obj
            g = gt[y, x] == obj
            inter += p and g
            union += p or g
    return 1.0 if union == 0 else inter / union


def oracle_boundary_pixels(mask: np.ndarray, obj: int) -> list[tuple[int, int]]:
    h, w = mask.shape
    out = []
    for y in range(h):
        for x in range(w):
            if mask[y, x] != obj:
                continue
            for dy, dx in ((1, 0), (-1, 0), (0, 1), (0, -1)):
                yy, xx = y + dy, x + dx
                if not (0 <= yy < h and 0 <= xx < w) or mask[yy, xx] != obj:
                    out.append((y, x))
                    break
    return out


def oracle_boundary_f(pred: np.ndarray, gt: np.ndarray, obj: int, radius: int) -> float:
    """O(B^2) pairwise-distance boundary matching with integer arithmetic."""
    pred_b = oracle_boundary_pixels(pred, obj)
    gt_b = oracle_boundary_pixels(gt, obj)
    if not pred_b and not gt_b:
        return 1.0
    if not pred_b or not gt_b:
        return 0.0
    r2 = radius * radius

    def matched_fraction(source, target):
        hits = 0
        for y, x in source:
            if any((y - ty) ** 2 + (x - tx) ** 2 <= r2 for ty, tx in target):
                hits += 1
        return hits / len(source)

    precision = matched_fraction(pred_b, gt_b)
    recall = matched_fraction(gt_b, pred_b)
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)
