import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from memvos.tensors import KeyMap


@pytest.fixture
def rng():
    return np.random.default_rng(20240811)


def random_keymap(rng, channels=3, height=4, width=4, scale=1.0):
    return KeyMap(scale * rng.normal(size=(channels, height, width)))


def integer_keymap(rng, channels, height, width, high=4):
    """Small-integer keys: every downstream float op stays exact, so the
    vectorized implementation and the loop oracles agree bit for bit."""
    return rng.integers(0, high, size=(channels, height, width)).astype(np.float32)


def random_instance(rng, beta=9):
    """One randomized selection instance: integer keys, mixed valid/invalid
    masks at 4x the grid resolution, a non-empty prev set and a feasible k."""
    channels = int(rng.integers(1, 5))
    grid_h = int(rng.integers(1, 5))
    grid_w = int(rng.integers(1, 5))
    n = int(rng.integers(2, 13))
    full_h, full_w = grid_h * 4, grid_w * 4
    keys = [KeyMap(integer_keymap(rng, channels, grid_h, grid_w)) for _ in range(n)]
    masks = []
    for _ in range(n):
        mask = np.zeros((full_h, full_w), dtype=np.int32)
        if rng.random() < 0.3:
            count = int(rng.integers(0, beta))     # invalid: below threshold
        else:
            count = int(rng.integers(beta, full_h * full_w + 1))
        flat = rng.choice(full_h * full_w, size=count, replace=False)
        mask.flat[flat] = 1
        masks.append(mask)
    n_prev = int(rng.integers(1, 3))
    prev = sorted(rng.choice(n, size=min(n_prev, n - 1), replace=False).tolist())
    k = int(rng.integers(1, min(3, n - len(prev)) + 1))
    return keys, masks, k, prev
