"""Deterministic toy encoder and the mask-propagation loop.

The encoder turns frames into hand-crafted key grids (cell-mean color,
gradient energy, weighted grid position) so the memory and selection
machinery runs end to end without a trained network. Precomputed key tensors
can substitute per frame where real features are available.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .augment import augment_set
from .errors import DimensionMismatchError
from .memory import MemoryConfig, MemoryReport, MemoryStore
from .tensors import KeyMap, MaskMap, ValueMap, as_mask, downsample_mask

KEY_CHANNELS = 6


@dataclass
class EncoderConfig:
    """Key-grid geometry and feature weights for the toy encoder."""

    stride: int = 8
    position_weight: float = 0.1
    gradient_weight: float = 1.0

    def __post_init__(self):
        if self.stride < 1:
            raise ValueError(f"stride must be >= 1, got {self.stride}")
        if self.position_weight < 0:
            raise ValueError(f"position_weight must be >= 0, got {self.position_weight}")


def as_frame(frame: np.ndarray) -> np.ndarray:
    """Validate an (H, W, 3) uint8 RGB frame."""
    f = np.asarray(frame)
    if f.ndim != 3 or f.shape[2] != 3:
        raise DimensionMismatchError(f"frame must be (H, W, 3), got {f.shape}")
    if f.shape[0] < 1 or f.shape[1] < 1:
        raise DimensionMismatchError("frame must have positive size")
    if f.dtype != np.uint8:
        raise ValueError(f"frame must be uint8 RGB, got dtype {f.dtype}")
    return f


def _cell_mean(plane: np.ndarray, stride: int) -> np.ndarray:
    """Mean over stride x stride cells, edge-replicating to a full grid."""
    h_pix, w_pix = plane.shape
    grid_h = math.ceil(h_pix / stride)
    grid_w = math.ceil(w_pix / stride)
    pad_h = grid_h * stride - h_pix
    pad_w = grid_w * stride - w_pix
    if pad_h or pad_w:
        plane = np.pad(plane, ((0, pad_h), (0, pad_w)), mode="edge")
    cells = plane.reshape(grid_h, stride, grid_w, stride)
    return cells.mean(axis=(1, 3), dtype=np.float64)


def toy_encode(frame: np.ndarray, cfg: EncoderConfig | None = None) -> KeyMap:
    """Encode a frame into a 6-channel key grid.

    Channels: cell-mean R, G, B in [0, 1]; cell-mean luma gradient magnitude
    (central differences, scaled to [0, 1], times gradient_weight); and the
    position-weighted normalized cell coordinates x/w and y/h.
    """
    cfg = cfg or EncoderConfig()
    f = as_frame(frame).astype(np.float64) / 255.0
    luma = 0.299 * f[:, :, 0] + 0.587 * f[:, :, 1] + 0.114 * f[:, :, 2]
    gy, gx = np.gradient(luma)
    grad = np.clip(np.hypot(gx, gy) / math.sqrt(2.0), 0.0, 1.0)
    channels = [_cell_mean(f[:, :, c], cfg.stride) for c in range(3)]
    channels.append(cfg.gradient_weight * _cell_mean(grad, cfg.stride))
    grid_h, grid_w = channels[0].shape
    xs = cfg.position_weight * (np.arange(grid_w, dtype=np.float64) / grid_w)
    ys = cfg.position_weight * (np.arange(grid_h, dtype=np.float64) / grid_h)
    channels.append(np.broadcast_to(xs[None, :], (grid_h, grid_w)).copy())
    channels.append(np.broadcast_to(ys[:, None], (grid_h, grid_w)).copy())
    return KeyMap(np.stack(channels).astype(np.float32))


def encode_value(
    mask: MaskMap, num_objects: int, target_h: int, target_w: int
) -> ValueMap:
    """Per-label area fractions at key resolution; planes sum to 1 per cell."""
    m = as_mask(mask)
    if m.size and int(m.max()) > num_objects:
        raise ValueError(
            f"mask label {int(m.max())} exceeds object count {num_objects}"
        )
    planes = np.stack(
        [downsample_mask(m, target_h, target_w, o) for o in range(num_objects + 1)]
    )
    planes /= planes.sum(axis=0, keepdims=True)
    return ValueMap(planes)


def decode_mask(value: ValueMap, height: int, width: int) -> MaskMap:
    """Per-cell argmax over planes (ties to the lower label), then
    nearest-neighbor upsample to full resolution."""
    labels = np.argmax(value.data, axis=0).astype(np.int32)
    grid_h, grid_w = labels.shape
    rows = (np.arange(height, dtype=np.int64) * grid_h) // height
    cols = (np.arange(width, dtype=np.int64) * grid_w) // width
    return labels[np.ix_(rows, cols)]


@dataclass
class PropagationResult:
    masks: list[MaskMap]
    keys: list[KeyMap]
    store: MemoryStore
    report: MemoryReport


def load_permanent(
    store: MemoryStore,
    frames: list[np.ndarray],
    annotations: dict[int, MaskMap],
    enc_cfg: EncoderConfig,
    num_objects: int,
    augment: bool = False,
    precomputed_keys: dict[int, KeyMap] | None = None,
) -> None:
    """Encode every annotated frame (plus augmented variants when requested)
    into the permanent tier."""
    precomputed_keys = precomputed_keys or {}
    for idx in sorted(annotations):
        frame = frames[idx]
        mask = annotations[idx]
        key = precomputed_keys.get(idx) or toy_encode(frame, enc_cfg)
        grid_h, grid_w = key.grid
        store.add_permanent(idx, key, encode_value(mask, num_objects, grid_h, grid_w))
        if augment:
            for aug_frame, aug_mask in augment_set(frame, mask):
                store.add_permanent(
                    idx,
                    toy_encode(aug_frame, enc_cfg),
                    encode_value(aug_mask, num_objects, grid_h, grid_w),
                    augmented=True,
                )


def propagate(
    frames: list[np.ndarray],
    annotations: dict[int, MaskMap],
    mem_cfg: MemoryConfig | None = None,
    enc_cfg: EncoderConfig | None = None,
    num_objects: int | None = None,
    augment: bool = False,
    precomputed_keys: dict[int, KeyMap] | None = None,
) -> PropagationResult:
    """Segment every frame from the annotated references.

    Annotated frames are loaded into permanent memory up front and emit their
    ground-truth masks verbatim. All other frames emit the decoded attention
    readout of their key grid; every insertion_every-th non-annotated frame's
    prediction is added to working memory while the temporary tier is enabled.
    Entries of `precomputed_keys` (e.g. ingested XKF1 tensors) replace the toy
    encoder for those frames.
    """
    mem_cfg = mem_cfg or MemoryConfig()
    enc_cfg = enc_cfg or EncoderConfig()
    precomputed_keys = precomputed_keys or {}
    if augment and precomputed_keys:
        raise ValueError(
            "augmented variants are toy-encoded and cannot be mixed with "
            "precomputed keys"
        )
    if not annotations:
        raise ValueError("propagation requires at least one annotation")
    n = len(frames)
    if n < 1:
        raise ValueError("no frames to propagate over")
    height, width = as_frame(frames[0]).shape[:2]
    for i, frame in enumerate(frames):
        if as_frame(frame).shape[:2] != (height, width):
            raise DimensionMismatchError(
                f"frame {i} is {frame.shape[:2]}, expected {(height, width)}"
            )
    for idx, mask in annotations.items():
        if not 0 <= idx < n:
            raise ValueError(f"annotation index {idx} out of range for {n} frames")
        if as_mask(mask).shape != (height, width):
            raise DimensionMismatchError(
                f"annotation at frame {idx} is {mask.shape}, expected {(height, width)}"
            )
    if num_objects is None:
        num_objects = max(int(as_mask(m).max()) for m in annotations.values())

    store = MemoryStore(mem_cfg)
    load_permanent(
        store, frames, annotations, enc_cfg, num_objects,
        augment=augment, precomputed_keys=precomputed_keys,
    )

    masks: list[MaskMap] = []
    keys: list[KeyMap] = []
    non_annotated_seen = 0
    for i in range(n):
        key = precomputed_keys.get(i) or toy_encode(frames[i], enc_cfg)
        keys.append(key)
        if i in annotations:
            masks.append(as_mask(annotations[i]).copy())
            continue
        value = store.readout(key)
        masks.append(decode_mask(value, height, width))
        if (
            mem_cfg.temporary_memory_enabled
            and non_annotated_seen % mem_cfg.insertion_every == 0
        ):
            store.add_working(i, key, value)
        non_annotated_seen += 1

    return PropagationResult(masks=masks, keys=keys, store=store, report=store.memory_report())
