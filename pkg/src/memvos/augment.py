"""In-memory augmentations applied to annotated frames before permanent
insertion: 5 photometric kinds that leave the mask untouched and 6 geometric
kinds that transform frame and mask identically.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from .tensors import MaskMap, as_mask

BRIGHTNESS_DELTA = 0.2      # fraction of full scale
POSTERIZE_BITS = 3          # bits kept per channel
SHARPEN_AMOUNT = 1.0        # unsharp-mask amount
SHARPEN_SIGMA = 1.0         # blur radius inside the unsharp mask, px
BLUR_SIGMA = 2.0            # gaussian blur radius, px
ROTATE_DEGREES = 45.0
ZOOM_OUT = 0.5
ZOOM_IN = 1.5
SHEAR_DEGREES = 20.0
TRANSLATE_PX = 100          # extras-only


@dataclass(frozen=True)
class AugmentationSpec:
    kind: str
    geometric: bool


DEFAULT_SPECS: tuple[AugmentationSpec, ...] = (
    AugmentationSpec("brightness+", False),
    AugmentationSpec("brightness-", False),
    AugmentationSpec("posterize3", False),
    AugmentationSpec("sharpen", False),
    AugmentationSpec("gaussian_blur", False),
    AugmentationSpec("rotate+45", True),
    AugmentationSpec("rotate-45", True),
    AugmentationSpec("zoom0.5", True),
    AugmentationSpec("zoom1.5", True),
    AugmentationSpec("shear+20", True),
    AugmentationSpec("shear-20", True),
)

# Evaluated but rejected kinds, available behind include_extras only.
EXTRA_SPECS: tuple[AugmentationSpec, ...] = (
    AugmentationSpec("grayscale", False),
    AugmentationSpec("translate+100", True),
    AugmentationSpec("crop_mask_region", True),
)


def default_specs() -> list[AugmentationSpec]:
    return list(DEFAULT_SPECS)


def _affine_matrix(kind: str) -> np.ndarray:
    """Forward 2x2 map in (row, col) coordinates about the canvas center."""
    if kind == "rotate+45" or kind == "rotate-45":
        sign = 1.0 if kind.endswith("+45") else -1.0
        theta = math.radians(sign * ROTATE_DEGREES)
        return np.array(
            [[math.cos(theta), -math.sin(theta)], [math.sin(theta), math.cos(theta)]]
        )
    if kind == "zoom0.5":
        return np.diag([ZOOM_OUT, ZOOM_OUT])
    if kind == "zoom1.5":
        return np.diag([ZOOM_IN, ZOOM_IN])
    if kind == "shear+20" or kind == "shear-20":
        sign = 1.0 if kind.endswith("+20") else -1.0
        return np.array([[1.0, 0.0], [sign * math.tan(math.radians(SHEAR_DEGREES)), 1.0]])
    raise ValueError(f"unknown geometric kind {kind!r}")


def _warp(plane: np.ndarray, kind: str, order: int, mode: str, cval: float) -> np.ndarray:
    shape = np.asarray(plane.shape, dtype=np.float64)
    if kind == "translate+100":
        inverse = np.eye(2)
        offset = np.array([0.0, -float(TRANSLATE_PX)])
    else:
        center = (shape - 1.0) / 2.0
        forward = _affine_matrix(kind)
        inverse = np.linalg.inv(forward)
        offset = center - inverse @ center
    return ndimage.affine_transform(
        plane, inverse, offset=offset, order=order, mode=mode, cval=cval,
        output=plane.dtype, prefilter=False,
    )


def transform_mask(mask: MaskMap, spec: AugmentationSpec) -> MaskMap:
    """Apply a spec's geometric part to a mask: nearest-neighbor resampling,
    out-of-canvas filled with background. Photometric kinds are the identity."""
    m = as_mask(mask)
    if not spec.geometric:
        return m.copy()
    if spec.kind == "crop_mask_region":
        return _crop_mask_region(m, m)[1]
    return _warp(m, spec.kind, order=0, mode="constant", cval=0)


def _transform_frame_geometric(frame: np.ndarray, kind: str) -> np.ndarray:
    out = np.empty_like(frame)
    for c in range(frame.shape[2]):
        plane = frame[:, :, c].astype(np.float64)
        warped = _warp(plane, kind, order=1, mode="nearest", cval=0.0)
        out[:, :, c] = np.clip(np.round(warped), 0, 255).astype(np.uint8)
    return out


def _crop_mask_region(frame_like: np.ndarray, mask: MaskMap):
    """Crop to the mask bounding box and rescale back to the full canvas."""
    rows = np.flatnonzero((mask > 0).any(axis=1))
    cols = np.flatnonzero((mask > 0).any(axis=0))
    if rows.size == 0:
        return frame_like.copy(), mask.copy()
    h, w = mask.shape
    r0, r1 = rows[0], rows[-1] + 1
    c0, c1 = cols[0], cols[-1] + 1
    row_idx = np.clip((np.arange(h) * (r1 - r0)) // h + r0, 0, h - 1)
    col_idx = np.clip((np.arange(w) * (c1 - c0)) // w + c0, 0, w - 1)
    if frame_like.ndim == 3:
        cropped = frame_like[np.ix_(row_idx, col_idx)]
    else:
        cropped = frame_like[np.ix_(row_idx, col_idx)]
    return cropped.copy(), mask[np.ix_(row_idx, col_idx)].copy()


def augment_pair(
    frame: np.ndarray, mask: MaskMap, spec: AugmentationSpec
) -> tuple[np.ndarray, MaskMap]:
    """Apply one augmentation to a frame and, for geometric kinds, its mask.

    Canvas size is preserved; uncovered frame regions replicate the edge and
    uncovered mask regions become background.
    """
    f = np.asarray(frame)
    m = as_mask(mask)
    kind = spec.kind

    if kind == "brightness+" or kind == "brightness-":
        delta = BRIGHTNESS_DELTA * 255.0 * (1.0 if kind.endswith("+") else -1.0)
        out = np.clip(f.astype(np.float64) + delta, 0, 255).astype(np.uint8)
        return out, m.copy()
    if kind == "posterize3":
        keep = 0xFF & ~((1 << (8 - POSTERIZE_BITS)) - 1)
        return (f & keep).astype(np.uint8), m.copy()
    if kind == "sharpen":
        blurred = np.stack(
            [ndimage.gaussian_filter(f[:, :, c].astype(np.float64), SHARPEN_SIGMA,
                                     mode="nearest") for c in range(3)], axis=2
        )
        sharp = f.astype(np.float64) + SHARPEN_AMOUNT * (f.astype(np.float64) - blurred)
        return np.clip(np.round(sharp), 0, 255).astype(np.uint8), m.copy()
    if kind == "gaussian_blur":
        out = np.stack(
            [ndimage.gaussian_filter(f[:, :, c].astype(np.float64), BLUR_SIGMA,
                                     mode="nearest") for c in range(3)], axis=2
        )
        return np.clip(np.round(out), 0, 255).astype(np.uint8), m.copy()
    if kind == "grayscale":
        luma = 0.299 * f[:, :, 0] + 0.587 * f[:, :, 1] + 0.114 * f[:, :, 2]
        gray = np.clip(np.round(luma), 0, 255).astype(np.uint8)
        return np.repeat(gray[:, :, None], 3, axis=2), m.copy()
    if kind == "crop_mask_region":
        cropped_frame, cropped_mask = _crop_mask_region(f, m)
        return cropped_frame, cropped_mask
    if spec.geometric:
        return _transform_frame_geometric(f, kind), transform_mask(m, spec)
    raise ValueError(f"unknown augmentation kind {kind!r}")


def augment_set(
    frame: np.ndarray, mask: MaskMap, include_extras: bool = False
) -> list[tuple[np.ndarray, MaskMap]]:
    """All default augmentations (plus extras when requested), fixed order."""
    specs = list(DEFAULT_SPECS) + (list(EXTRA_SPECS) if include_extras else [])
    return [augment_pair(frame, mask, spec) for spec in specs]
