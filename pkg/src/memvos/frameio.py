"""Disk conventions: frames as 5-digit-indexed RGB images, masks as 8-bit
single-channel PNGs whose pixel value is the object label."""

from __future__ import annotations

import io
import re
from pathlib import Path

import numpy as np
from PIL import Image

from .errors import DimensionMismatchError
from .tensors import MaskMap, as_mask

_FRAME_NAME = re.compile(r"^(\d{5})\.(png|jpg|jpeg)$", re.IGNORECASE)


def frame_name(index: int, ext: str = "png") -> str:
    return f"{index:05d}.{ext}"


def list_frame_files(frames_dir: str | Path) -> list[Path]:
    """Frame files of a directory ordered by their 5-digit index.

    Indices must be 0-based and contiguous.
    """
    root = Path(frames_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"frames directory not found: {root}")
    found: dict[int, Path] = {}
    for path in root.iterdir():
        match = _FRAME_NAME.match(path.name)
        if match:
            found[int(match.group(1))] = path
    if not found:
        raise ValueError(f"no frames named NNNNN.png/.jpg in {root}")
    indices = sorted(found)
    if indices != list(range(len(indices))):
        missing = sorted(set(range(len(indices))) - set(indices))[:5]
        raise ValueError(f"frame indices not contiguous from 0 in {root}: missing {missing}")
    return [found[i] for i in indices]


def read_frame(path: str | Path) -> np.ndarray:
    with Image.open(path) as img:
        return np.asarray(img.convert("RGB"), dtype=np.uint8)


def write_frame(path: str | Path, frame: np.ndarray) -> None:
    Image.fromarray(np.asarray(frame, dtype=np.uint8), mode="RGB").save(path)


def load_frames(frames_dir: str | Path) -> list[np.ndarray]:
    """Read all frames of a directory; sizes must match across the sequence."""
    paths = list_frame_files(frames_dir)
    frames = []
    size = None
    for path in paths:
        frame = read_frame(path)
        if size is None:
            size = frame.shape
        elif frame.shape != size:
            raise DimensionMismatchError(
                f"{path.name} is {frame.shape[1]}x{frame.shape[0]}, "
                f"expected {size[1]}x{size[0]}"
            )
        frames.append(frame)
    return frames


def read_mask(path: str | Path) -> MaskMap:
    with Image.open(path) as img:
        if img.mode not in ("L", "P", "I", "I;16"):
            img = img.convert("L")
        arr = np.asarray(img)
    return as_mask(arr.astype(np.int32))


def write_mask(path: str | Path, mask: MaskMap) -> None:
    m = as_mask(mask)
    if m.size and int(m.max()) > 255:
        raise ValueError("mask labels above 255 cannot be written as 8-bit PNG")
    Image.fromarray(m.astype(np.uint8), mode="L").save(path)


def mask_bytes(mask: MaskMap) -> bytes:
    """Encode a mask as PNG bytes (the wire format of the HTTP API)."""
    m = as_mask(mask)
    if m.size and int(m.max()) > 255:
        raise ValueError("mask labels above 255 cannot be encoded as 8-bit PNG")
    buf = io.BytesIO()
    Image.fromarray(m.astype(np.uint8), mode="L").save(buf, format="PNG")
    return buf.getvalue()


def mask_from_bytes(blob: bytes) -> MaskMap:
    with Image.open(io.BytesIO(blob)) as img:
        if img.mode not in ("L", "P", "I", "I;16"):
            img = img.convert("L")
        arr = np.asarray(img)
    return as_mask(arr.astype(np.int32))


def frame_bytes(frame: np.ndarray) -> bytes:
    buf = io.BytesIO()
    Image.fromarray(np.asarray(frame, dtype=np.uint8), mode="RGB").save(buf, format="PNG")
    return buf.getvalue()


def load_mask_dir(mask_dir: str | Path) -> dict[int, MaskMap]:
    """Read every NNNNN.png mask of a directory keyed by frame index."""
    root = Path(mask_dir)
    if not root.is_dir():
        raise FileNotFoundError(f"mask directory not found: {root}")
    masks: dict[int, MaskMap] = {}
    for path in root.iterdir():
        match = _FRAME_NAME.match(path.name)
        if match and path.suffix.lower() == ".png":
            masks[int(match.group(1))] = read_mask(path)
    return masks
