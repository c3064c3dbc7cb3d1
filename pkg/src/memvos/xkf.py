"""XKF1 binary tensor format: magic, u32 LE ndim, u32 LE dims, float32 LE data.

Used for precomputed-feature ingestion, key-cache persistence and debug dumps.
"""

from __future__ import annotations

import struct
from pathlib import Path

import numpy as np

MAGIC = b"XKF1"


def write_xkf(path: str | Path, array: np.ndarray) -> None:
    arr = np.ascontiguousarray(array, dtype=np.float32)
    header = MAGIC + struct.pack("<I", arr.ndim)
    header += struct.pack(f"<{arr.ndim}I", *arr.shape)
    Path(path).write_bytes(header + arr.tobytes())


def read_xkf(path: str | Path) -> np.ndarray:
    blob = Path(path).read_bytes()
    if blob[:4] != MAGIC:
        raise ValueError(f"{path}: not an XKF1 file (bad magic {blob[:4]!r})")
    (ndim,) = struct.unpack_from("<I", blob, 4)
    dims = struct.unpack_from(f"<{ndim}I", blob, 8)
    offset = 8 + 4 * ndim
    count = int(np.prod(dims)) if ndim else 1
    expected = offset + 4 * count
    if len(blob) != expected:
        raise ValueError(
            f"{path}: payload length {len(blob)} does not match dims {dims}"
        )
    data = np.frombuffer(blob, dtype="<f4", offset=offset, count=count)
    return data.reshape(dims).astype(np.float32)
