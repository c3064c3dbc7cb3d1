"""Three-tier feature memory: permanent (annotated references, immutable),
working (FIFO of own predictions, capped), and long-term (usage-ranked
prototypes of evicted working entries).
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DimensionMismatchError, EmptyMemoryError, MemoryDisabledError
from .tensors import KeyMap, ValueMap, negative_l2_affinity, softmax_columns, topk_sparsify
from .xkf import write_xkf


@dataclass
class MemoryConfig:
    """Store sizing and policy knobs.

    working_cap is the maximum number of working frame-blocks, insertion_every
    the prediction-insertion period in processed frames, compression_rate the
    entries-per-prototype ratio for long-term compression, topk the readout
    sparsification width (None disables it).
    """

    working_cap: int = 100
    insertion_every: int = 5
    compression_rate: float = 625.0
    topk: int | None = 30
    temporary_memory_enabled: bool = True

    def __post_init__(self):
        if self.working_cap < 1:
            raise ValueError(f"working_cap must be >= 1, got {self.working_cap}")
        if self.insertion_every < 1:
            raise ValueError(f"insertion_every must be >= 1, got {self.insertion_every}")
        if self.compression_rate <= 1.0:
            raise ValueError(
                f"compression_rate must be > 1, got {self.compression_rate}"
            )
        if self.topk is not None and self.topk < 1:
            raise ValueError(f"topk must be >= 1 or None, got {self.topk}")


@dataclass(eq=False)
class MemoryBlock:
    """One frame's worth of memory entries (key/value columns plus usage)."""

    frame: int | None
    keys: np.ndarray    # (C, n) float32
    values: np.ndarray  # (P, n) float64
    usage: np.ndarray   # (n,) float64, cumulative attention mass
    augmented: bool = False
    origins: np.ndarray | None = None  # (n, 2) [frame, grid position] per entry

    @property
    def entries(self) -> int:
        return self.keys.shape[1]


@dataclass
class MemoryReport:
    permanent_entries: int
    working_blocks: int
    longterm_prototypes: int
    inserted: int
    evicted: int
    permanent_blocks: int = 0
    working_entries: int = 0
    evicted_entries: int = 0

    def to_json(self) -> dict:
        return dict(self.__dict__)


class MemoryStore:
    """Holds the three tiers and serves attention readout over all of them.

    Permanent blocks are frozen on insertion and never evicted or compressed;
    working blocks rotate FIFO under the cap, with evicted batches reduced to
    their highest-usage entries in long-term memory.
    """

    def __init__(self, config: MemoryConfig | None = None):
        self.config = config or MemoryConfig()
        self.permanent: list[MemoryBlock] = []
        self.working: list[MemoryBlock] = []
        self.longterm: list[MemoryBlock] = []
        self.inserted = 0          # working blocks ever inserted
        self.evicted = 0           # working blocks evicted
        self.evicted_entries = 0   # entries that went through compression
        self.channels: int | None = None
        self.planes: int | None = None

    def _check_shapes(self, key: KeyMap, value: ValueMap) -> None:
        if key.grid != value.grid:
            raise DimensionMismatchError(
                f"key grid {key.grid} does not match value grid {value.grid}"
            )
        if self.channels is None:
            self.channels = key.channels
            self.planes = value.planes
        elif key.channels != self.channels or value.planes != self.planes:
            raise DimensionMismatchError(
                f"block C={key.channels}/P={value.planes} does not match "
                f"store C={self.channels}/P={self.planes}"
            )

    @staticmethod
    def _make_block(frame, key: KeyMap, value: ValueMap, augmented=False) -> MemoryBlock:
        n = key.data.shape[1] * key.data.shape[2]
        keys = np.ascontiguousarray(key.flat(), dtype=np.float32)
        values = np.ascontiguousarray(value.flat(), dtype=np.float64)
        origins = np.stack(
            [np.full(n, frame, dtype=np.int64), np.arange(n, dtype=np.int64)], axis=1
        )
        return MemoryBlock(
            frame=frame,
            keys=keys,
            values=values,
            usage=np.zeros(n, dtype=np.float64),
            augmented=augmented,
            origins=origins,
        )

    def add_permanent(
        self, frame: int, key: KeyMap, value: ValueMap, augmented: bool = False
    ) -> None:
        """Append an annotated frame's block; frozen once stored.

        Re-adding a frame's base block replaces everything previously held for
        that frame (including its augmented variants); augmented blocks append.
        """
        self._check_shapes(key, value)
        block = self._make_block(frame, key, value, augmented=augmented)
        block.keys.setflags(write=False)
        block.values.setflags(write=False)
        if not augmented:
            self.permanent = [b for b in self.permanent if b.frame != frame]
        self.permanent.append(block)

    def add_working(self, frame: int, key: KeyMap, value: ValueMap) -> None:
        """Append a prediction block; evicts oldest blocks past the cap."""
        if not self.config.temporary_memory_enabled:
            raise MemoryDisabledError("temporary working memory is disabled")
        self._check_shapes(key, value)
        self.working.append(self._make_block(frame, key, value))
        self.inserted += 1
        batch: list[MemoryBlock] = []
        while len(self.working) > self.config.working_cap:
            batch.append(self.working.pop(0))
            self.evicted += 1
        if batch:
            self.compress_to_longterm(batch)

    def compress_to_longterm(self, blocks: list[MemoryBlock]) -> None:
        """Reduce an eviction batch to its max(1, floor(E/rate)) highest-usage
        entries; ties go to the lower (frame, position) origin."""
        if not blocks:
            raise ValueError("eviction batch must not be empty")
        keys = np.concatenate([b.keys for b in blocks], axis=1)
        values = np.concatenate([b.values for b in blocks], axis=1)
        usage = np.concatenate([b.usage for b in blocks])
        origins = np.concatenate([b.origins for b in blocks], axis=0)
        total = keys.shape[1]
        keep = max(1, math.floor(total / self.config.compression_rate))
        order = np.lexsort((origins[:, 1], origins[:, 0], -usage))
        chosen = order[:keep]
        self.longterm.append(
            MemoryBlock(
                frame=None,
                keys=np.ascontiguousarray(keys[:, chosen]),
                values=np.ascontiguousarray(values[:, chosen]),
                usage=usage[chosen].copy(),
                origins=origins[chosen].copy(),
            )
        )
        self.evicted_entries += total

    def _all_blocks(self) -> list[MemoryBlock]:
        return [*self.permanent, *self.working, *self.longterm]

    def readout(self, query: KeyMap) -> ValueMap:
        """Attention-weighted aggregation of all stored values for a query.

        Concatenates every tier's keys, scores them against each query pixel,
        optionally keeps only the topk entries per pixel, softmax-normalizes,
        and returns the weighted value mix. Each entry's usage accumulates the
        attention mass it received.
        """
        blocks = self._all_blocks()
        if not blocks:
            raise EmptyMemoryError("memory store is empty")
        keys = np.concatenate([b.keys for b in blocks], axis=1)
        values = np.concatenate([b.values for b in blocks], axis=1)
        raw = negative_l2_affinity(keys, query.flat())
        if self.config.topk is not None:
            raw = topk_sparsify(raw, self.config.topk)
        weights = softmax_columns(raw)
        out = values @ weights.astype(np.float64)
        mass = weights.sum(axis=1, dtype=np.float64)
        offset = 0
        for block in blocks:
            block.usage += mass[offset : offset + block.entries]
            offset += block.entries
        planes = values.shape[0]
        return ValueMap(out.reshape(planes, *query.grid))

    def memory_report(self) -> MemoryReport:
        return MemoryReport(
            permanent_entries=sum(b.entries for b in self.permanent),
            working_blocks=len(self.working),
            longterm_prototypes=sum(b.entries for b in self.longterm),
            inserted=self.inserted,
            evicted=self.evicted,
            permanent_blocks=len(self.permanent),
            working_entries=sum(b.entries for b in self.working),
            evicted_entries=self.evicted_entries,
        )

    def permanent_digest(self) -> str:
        """SHA-256 over permanent key/value bytes, for bit-identity checks."""
        h = hashlib.sha256()
        for block in self.permanent:
            h.update(np.ascontiguousarray(block.keys).tobytes())
            h.update(np.ascontiguousarray(block.values).tobytes())
        return h.hexdigest()

    def dump_snapshot(self, out_dir: str | Path) -> None:
        """Write every block as XKF1 tensors plus a JSON manifest."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        manifest = []
        tiers = [("permanent", self.permanent), ("working", self.working),
                 ("longterm", self.longterm)]
        for tier, blocks in tiers:
            for i, block in enumerate(blocks):
                stem = f"{tier}_{i:04d}"
                write_xkf(out / f"{stem}_keys.xkf", block.keys)
                write_xkf(out / f"{stem}_values.xkf", block.values)
                manifest.append({
                    "tier": tier,
                    "frame": block.frame,
                    "augmented": block.augmented,
                    "usage_sum": float(block.usage.sum()),
                    "keys": f"{stem}_keys.xkf",
                    "values": f"{stem}_values.xkf",
                })
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2))
