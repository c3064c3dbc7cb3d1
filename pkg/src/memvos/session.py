"""Interactive session orchestration: annotate, propagate, suggest, persist.

A session owns the frame sequence, the user's annotations, the latest
propagation output (predictions plus key cache) and the selection history,
and round-trips through a directory layout of JSON manifest, mask PNGs and
XKF1 key tensors.
"""

from __future__ import annotations

import json
import shutil
import uuid
from dataclasses import asdict, dataclass, field
from pathlib import Path

from . import frameio
from .errors import DimensionMismatchError, StalePredictionsError
from .memory import MemoryConfig, MemoryReport
from .metrics import EvalReport, evaluate_sequence
from .pipeline import EncoderConfig, propagate
from .selection import SelectionConfig, SelectionResult, select_next_candidates
from .tensors import KeyMap, MaskMap, as_mask
from .xkf import read_xkf, write_xkf

MANIFEST_NAME = "session.json"
MANIFEST_FORMAT = 1


@dataclass
class SessionConfig:
    memory: MemoryConfig = field(default_factory=MemoryConfig)
    selection: SelectionConfig = field(default_factory=SelectionConfig)
    encoder: EncoderConfig = field(default_factory=EncoderConfig)
    augment: bool = False

    def to_json(self) -> dict:
        return {
            "memory": asdict(self.memory),
            "selection": asdict(self.selection),
            "encoder": asdict(self.encoder),
            "augment": self.augment,
        }

    @classmethod
    def from_json(cls, data: dict | None) -> "SessionConfig":
        data = data or {}
        return cls(
            memory=MemoryConfig(**data.get("memory", {})),
            selection=SelectionConfig(**data.get("selection", {})),
            encoder=EncoderConfig(**data.get("encoder", {})),
            augment=bool(data.get("augment", False)),
        )


class Session:
    """One video's annotate/propagate/suggest loop and its persistent state."""

    def __init__(
        self,
        frames_dir: str | Path,
        config: SessionConfig | None = None,
        session_id: str | None = None,
    ):
        self.session_id = session_id or uuid.uuid4().hex[:12]
        self.frames_dir = str(Path(frames_dir).resolve())
        self.config = config or SessionConfig()
        self.frames = frameio.load_frames(self.frames_dir)
        self.num_frames = len(self.frames)
        self.num_objects: int | None = None
        self.annotations: dict[int, MaskMap] = {}
        self.predictions: dict[int, MaskMap] = {}
        self.key_cache: dict[int, KeyMap] = {}
        self.last_suggestions: list[dict] = []
        self.last_report: MemoryReport | None = None
        self.revision = 0
        self.annotations_revision = 0
        self.predictions_revision = 0

    @property
    def frame_size(self) -> tuple[int, int]:
        return self.frames[0].shape[0], self.frames[0].shape[1]

    @property
    def predictions_fresh(self) -> bool:
        return bool(self.predictions) and (
            self.predictions_revision >= self.annotations_revision
        )

    def _check_frame_index(self, frame: int) -> None:
        if not 0 <= frame < self.num_frames:
            raise ValueError(
                f"frame index {frame} out of range [0, {self.num_frames})"
            )

    def add_annotation(self, frame: int, mask: MaskMap) -> None:
        """Store a user mask; fixes the session's object count on first use."""
        self._check_frame_index(frame)
        m = as_mask(mask)
        if m.shape != self.frame_size:
            raise DimensionMismatchError(
                f"mask {m.shape} does not match frame size {self.frame_size}"
            )
        top = int(m.max()) if m.size else 0
        if self.num_objects is None:
            self.num_objects = top
        elif top > self.num_objects:
            raise ValueError(
                f"mask label {top} exceeds session object count {self.num_objects}"
            )
        self.annotations[frame] = m.copy()
        self.revision += 1
        self.annotations_revision = self.revision

    def delete_annotation(self, frame: int) -> None:
        if frame not in self.annotations:
            raise ValueError(f"frame {frame} has no annotation")
        del self.annotations[frame]
        self.revision += 1
        self.annotations_revision = self.revision

    def run_propagation(self) -> MemoryReport:
        """Propagate the current annotations over every frame."""
        if not self.annotations:
            raise ValueError("propagation requires at least one annotation")
        result = propagate(
            self.frames,
            self.annotations,
            mem_cfg=self.config.memory,
            enc_cfg=self.config.encoder,
            num_objects=self.num_objects,
            augment=self.config.augment,
        )
        self.predictions = {i: result.masks[i] for i in range(self.num_frames)}
        self.key_cache = {i: result.keys[i] for i in range(self.num_frames)}
        self.last_report = result.report
        self.revision += 1
        self.predictions_revision = self.revision
        return result.report

    def suggest_candidates(
        self, k: int, alpha: float | None = None, beta: int | None = None
    ) -> SelectionResult:
        """Rank the next annotation candidates from the cached keys and the
        freshest mask per frame (annotation where given, else prediction)."""
        if not self.annotations:
            raise ValueError("suggestion requires at least one annotation")
        if not self.predictions_fresh:
            raise StalePredictionsError(
                "predictions are stale; run propagation before requesting candidates"
            )
        prev = sorted(self.annotations)
        cfg = SelectionConfig(
            alpha=self.config.selection.alpha if alpha is None else alpha,
            beta=self.config.selection.beta if beta is None else beta,
            k=k,
        )
        missing = [
            i
            for i in range(self.num_frames)
            if i not in self.key_cache
            or (i not in self.annotations and i not in self.predictions)
        ]
        if missing:
            raise StalePredictionsError(
                f"frames {missing[:5]} lack predictions or cached keys; "
                "run propagation first"
            )
        keys = [self.key_cache[i] for i in range(self.num_frames)]
        masks = [
            self.annotations.get(i, self.predictions.get(i))
            for i in range(self.num_frames)
        ]
        result = select_next_candidates(keys, masks, k, prev, cfg)
        self.last_suggestions = result.to_json()
        return result

    def prediction_mask(self, frame: int) -> MaskMap:
        self._check_frame_index(frame)
        if frame in self.annotations:
            return self.annotations[frame]
        if frame not in self.predictions:
            raise ValueError(f"frame {frame} has no prediction yet; propagate first")
        return self.predictions[frame]

    def export_masks(self, out_dir: str | Path) -> list[Path]:
        """Write one mask PNG per frame (annotations win over predictions)."""
        if not self.predictions:
            raise ValueError("nothing to export; run propagation first")
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = []
        for i in range(self.num_frames):
            path = out / frameio.frame_name(i)
            frameio.write_mask(path, self.prediction_mask(i))
            written.append(path)
        return written

    def evaluate(
        self, gt_dir: str | Path, exclude_annotated: bool = True
    ) -> EvalReport:
        """Score predictions against a ground-truth mask directory."""
        if not self.predictions:
            raise ValueError("nothing to evaluate; run propagation first")
        gts = frameio.load_mask_dir(gt_dir)
        missing = [i for i in range(self.num_frames) if i not in gts]
        if missing:
            raise ValueError(f"ground truth missing for frames {missing[:5]}")
        if not self.num_objects:
            raise ValueError("session has no objects to evaluate")
        preds = [self.prediction_mask(i) for i in range(self.num_frames)]
        ordered_gts = [gts[i] for i in range(self.num_frames)]
        exclude = set(self.annotations) if exclude_annotated else set()
        return evaluate_sequence(
            preds, ordered_gts, list(range(1, self.num_objects + 1)), exclude
        )

    def summary(self) -> dict:
        return {
            "id": self.session_id,
            "frames_dir": self.frames_dir,
            "num_frames": self.num_frames,
            "num_objects": self.num_objects,
            "frame_height": self.frame_size[0],
            "frame_width": self.frame_size[1],
            "revision": self.revision,
            "annotations_revision": self.annotations_revision,
            "predictions_revision": self.predictions_revision,
            "predictions_fresh": self.predictions_fresh,
            "annotated_frames": sorted(self.annotations),
            "last_suggestions": self.last_suggestions,
            "last_report": self.last_report.to_json() if self.last_report else None,
            "config": self.config.to_json(),
        }

    def persist(self, session_dir: str | Path, include_keys: bool = True) -> Path:
        """Write the session to disk atomically (build new, then rename)."""
        target = Path(session_dir)
        tmp = target.parent / f".{target.name}.tmp-{uuid.uuid4().hex[:8]}"
        tmp.mkdir(parents=True)
        try:
            (tmp / "annotations").mkdir()
            for i, mask in sorted(self.annotations.items()):
                frameio.write_mask(tmp / "annotations" / frameio.frame_name(i), mask)
            (tmp / "predictions").mkdir()
            for i, mask in sorted(self.predictions.items()):
                frameio.write_mask(tmp / "predictions" / frameio.frame_name(i), mask)
            if include_keys and self.key_cache:
                (tmp / "keys").mkdir()
                for i, key in sorted(self.key_cache.items()):
                    write_xkf(tmp / "keys" / f"{i:05d}.xkf", key.data)
            manifest = {
                "format": MANIFEST_FORMAT,
                "session_id": self.session_id,
                "frames_dir": self.frames_dir,
                "num_frames": self.num_frames,
                "num_objects": self.num_objects,
                "revision": self.revision,
                "annotations_revision": self.annotations_revision,
                "predictions_revision": self.predictions_revision,
                "last_suggestions": self.last_suggestions,
                "last_report": self.last_report.to_json() if self.last_report else None,
                "config": self.config.to_json(),
            }
            (tmp / MANIFEST_NAME).write_text(json.dumps(manifest, indent=2))
            if target.exists():
                graveyard = target.parent / f".{target.name}.old-{uuid.uuid4().hex[:8]}"
                target.rename(graveyard)
                tmp.rename(target)
                shutil.rmtree(graveyard)
            else:
                tmp.rename(target)
        except Exception:
            shutil.rmtree(tmp, ignore_errors=True)
            raise
        return target


def create_session(
    frames_dir: str | Path,
    config: SessionConfig | None = None,
    session_id: str | None = None,
) -> Session:
    return Session(frames_dir, config=config, session_id=session_id)


def load_session(session_dir: str | Path) -> Session:
    """Rebuild a session from a persisted directory."""
    root = Path(session_dir)
    manifest_path = root / MANIFEST_NAME
    if not manifest_path.is_file():
        raise FileNotFoundError(f"no {MANIFEST_NAME} in {root}")
    manifest = json.loads(manifest_path.read_text())
    if manifest.get("format") != MANIFEST_FORMAT:
        raise ValueError(f"unsupported session format {manifest.get('format')!r}")
    session = Session(
        manifest["frames_dir"],
        config=SessionConfig.from_json(manifest.get("config")),
        session_id=manifest["session_id"],
    )
    if session.num_frames != manifest["num_frames"]:
        raise ValueError(
            f"frames directory now holds {session.num_frames} frames, "
            f"manifest says {manifest['num_frames']}"
        )
    session.num_objects = manifest.get("num_objects")
    session.revision = manifest["revision"]
    session.annotations_revision = manifest["annotations_revision"]
    session.predictions_revision = manifest["predictions_revision"]
    session.last_suggestions = manifest.get("last_suggestions", [])
    report = manifest.get("last_report")
    if report:
        session.last_report = MemoryReport(**report)
    session.annotations = {
        i: m for i, m in frameio.load_mask_dir(root / "annotations").items()
    } if (root / "annotations").is_dir() else {}
    session.predictions = {
        i: m for i, m in frameio.load_mask_dir(root / "predictions").items()
    } if (root / "predictions").is_dir() else {}
    keys_dir = root / "keys"
    if keys_dir.is_dir():
        for path in sorted(keys_dir.glob("*.xkf")):
            session.key_cache[int(path.stem)] = KeyMap(read_xkf(path))
    return session
