"""Command-line entry points: serve, propagate, suggest, eval, augment,
make-demo."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import frameio, synthetic
from .augment import augment_set, default_specs
from .memory import MemoryConfig
from .metrics import evaluate_sequence
from .pipeline import EncoderConfig, propagate
from .session import load_session


@click.group()
def main():
    """Memory-based interactive video object segmentation."""


@main.command()
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8000, show_default=True, type=int)
@click.option(
    "--data",
    envvar="VOS_DATA_DIR",
    default="./memvos-data",
    show_default=True,
    help="Data root for persisted sessions (env: VOS_DATA_DIR).",
)
@click.option("--ui-dir", default=None, help="Static frontend build to serve at /.")
def serve(host, port, data, ui_dir):
    """Run the HTTP API (and optionally the bundled UI)."""
    import uvicorn

    from .server import create_app

    app = create_app(data, ui_dir=ui_dir)
    uvicorn.run(app, host=host, port=port, log_level="info")


@main.command("propagate")
@click.option("--frames", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--annotations", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option("--no-working-memory", is_flag=True, help="Freeze the temporary tier.")
@click.option("--augment", is_flag=True, help="Load augmented variants into permanent memory.")
@click.option("--q", default=5, show_default=True, type=int, help="Working-memory insertion period.")
@click.option("--cap", default=100, show_default=True, type=int, help="Working-memory frame cap.")
@click.option("--z", default=625.0, show_default=True, type=float, help="Long-term compression rate.")
@click.option("--topk", default=30, show_default=True, type=int, help="Readout top-k (0 disables).")
@click.option("--stride", default=8, show_default=True, type=int, help="Key-grid stride.")
@click.option("--keys", "keys_dir", default=None, type=click.Path(exists=True, file_okay=False),
              help="Directory of NNNNN.xkf key tensors replacing the toy encoder.")
def propagate_cmd(frames, annotations, out, no_working_memory, augment, q, cap, z, topk,
                  stride, keys_dir):
    """Propagate annotation masks over a frame directory."""
    frame_list = frameio.load_frames(frames)
    ann = frameio.load_mask_dir(annotations)
    if not ann:
        raise click.ClickException(f"no NNNNN.png masks in {annotations}")
    precomputed = {}
    if keys_dir:
        from .tensors import KeyMap
        from .xkf import read_xkf

        for path in sorted(Path(keys_dir).glob("*.xkf")):
            precomputed[int(path.stem)] = KeyMap(read_xkf(path))
    mem_cfg = MemoryConfig(
        working_cap=cap,
        insertion_every=q,
        compression_rate=z,
        topk=topk or None,
        temporary_memory_enabled=not no_working_memory,
    )
    result = propagate(
        frame_list, ann, mem_cfg=mem_cfg, enc_cfg=EncoderConfig(stride=stride),
        augment=augment, precomputed_keys=precomputed,
    )
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    for i, mask in enumerate(result.masks):
        frameio.write_mask(out_dir / frameio.frame_name(i), mask)
    click.echo(json.dumps(result.report.to_json(), indent=2))


@main.command()
@click.option("--session", "session_dir", required=True,
              type=click.Path(exists=True, file_okay=False),
              help="Persisted session directory.")
@click.option("--k", default=5, show_default=True, type=int)
@click.option("--alpha", default=None, type=float)
@click.option("--beta", default=None, type=int)
@click.option("--prev", default=None, help="CSV of previously chosen frame indices.")
def suggest(session_dir, k, alpha, beta, prev):
    """Rank the next annotation candidates for a persisted session."""
    sess = load_session(session_dir)
    if prev is not None:
        from .selection import SelectionConfig, select_next_candidates

        prev_list = [int(p) for p in prev.split(",") if p.strip() != ""]
        cfg = SelectionConfig(
            alpha=sess.config.selection.alpha if alpha is None else alpha,
            beta=sess.config.selection.beta if beta is None else beta,
            k=k,
        )
        keys = [sess.key_cache[i] for i in range(sess.num_frames)]
        masks = [
            sess.annotations.get(i, sess.predictions.get(i))
            for i in range(sess.num_frames)
        ]
        result = select_next_candidates(keys, masks, k, prev_list, cfg)
    else:
        result = sess.suggest_candidates(k, alpha=alpha, beta=beta)
    click.echo(json.dumps(result.to_json()))


@main.command("eval")
@click.option("--pred", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--gt", required=True, type=click.Path(exists=True, file_okay=False))
@click.option("--exclude", default=None, help="CSV of frame indices to skip.")
@click.option("--objects", default=None, help="CSV of labels (default: all in gt).")
def eval_cmd(pred, gt, exclude, objects):
    """Score predicted masks against ground truth (JSON to stdout, table to stderr)."""
    import numpy as np

    preds = frameio.load_mask_dir(pred)
    gts = frameio.load_mask_dir(gt)
    common = sorted(set(preds) & set(gts))
    if not common:
        raise click.ClickException("prediction and gt directories share no frames")
    if sorted(preds) != sorted(gts):
        raise click.ClickException(
            f"frame sets differ: {len(preds)} predictions vs {len(gts)} gt masks"
        )
    pred_list = [preds[i] for i in common]
    gt_list = [gts[i] for i in common]
    if objects:
        labels = [int(o) for o in objects.split(",")]
    else:
        labels = sorted({int(l) for g in gt_list for l in np.unique(g) if l > 0})
    if not labels:
        raise click.ClickException("no object labels found in ground truth")
    excluded = {int(e) for e in exclude.split(",")} if exclude else set()
    position_of = {frame: i for i, frame in enumerate(common)}
    report = evaluate_sequence(
        pred_list, gt_list, labels,
        {position_of[f] for f in excluded if f in position_of},
    )
    click.echo(json.dumps(report.to_json()))
    click.echo(report.summary_table(), err=True)


@main.command("augment")
@click.option("--frame", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--mask", required=True, type=click.Path(exists=True, dir_okay=False))
@click.option("--out", required=True, type=click.Path(file_okay=False))
def augment_cmd(frame, mask, out):
    """Write all default augmentations of a frame/mask pair."""
    frame_img = frameio.read_frame(frame)
    mask_img = frameio.read_mask(mask)
    out_dir = Path(out)
    out_dir.mkdir(parents=True, exist_ok=True)
    specs = default_specs()
    for spec, (aug_frame, aug_mask) in zip(specs, augment_set(frame_img, mask_img)):
        safe = spec.kind.replace("+", "_plus").replace("-", "_minus").replace(".", "_")
        frameio.write_frame(out_dir / f"frame_{safe}.png", aug_frame)
        frameio.write_mask(out_dir / f"mask_{safe}.png", aug_mask)
    click.echo(f"wrote {len(specs)} augmented pairs to {out_dir}")


@main.command("make-demo")
@click.option("--out", required=True, type=click.Path(file_okay=False))
@click.option(
    "--kind",
    type=click.Choice(["identical", "square", "palindrome", "clusters"]),
    default="identical",
    show_default=True,
)
@click.option("--frames", "n_frames", default=None, type=int)
def make_demo(out, kind, n_frames):
    """Generate a synthetic demo video (frames plus ground-truth masks)."""
    if kind == "identical":
        frames, mask = synthetic.identical_bands(n_frames or 12)
        masks = [mask] * len(frames)
    elif kind == "square":
        frames, masks = synthetic.translating_square(n_frames or 60)
    elif kind == "palindrome":
        frames, masks = synthetic.palindromic_square(n_frames or 41)
    else:
        frames, masks, _ = synthetic.clustered_video(n_frames or 60)
    out_dir = Path(out)
    frames_dir = out_dir / "frames"
    gt_dir = out_dir / "gt"
    frames_dir.mkdir(parents=True, exist_ok=True)
    gt_dir.mkdir(parents=True, exist_ok=True)
    for i, (frame, mask) in enumerate(zip(frames, masks)):
        frameio.write_frame(frames_dir / frameio.frame_name(i), frame)
        frameio.write_mask(gt_dir / frameio.frame_name(i), mask)
    click.echo(json.dumps({
        "frames_dir": str(frames_dir), "gt_dir": str(gt_dir), "n": len(frames),
    }))


if __name__ == "__main__":
    sys.exit(main())
