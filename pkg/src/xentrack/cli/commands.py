"""
Subcommand implementations. Each takes the parsed argparse namespace and returns an exit code;
failures are raised as XenTrackError and mapped to exit codes by the entry point.
"""

import argparse
import asyncio
import json
import logging
import time
from pathlib import Path
from typing import Dict, List, Tuple

import numpy as np

from xentrack.cli import display
from xentrack.config import settings
from xentrack.config.run_config import RunConfig, load_run_config
from xentrack.errors import XenTrackError
from xentrack.io.detections import DetectionStream, read_detections, write_detections
from xentrack.io.ground_truth import read_ground_truth, write_ground_truth
from xentrack.io.overlay import export_overlay
from xentrack.io.reports import dumps_report, write_report
from xentrack.io.tracks import read_tracks, safe_video_id, track_file_name, write_tracks
from xentrack.metrics.clear_mot import evaluate_many
from xentrack.metrics.scenario import generate_scenario
from xentrack.metrics.types import ScenarioConfig
from xentrack.tracker.pipeline import run_video
from xentrack.tracker.types import TrackSet

logger = logging.getLogger(__name__)

PERCENTILES = (50, 90, 99)


def emit_json(obj) -> None:
    """Machine-readable result on stdout."""
    print(json.dumps(obj, sort_keys=True, indent=2))


def _config(args: argparse.Namespace) -> RunConfig:
    return load_run_config(args.config or settings.XENTRACK_CONFIG)


# --- track ---

async def _track_all(streams: Dict[str, DetectionStream], config: RunConfig, workers: int) -> Dict[str, TrackSet]:
    semaphore = asyncio.Semaphore(workers)

    async def one(video_id: str, stream: DetectionStream) -> Tuple[str, TrackSet]:
        async with semaphore:
            ts = await asyncio.to_thread(run_video, config.tracker, stream, video_id, config.filter)
            return video_id, ts

    results = await asyncio.gather(*(one(vid, stream) for vid, stream in streams.items()))
    # Merge by video id, independent of completion order
    return dict(sorted(results))


def cmd_track(args: argparse.Namespace) -> int:
    config = _config(args)
    detections = args.detections or config.io.detections
    out = args.out or config.io.out
    if detections is None:
        raise XenTrackError("no detection file: pass --detections or set io.detections")
    if out is None:
        raise XenTrackError("no output path: pass --out or set io.out")
    if args.workers is not None:
        workers = args.workers
    elif "workers" in config.model_fields_set:
        workers = config.workers
    else:
        workers = settings.env_int("XENTRACK_WORKERS", settings.XENTRACK_WORKERS)
    if workers < 1:
        raise XenTrackError(f"--workers must be at least 1, got {workers}")

    streams = read_detections(detections)
    tracksets = asyncio.run(_track_all(streams, config, workers))

    out_path = Path(out)
    if not tracksets:
        logger.warning(f"{detections}: no videos, nothing written to {out_path}")
    rows = []
    for video_id, ts in tracksets.items():
        target = out_path if len(tracksets) == 1 else out_path / track_file_name(video_id)
        write_tracks(ts, target)
        rows.append({
            "video_id": video_id,
            "frames": ts.stats.frames,
            "tracks_born": ts.stats.tracks_born,
            "max_concurrent": ts.stats.max_concurrent,
            "instances": ts.instance_count(),
            "output": str(target),
        })

    display.print_track_summary(rows)
    emit_json({"videos": rows})
    return 0


# --- eval ---

def cmd_eval(args: argparse.Namespace) -> int:
    config = _config(args)
    gt_path = args.gt or config.io.ground_truth
    if gt_path is None:
        raise XenTrackError("no ground-truth file: pass --gt or set io.ground_truth")
    match_iou = args.match_iou if args.match_iou is not None else config.metrics.match_iou
    if not 0.0 <= match_iou <= 1.0:
        raise XenTrackError(f"--match-iou must lie in [0, 1], got {match_iou}")

    preds = read_tracks(args.pred)
    gts = read_ground_truth(gt_path)
    report = evaluate_many(preds, gts, match_iou)

    display.print_report(report)
    if args.out:
        write_report(report, args.out)
    print(dumps_report(report), end="")
    return 0


# --- synth ---

def _scenarios(base: ScenarioConfig, videos: int) -> List[ScenarioConfig]:
    if videos == 1:
        return [base]
    data = base.model_dump()
    return [
        ScenarioConfig.model_validate({**data, "seed": base.seed + k, "video_id": f"{base.video_id}_{k:02d}"})
        for k in range(videos)
    ]


def cmd_synth(args: argparse.Namespace) -> int:
    config = _config(args)
    base = config.scenario or ScenarioConfig(seed=settings.env_int("XENTRACK_SEED", settings.XENTRACK_SEED))
    if args.seed is not None:
        base = ScenarioConfig.model_validate({**base.model_dump(), "seed": args.seed})
    if args.videos < 1:
        raise XenTrackError(f"--videos must be at least 1, got {args.videos}")

    streams, gts = {}, {}
    for scenario in _scenarios(base, args.videos):
        stream, gt = generate_scenario(scenario)
        streams[scenario.video_id] = stream
        gts[scenario.video_id] = gt

    write_detections(streams, args.out_dets)
    write_ground_truth(gts, args.out_gt)
    emit_json({
        "videos": sorted(streams),
        "detections": sum(len(dets) for stream in streams.values() for _, dets in stream),
        "gt_instances": sum(gt.instance_count() for gt in gts.values()),
    })
    return 0


# --- overlay ---

def parse_size(text: str) -> Tuple[int, int]:
    """argparse type for WxH."""
    try:
        w, h = (int(v) for v in text.lower().split("x"))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected WxH, got {text!r}") from None
    if w <= 0 or h <= 0:
        raise argparse.ArgumentTypeError(f"size must be positive, got {text!r}")
    return w, h


def cmd_overlay(args: argparse.Namespace) -> int:
    config = _config(args)
    background = args.background or config.io.background
    tracksets = read_tracks(args.tracks)
    out = Path(args.out)

    files = {}
    for video_id, ts in tracksets.items():
        target = out if len(tracksets) == 1 else out / safe_video_id(video_id)
        written = export_overlay(ts, args.size, target, background)
        files[video_id] = len(written)

    emit_json({"out": str(out), "files": files})
    return 0


# --- bench ---

def _percentiles(samples: List[float]) -> Dict[str, float]:
    if not samples:
        return {"p50_ms": 0.0, "p90_ms": 0.0, "p99_ms": 0.0, "mean_ms": 0.0}
    ms = np.asarray(samples) * 1000.0
    stats = {f"p{p}_ms": float(np.percentile(ms, p)) for p in PERCENTILES}
    stats["mean_ms"] = float(ms.mean())
    return stats


def cmd_bench(args: argparse.Namespace) -> int:
    config = _config(args)
    if args.n_boxes < 0 or args.frames < 0:
        raise XenTrackError("--n-boxes and --frames must be non-negative")
    seed = args.seed if args.seed is not None else settings.env_int("XENTRACK_SEED", settings.XENTRACK_SEED)

    # Dense text-like scene; the workload depends on the seed only
    scenario = ScenarioConfig(
        seed=seed,
        video_id="bench",
        n_tracks=args.n_boxes,
        frames=args.frames,
        noise_sigma=1.0,
        drop_prob=0.05,
        fp_rate=args.n_boxes * 0.02,
    )
    stream, _ = generate_scenario(scenario)

    timings: Dict[str, List[float]] = {}
    start = time.perf_counter()
    run_video(config.tracker, stream, scenario.video_id, config.filter, timings=timings)
    elapsed = time.perf_counter() - start

    per_frame = [sum(stage[i] for stage in timings.values()) for i in range(args.frames)] if timings else []
    stages = {stage: _percentiles(samples) for stage, samples in sorted(timings.items())}
    fps = args.frames / elapsed if elapsed > 0 and args.frames else 0.0

    display.print_bench(stages, fps)
    emit_json({
        "n_boxes": args.n_boxes,
        "frames": args.frames,
        "seed": seed,
        "fps": fps,
        "frame": _percentiles(per_frame),
        "stages": stages,
    })
    return 0
