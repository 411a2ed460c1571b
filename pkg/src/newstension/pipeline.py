"""Manifest-driven batch analysis and evaluation.

A manifest is a JSON-lines file, one object per video::

    {"video_id": "v01", "wav_path": "wav/v01.wav", "visual_path": "visual/v01.json",
     "srt_path": "srt/v01.srt", "fps": 5}

Relative paths resolve against the manifest's directory. ``srt_path`` may
be omitted or null, in which case the video has no sentiment evidence.

Reports are JSON lines too: a ``run`` record carrying the effective
configuration, then one ``video`` record per manifest entry in manifest
order.
"""
from __future__ import annotations

import json
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from functools import lru_cache
from pathlib import Path

from .caption import parse_srt, segment_sentences
from .config import RunConfig
from .errors import ConfigurationError
from .evaluation import (
    baseline_field_size,
    baseline_sentiment,
    evaluate,
    gold_labels,
    read_annotations_csv,
    sweep_field_size_threshold,
)
from .fusion import TensionLevel, VideoFeatures, accumulate_breakdown, classify
from .prosody import decode_wav, extract_prosody, write_prosody_csv
from .sentiment import build_ensemble, score_captions
from .visual import load_visual_annotations, visual_features

log = logging.getLogger(__name__)

REPORT_VERSION = 1


@dataclass(frozen=True)
class VideoManifest:
    video_id: str
    wav_path: Path
    visual_path: Path
    fps: float
    srt_path: Path | None = None


def read_manifest(path) -> list[VideoManifest]:
    path = Path(path)
    try:
        lines = path.read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise ConfigurationError(f"cannot read manifest {path}: {exc}") from exc
    base = path.parent
    entries, seen = [], set()
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            video_id = str(raw["video_id"])
            fps = float(raw["fps"])
            wav, visual = raw["wav_path"], raw["visual_path"]
        except (json.JSONDecodeError, KeyError, TypeError, ValueError) as exc:
            raise ConfigurationError(f"{path}:{lineno}: bad manifest entry ({exc})") from exc
        if not fps > 0 or not math.isfinite(fps):
            raise ConfigurationError(f"{path}:{lineno}: fps must be positive")
        if video_id in seen:
            raise ConfigurationError(f"{path}:{lineno}: duplicate video_id {video_id!r}")
        seen.add(video_id)
        srt = raw.get("srt_path")
        entries.append(VideoManifest(
            video_id, base / wav, base / visual, fps, base / srt if srt else None,
        ))
    return entries


def _dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False, allow_nan=False)


@lru_cache(maxsize=4)
def _runtime(config_json: str):
    config = RunConfig.from_dict(json.loads(config_json))
    return config, build_ensemble(config.scorers)


def analyze_video(entry: VideoManifest, config_json: str) -> dict:
    """Run every processing line for one video and fuse the results."""
    config, scorers = _runtime(config_json)

    signal = decode_wav(entry.wav_path.read_bytes())
    prosody = extract_prosody(signal, config.prosody)

    width, height, frames = load_visual_annotations(entry.visual_path.read_bytes())
    visual = visual_features(frames, width, height)

    sentences = []
    if entry.srt_path is not None:
        sentences = segment_sentences(parse_srt(entry.srt_path.read_bytes()))
    sentiments = score_captions(sentences, scorers)

    if config.export_features:
        with open(entry.wav_path.with_suffix(".prosody.csv"), "w", encoding="utf-8", newline="") as fh:
            write_prosody_csv(prosody, fh)
        if entry.srt_path is not None:
            with open(entry.srt_path.with_suffix(".sentiment.jsonl"), "w", encoding="utf-8") as fh:
                for s, v in sentiments:
                    fh.write(_dumps({"cue": s.source_cue, "span": list(s.span), "text": s.text,
                                     "scores": list(v.scores), "sum": v.total}) + "\n")

    features = VideoFeatures(visual, prosody, sentiments, entry.fps)
    breakdown = accumulate_breakdown(features, config.fusion)
    scores = breakdown.total
    level = classify(scores, config.fusion)
    return {
        "record": "video",
        "video_id": entry.video_id,
        "status": "ok",
        "level": level.value,
        "scores": {"low": scores.low, "high": scores.high},
        "subtotals": {
            "visual": {"low": breakdown.visual.low, "high": breakdown.visual.high},
            "sentiment": {"low": breakdown.sentiment.low, "high": breakdown.sentiment.high},
        },
        "summary": {
            "mean_field_size": math.fsum(v.field_size for v in visual) / len(visual) if visual else 0.0,
            "mean_loudness_db": math.fsum(p.loudness_db for p in prosody) / len(prosody) if prosody else None,
            "total_sentiment": sum(v.total for _, v in sentiments),
            "n_visual_frames": len(visual),
            "n_prosody_frames": len(prosody),
            "n_sentences": len(sentiments),
        },
    }


def _safe_analyze(args) -> dict:
    entry, config_json = args
    try:
        return analyze_video(entry, config_json)
    except Exception as exc:  # per-video isolation: one bad video must not stop the batch
        return {"record": "video", "video_id": entry.video_id, "status": "failed",
                "error": f"{type(exc).__name__}: {exc}"}


def run_analyze(manifest_path, config: RunConfig, out_path, workers: int | None = None) -> int:
    """Analyze every manifest entry and write the report; returns the exit code."""
    entries = read_manifest(manifest_path)
    config_dict = config.to_dict()
    config_json = _dumps(config_dict)
    _runtime(config_json)  # fail fast on a bad scorer declaration

    workers = workers or config.workers or os.cpu_count() or 1
    jobs = [(e, config_json) for e in entries]
    if workers == 1 or len(jobs) <= 1:
        records = [_safe_analyze(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
            records = list(pool.map(_safe_analyze, jobs))

    header = {
        "record": "run",
        "report_version": REPORT_VERSION,
        "config": config_dict,
        "scorer_count": len(config.scorers),
        "videos": len(entries),
    }
    failed = 0
    with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(_dumps(header) + "\n")
        for rec in records:
            if rec["status"] != "ok":
                failed += 1
                log.error("video %s failed: %s", rec["video_id"], rec["error"])
            fh.write(_dumps(rec) + "\n")
    return 1 if failed else 0


def read_reports(path) -> tuple[dict, list[dict]]:
    header, videos = None, []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            if not line.strip():
                continue
            rec = json.loads(line)
            if rec.get("record") == "run":
                header = rec
            elif rec.get("record") == "video":
                videos.append(rec)
            else:
                raise ConfigurationError(f"{path}:{lineno}: unknown record type {rec.get('record')!r}")
    if header is None:
        raise ConfigurationError(f"{path}: no run record")
    return header, videos


def run_evaluate(reports_path, annotations_path, baselines=(), out_path=None, calibration_ids=None) -> dict:
    """Compare the fused predictions (and optional baselines) with annotator labels."""
    header, videos = read_reports(reports_path)
    ok = [v for v in videos if v["status"] == "ok"]
    for v in videos:
        if v["status"] != "ok":
            log.warning("video %s failed during analysis and is not evaluated", v["video_id"])
    known = {v["video_id"] for v in videos}

    records = read_annotations_csv(Path(annotations_path).read_bytes())
    unknown = sorted({r.video_id for r in records} - known)
    for vid in unknown:
        log.warning("annotations mention unknown video %s; skipped", vid)
    records = [r for r in records if r.video_id in known]

    approaches = {"proposed": {v["video_id"]: TensionLevel(v["level"]) for v in ok}}
    extras = {}
    if "field-size" in baselines:
        with_faces = {}
        for v in ok:
            if v["summary"]["n_visual_frames"] == 0:
                log.warning("video %s has no visual annotations; skipped by the field-size baseline", v["video_id"])
            else:
                with_faces[v["video_id"]] = v["summary"]["mean_field_size"]
        gold, _ = gold_labels(records)
        if calibration_ids is None:
            calibration, declared = gold, "all majority-labeled videos"
        else:
            wanted = set(calibration_ids)
            calibration = [g for g in gold if g.video_id in wanted]
            declared = sorted(wanted)
        theta, cal_acc = sweep_field_size_threshold(with_faces, calibration)
        approaches["field_size"] = baseline_field_size(with_faces, theta)
        extras["field_size"] = {"rule": "mean field size >= threshold -> high", "threshold": theta,
                                "calibration": declared, "calibration_accuracy": cal_acc}
    if "sentiment" in baselines:
        approaches["sentiment"] = baseline_sentiment(
            {v["video_id"]: v["summary"]["total_sentiment"] for v in ok}
        )
        extras["sentiment"] = {"rule": "total sentence sentiment < 0 -> high"}

    report = evaluate(approaches, records)
    for name, info in extras.items():
        report["approaches"][name].update(info)
    report["scorer_count"] = header.get("scorer_count")
    report["unknown_annotated_videos"] = unknown
    report["failed_videos"] = sorted(v["video_id"] for v in videos if v["status"] != "ok")
    if out_path is not None:
        with open(out_path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(json.dumps(report, sort_keys=True, indent=2, allow_nan=False) + "\n")
    return report
