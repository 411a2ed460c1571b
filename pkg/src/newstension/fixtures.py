"""Synthetic desk-scale dataset with hand-computable tension labels.

Each video lasts 4 s (16 kHz mono) and carries 20 annotated frames at
5 fps in a 1280x720 raster. The audio is one of:

``tone``     200 Hz sine at half scale: every window voiced, loudness flat,
             so the audio weight is ~1 everywhere.
``silence``  digital silence: the weight is exactly the floor (0.1).
``noise``    seeded white noise: unvoiced, weight somewhere in (0.1, 1).
``split``    tone for the first 2 s, silence after.
``split_r``  silence for the first 2 s, tone after.

Frame 0 of every video is faceless. Face boxes are 384x240 (field size
0.1), 640x360 (0.25) or 256x144 (0.04). Caption sentences are written so
the two built-in lexicon scorers give the stated sums.

:func:`expected_scores` evaluates the plan arithmetically, assuming weight
1 for tone and 0.1 for silence; every video is built so its label holds for
any weight within a few percent of those values.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .caption import CaptionCue, serialize_srt
from .evaluation import AnnotationRecord, write_annotations_csv
from .fusion import DEFAULT_EMOTION_MAP, TensionLevel
from .prosody import AudioSignal, encode_wav
from .visual import EMOTIONS, EmotionLabel, FaceObservation, FrameAnnotation, dump_visual_annotations

SAMPLE_RATE = 16000
DURATION = 4.0
FPS = 5.0
FRAME_W, FRAME_H = 1280, 720
N_FRAMES = 20
FLOOR = 0.1

BOXES = {0.1: (384, 240), 0.25: (640, 360), 0.04: (256, 144)}

HIGH_TEXT = "Fire and explosion kill victims in a terrible tragedy."
LOW_TEXT = "Rescue team celebrates a wonderful victory."
GENERAL_ONLY_POS = "A wonderful and pleasant day."
NEUTRAL_TEXT = "The minister spoke to reporters."

SENTENCE_SUMS = {HIGH_TEXT: -2, LOW_TEXT: 2, GENERAL_ONLY_POS: 1, NEUTRAL_TEXT: 0}


@dataclass(frozen=True)
class Faces:
    """Frames ``first..last`` show one face (plus optional smaller extras)."""
    first: int
    last: int
    emotion: EmotionLabel
    margin: float
    field: float
    extra: tuple = ()  # (emotion, margin, field) of smaller secondary faces


@dataclass(frozen=True)
class VideoPlan:
    video_id: str
    audio: str
    faces: tuple = ()
    captions: tuple = ()  # (start, end, text)
    annotations: tuple = ("same",) * 4
    label: TensionLevel = TensionLevel.LOW
    note: str = ""


ALL = (1, N_FRAMES - 1)
FIRST_HALF = (1, 9)
SECOND_HALF = (11, 19)
E = EmotionLabel
H, L = TensionLevel.HIGH, TensionLevel.LOW

PLANS = (
    VideoPlan("v01", "tone", (Faces(*ALL, E.ANGER, 1.0, 0.1),), label=H, note="angry faces only"),
    VideoPlan("v02", "tone", (Faces(*ALL, E.HAPPINESS, 1.0, 0.1),), label=L, note="happy faces only"),
    VideoPlan("v03", "tone", captions=((0.2, 1.8, HIGH_TEXT), (2.2, 3.8, HIGH_TEXT)), label=H,
              note="negative captions, no faces"),
    VideoPlan("v04", "tone", captions=((0.2, 1.8, LOW_TEXT), (2.2, 3.8, LOW_TEXT)), label=L,
              note="positive captions, no faces"),
    VideoPlan("v05", "tone", (Faces(*ALL, E.HAPPINESS, 1.0, 0.1),),
              ((0.2, 1.0, HIGH_TEXT), (1.2, 2.4, HIGH_TEXT), (2.6, 3.8, HIGH_TEXT)),
              annotations=("same", "same", "same", "flip"), label=H, note="captions outweigh faces"),
    VideoPlan("v06", "tone", (Faces(*ALL, E.FEAR, 0.5, 0.1),), ((0.2, 1.8, LOW_TEXT), (2.2, 3.8, LOW_TEXT)),
              label=L, note="positive captions outweigh fearful faces"),
    VideoPlan("v07", "silence", (Faces(*ALL, E.ANGER, 2.0, 0.25),), label=H, note="silent, angry"),
    VideoPlan("v08", "silence", (Faces(*ALL, E.HAPPINESS, 2.0, 0.25),), label=L, note="silent, happy"),
    VideoPlan("v09", "noise", (Faces(*ALL, E.SADNESS, 1.0, 0.1),),
              annotations=("same", "flip", "same", "same"), label=H, note="noisy audio, sad faces"),
    VideoPlan("v10", "noise", (Faces(*ALL, E.HAPPINESS, 1.0, 0.1),), label=L, note="noisy audio, happy faces"),
    VideoPlan("v11", "split", (Faces(*FIRST_HALF, E.ANGER, 1.0, 0.1), Faces(*SECOND_HALF, E.HAPPINESS, 2.0, 0.25)),
              label=H, note="voiced anger beats louder-looking but silent happiness"),
    VideoPlan("v12", "split", (Faces(*FIRST_HALF, E.HAPPINESS, 1.0, 0.1), Faces(*SECOND_HALF, E.ANGER, 2.0, 0.25)),
              label=L, note="mirror of v11"),
    VideoPlan("v13", "silence", annotations=("same", "same", "flip", "flip"), label=L,
              note="no evidence at all: tie resolved to low; annotators split 2-2"),
    VideoPlan("v14", "tone", (Faces(*ALL, E.ANGER, 1.0, 0.1, extra=((E.HAPPINESS, 3.0, 0.04),)),),
              label=H, note="largest face decides the emotion"),
    VideoPlan("v15", "tone", (Faces(*ALL, E.HAPPINESS, -0.2, 0.1),), ((0.2, 1.8, LOW_TEXT),), label=L,
              note="all-negative margins add nothing"),
    VideoPlan("v16", "tone", (Faces(*ALL, E.CONTEMPT, 0.5, 0.04),), ((0.2, 1.8, NEUTRAL_TEXT), (2.2, 3.8, HIGH_TEXT)),
              label=H, note="neutral sentence adds nothing"),
    VideoPlan("v17", "tone", (Faces(*ALL, E.SURPRISE, 0.3, 0.1),), ((0.2, 1.8, GENERAL_ONLY_POS),), label=L,
              note="one-scorer positive sentence vs weak surprise"),
    VideoPlan("v18", "tone", (Faces(*ALL, E.AVERSION, 1.0, 0.1),), ((0.2, 1.8, GENERAL_ONLY_POS),), label=H,
              note="aversion vs one-scorer positive sentence"),
    VideoPlan("v19", "split", captions=((0.2, 1.8, LOW_TEXT), (2.2, 3.8, HIGH_TEXT)), label=L,
              note="voiced positive sentence, silent negative sentence"),
    VideoPlan("v20", "split", (Faces(*SECOND_HALF, E.HAPPINESS, 1.0, 0.1),),
              ((0.2, 1.8, HIGH_TEXT), (2.2, 3.8, LOW_TEXT)), label=H,
              note="voiced negative sentence beats silent positives"),
)


def _audio(kind: str, seed: int) -> np.ndarray:
    n = int(SAMPLE_RATE * DURATION)
    t = np.arange(n) / SAMPLE_RATE
    tone = 0.5 * np.sin(2 * np.pi * 200.0 * t)
    if kind == "tone":
        return tone
    if kind == "silence":
        return np.zeros(n)
    if kind == "noise":
        return np.random.default_rng(seed).uniform(-0.5, 0.5, n)
    if kind == "split":
        return np.where(t < 2.0, tone, 0.0)
    if kind == "split_r":
        return np.where(t >= 2.0, tone, 0.0)
    raise ValueError(f"unknown audio kind {kind!r}")


def _margins(winner: EmotionLabel, value: float) -> dict:
    # losing emotions sit well below the winner, and below zero
    low = min(value, 0.0) - 1.0
    return {e: (value if e is winner else low) for e in EMOTIONS}


def _frames(plan: VideoPlan) -> list[FrameAnnotation]:
    frames = []
    for i in range(N_FRAMES):
        faces = []
        for f in plan.faces:
            if f.first <= i <= f.last:
                w, h = BOXES[f.field]
                faces.append(FaceObservation(100.0, 80.0, float(w), float(h), _margins(f.emotion, f.margin)))
                for emotion, margin, fld in f.extra:
                    w2, h2 = BOXES[fld]
                    faces.append(FaceObservation(800.0, 300.0, float(w2), float(h2), _margins(emotion, margin)))
        frames.append(FrameAnnotation(i, tuple(faces)))
    return frames


def _weight(audio: str, t0: float, t1: float):
    """Hand-assigned audio weight for a stretch inside one audio regime, else None."""
    if audio == "tone":
        return 1.0
    if audio == "silence":
        return FLOOR
    if audio in ("split", "split_r"):
        if t1 < 2.0:
            voiced = audio == "split"
        elif t0 > 2.0:
            voiced = audio == "split_r"
        else:
            return None
        return 1.0 if voiced else FLOOR
    return None


def expected_scores(plan: VideoPlan) -> tuple[float, float] | None:
    """Hand arithmetic for (low, high); None when the audio weight is not known in closed form."""
    low = high = 0.0
    for f in plan.faces:
        if f.margin <= 0:
            continue
        level = DEFAULT_EMOTION_MAP[f.emotion]
        for i in range(f.first, f.last + 1):
            w = _weight(plan.audio, i / FPS, i / FPS)
            if w is None:
                return None
            term = f.margin * f.field * w
            if level is TensionLevel.HIGH:
                high += term
            else:
                low += term
    for start, end, text in plan.captions:
        s = SENTENCE_SUMS[text]
        if s == 0:
            continue
        w = _weight(plan.audio, start, end)
        if w is None:
            return None
        if s < 0:
            high += abs(s) * w
        else:
            low += abs(s) * w
    return low, high


def expected_label(plan: VideoPlan) -> TensionLevel:
    scores = expected_scores(plan)
    if scores is None:
        # single-bin videos: whichever bin has any evidence wins
        levels = {DEFAULT_EMOTION_MAP[f.emotion] for f in plan.faces if f.margin > 0}
        levels |= {H if SENTENCE_SUMS[c[2]] < 0 else L for c in plan.captions if SENTENCE_SUMS[c[2]] != 0}
        assert len(levels) == 1, plan.video_id
        return levels.pop()
    low, high = scores
    return H if high > low else L


def _annotations(plan: VideoPlan) -> list[AnnotationRecord]:
    other = L if plan.label is H else H
    return [
        AnnotationRecord(plan.video_id, f"a{k + 1}", plan.label if how == "same" else other)
        for k, how in enumerate(plan.annotations)
    ]


def agreement_fixture_records(unanimous=381, three_of_four=96, ties=43) -> list[AnnotationRecord]:
    """Four-annotator labels with the given numbers of 4-0, 3-1 and 2-2 videos."""
    records = []
    n = 0
    for pattern, count in (("hhhh", unanimous), ("hhhl", three_of_four), ("hhll", ties)):
        for _ in range(count):
            n += 1
            vid = f"tv{n:04d}"
            # alternate the majority label so both classes occur
            swap = n % 2 == 0
            for k, ch in enumerate(pattern):
                label = H if (ch == "h") != swap else L
                records.append(AnnotationRecord(vid, f"a{k + 1}", label))
    return records


def default_config() -> dict:
    from .config import RunConfig
    cfg = RunConfig().to_dict()
    cfg["workers"] = None
    return cfg


def generate(out_dir) -> dict:
    """Write the dataset under ``out_dir``; returns the paths written."""
    out = Path(out_dir)
    for sub in ("wav", "srt", "visual"):
        (out / sub).mkdir(parents=True, exist_ok=True)

    manifest_lines, annotations = [], []
    for k, plan in enumerate(PLANS):
        samples = _audio(plan.audio, seed=1000 + k)
        (out / "wav" / f"{plan.video_id}.wav").write_bytes(encode_wav(AudioSignal(samples, SAMPLE_RATE)))
        (out / "visual" / f"{plan.video_id}.json").write_bytes(
            dump_visual_annotations(FRAME_W, FRAME_H, _frames(plan))
        )
        entry = {"video_id": plan.video_id, "wav_path": f"wav/{plan.video_id}.wav",
                 "visual_path": f"visual/{plan.video_id}.json", "fps": FPS}
        if plan.captions:
            cues = [CaptionCue(i + 1, s, e, text) for i, (s, e, text) in enumerate(plan.captions)]
            (out / "srt" / f"{plan.video_id}.srt").write_bytes(serialize_srt(cues))
            entry["srt_path"] = f"srt/{plan.video_id}.srt"
        manifest_lines.append(json.dumps(entry, sort_keys=True))
        annotations.extend(_annotations(plan))

    paths = {
        "manifest": out / "manifest.jsonl",
        "config": out / "config.json",
        "annotations": out / "annotations.csv",
        "expected": out / "expected_labels.json",
        "agreement": out / "agreement_520.csv",
    }
    paths["manifest"].write_text("\n".join(manifest_lines) + "\n", encoding="utf-8")
    paths["config"].write_text(json.dumps(default_config(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
    paths["annotations"].write_bytes(write_annotations_csv(annotations))
    paths["agreement"].write_bytes(write_annotations_csv(agreement_fixture_records()))
    expected = {}
    for plan in PLANS:
        scores = expected_scores(plan)
        expected[plan.video_id] = {
            "label": expected_label(plan).value,
            "low": None if scores is None else scores[0],
            "high": None if scores is None else scores[1],
            "note": plan.note,
        }
    paths["expected"].write_text(json.dumps(expected, indent=2, sort_keys=True) + "\n", encoding="utf-8")
    return paths
