"""Visual features from per-frame face/emotion annotations.

The annotations are the output of an external one-vs-all facial expression
recognizer: for every detected face, a bounding box and one signed decision
value (distance to the separating hyperplane) per emotion.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass
from enum import Enum

from .errors import AnnotationSchemaError, AnnotationValidationError


class EmotionLabel(str, Enum):
    HAPPINESS = "happiness"
    SURPRISE = "surprise"
    AVERSION = "aversion"
    CONTEMPT = "contempt"
    ANGER = "anger"
    FEAR = "fear"
    SADNESS = "sadness"
    NONEXISTENT = "nonexistent"


# also the tie-break order for equal margins
EMOTIONS = tuple(e for e in EmotionLabel if e is not EmotionLabel.NONEXISTENT)


@dataclass(frozen=True)
class FaceObservation:
    x: float
    y: float
    w: float
    h: float
    margins: dict

    @property
    def area(self) -> float:
        return self.w * self.h


@dataclass(frozen=True)
class FrameAnnotation:
    frame_index: int
    faces: tuple


@dataclass(frozen=True)
class VisualFeatures:
    frame_index: int
    emotion: EmotionLabel
    intensity: float
    field_size: float


def _number(value, what):
    if isinstance(value, bool) or not isinstance(value, (int, float)) or not math.isfinite(value):
        raise AnnotationSchemaError(f"{what} must be a finite number, got {value!r}")
    return float(value)


def _parse_face(raw, frame_index, width, height):
    where = f"frame {frame_index}"
    if not isinstance(raw, dict):
        raise AnnotationSchemaError(f"{where}: face entry must be an object")
    try:
        x, y, w, h = (_number(raw[k], f"{where}: {k}") for k in ("x", "y", "w", "h"))
        margins_raw = raw["margins"]
    except KeyError as exc:
        raise AnnotationSchemaError(f"{where}: face is missing {exc.args[0]!r}") from None
    if not isinstance(margins_raw, dict):
        raise AnnotationSchemaError(f"{where}: margins must be an object")
    missing = [e.value for e in EMOTIONS if e.value not in margins_raw]
    if missing:
        raise AnnotationSchemaError(f"{where}: margins missing emotion key(s) {', '.join(missing)}")
    margins = {e: _number(margins_raw[e.value], f"{where}: margin {e.value}") for e in EMOTIONS}
    if w <= 0 or h <= 0:
        raise AnnotationValidationError(f"{where}: face box must have positive size, got {w}x{h}")
    if x < 0 or y < 0 or x + w > width or y + h > height:
        raise AnnotationValidationError(f"{where}: face box ({x}, {y}, {w}, {h}) exceeds the {width}x{height} frame")
    return FaceObservation(x, y, w, h, margins)


def load_visual_annotations(document: bytes) -> tuple[int, int, list[FrameAnnotation]]:
    """Parse and validate an annotation document.

    Returns ``(frame_width, frame_height, frames)``. Schema problems raise
    :class:`AnnotationSchemaError`; geometric violations (boxes outside the
    frame, non-increasing frame indices) raise :class:`AnnotationValidationError`.
    """
    try:
        doc = json.loads(document.decode("utf-8-sig"))
    except (UnicodeDecodeError, json.JSONDecodeError) as exc:
        raise AnnotationSchemaError(f"not a JSON document: {exc}") from exc
    if not isinstance(doc, dict):
        raise AnnotationSchemaError("top level must be an object")
    for key in ("frame_width", "frame_height", "frames"):
        if key not in doc:
            raise AnnotationSchemaError(f"missing top-level key {key!r}")
    width, height = doc["frame_width"], doc["frame_height"]
    if not (isinstance(width, int) and isinstance(height, int)) or isinstance(width, bool):
        raise AnnotationSchemaError("frame_width and frame_height must be integers")
    if width <= 0 or height <= 0:
        raise AnnotationValidationError(f"frame dimensions must be positive, got {width}x{height}")
    if not isinstance(doc["frames"], list):
        raise AnnotationSchemaError("frames must be a list")

    frames = []
    previous = -1
    for raw in doc["frames"]:
        if not isinstance(raw, dict) or "index" not in raw or "faces" not in raw:
            raise AnnotationSchemaError("each frame needs 'index' and 'faces'")
        index = raw["index"]
        if not isinstance(index, int) or isinstance(index, bool) or index < 0:
            raise AnnotationSchemaError(f"frame index must be a non-negative integer, got {index!r}")
        if index <= previous:
            raise AnnotationValidationError(f"frame index {index} does not increase (previous {previous})")
        previous = index
        if not isinstance(raw["faces"], list):
            raise AnnotationSchemaError(f"frame {index}: faces must be a list")
        faces = tuple(_parse_face(f, index, width, height) for f in raw["faces"])
        frames.append(FrameAnnotation(index, faces))
    return width, height, frames


def _largest_face(frame: FrameAnnotation):
    # equal areas resolve to the lowest x, then y; identical boxes to the
    # lexicographically largest margins, so input order never matters
    return min(frame.faces, key=lambda f: (-f.area, f.x, f.y, f.w, tuple(-f.margins[e] for e in EMOTIONS)))


def field_size(frame: FrameAnnotation, frame_width, frame_height) -> float:
    """Largest face area over frame area; 0 without faces."""
    if not frame.faces:
        return 0.0
    return max(f.area for f in frame.faces) / (frame_width * frame_height)


def recognized_emotion(frame: FrameAnnotation) -> tuple[EmotionLabel, float]:
    if not frame.faces:
        return EmotionLabel.NONEXISTENT, 0.0
    margins = _largest_face(frame).margins
    best = EMOTIONS[0]
    for emotion in EMOTIONS[1:]:
        if margins[emotion] > margins[best]:
            best = emotion
    return best, max(margins[best], 0.0)


def visual_features(frames, frame_width, frame_height) -> list[VisualFeatures]:
    out = []
    for frame in frames:
        emotion, intensity = recognized_emotion(frame)
        out.append(VisualFeatures(frame.frame_index, emotion, intensity, field_size(frame, frame_width, frame_height)))
    return out


def dump_visual_annotations(frame_width, frame_height, frames) -> bytes:
    doc = {
        "frame_width": frame_width,
        "frame_height": frame_height,
        "frames": [
            {
                "index": fr.frame_index,
                "faces": [
                    {"x": f.x, "y": f.y, "w": f.w, "h": f.h,
                     "margins": {e.value: f.margins[e] for e in EMOTIONS}}
                    for f in fr.faces
                ],
            }
            for fr in frames
        ],
    }
    return json.dumps(doc, indent=1).encode("utf-8")
