"""Fuse visual emotion and caption sentiment evidence into a tension level.

Every recognized-emotion frame and every non-neutral sentence adds evidence
to the Low or High bin, weighted by how voiced and loud the audio is over
the same stretch of time. The bin with the larger total labels the video.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field
from enum import Enum

from .errors import ConfigurationError
from .visual import EMOTIONS, EmotionLabel


class TensionLevel(str, Enum):
    LOW = "low"
    HIGH = "high"


DEFAULT_EMOTION_MAP = {
    EmotionLabel.HAPPINESS: TensionLevel.LOW,
    EmotionLabel.SURPRISE: TensionLevel.HIGH,
    EmotionLabel.AVERSION: TensionLevel.HIGH,
    EmotionLabel.CONTEMPT: TensionLevel.HIGH,
    EmotionLabel.ANGER: TensionLevel.HIGH,
    EmotionLabel.FEAR: TensionLevel.HIGH,
    EmotionLabel.SADNESS: TensionLevel.HIGH,
}

LOUDNESS_MODES = ("minmax", "absolute")


@dataclass(frozen=True)
class FusionConfig:
    emotion_map: dict = field(default_factory=lambda: dict(DEFAULT_EMOTION_MAP))
    weight_floor: float = 0.1
    loudness_normalization: str = "minmax"
    tie_break: TensionLevel = TensionLevel.LOW
    # half-width of the audio window around each video frame, seconds
    visual_window: float = 0.005
    # loudness floor of the prosody extractor, used by "absolute" normalization
    floor_db: float = -96.0

    def validate(self):
        missing = [e.value for e in EMOTIONS if e not in self.emotion_map]
        if missing:
            raise ConfigurationError(f"emotion_map lacks {', '.join(missing)}")
        if not 0.0 < self.weight_floor < 1.0:
            raise ConfigurationError(f"weight_floor must lie in (0, 1), got {self.weight_floor}")
        if self.loudness_normalization not in LOUDNESS_MODES:
            raise ConfigurationError(f"loudness_normalization must be one of {LOUDNESS_MODES}")
        if self.visual_window < 0:
            raise ConfigurationError("visual_window must be non-negative")
        return self

    def to_dict(self):
        return {
            "emotion_map": {e.value: self.emotion_map[e].value for e in EMOTIONS if e in self.emotion_map},
            "weight_floor": self.weight_floor,
            "loudness_normalization": self.loudness_normalization,
            "tie_break": self.tie_break.value,
            "visual_window": self.visual_window,
            "floor_db": self.floor_db,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "FusionConfig":
        data = dict(data)
        try:
            if "emotion_map" in data:
                data["emotion_map"] = {
                    EmotionLabel(k): TensionLevel(v) for k, v in data["emotion_map"].items()
                }
                if EmotionLabel.NONEXISTENT in data["emotion_map"]:
                    raise ConfigurationError("nonexistent cannot be mapped to a tension level")
            if "tie_break" in data:
                data["tie_break"] = TensionLevel(data["tie_break"])
            return cls(**data).validate()
        except (ValueError, TypeError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad fusion config: {exc}") from exc


@dataclass(frozen=True)
class TensionScores:
    low: float = 0.0
    high: float = 0.0

    def get(self, level: TensionLevel) -> float:
        return self.low if level is TensionLevel.LOW else self.high


@dataclass(frozen=True)
class FusionBreakdown:
    visual: TensionScores
    sentiment: TensionScores

    @property
    def total(self) -> TensionScores:
        return TensionScores(self.visual.low + self.sentiment.low, self.visual.high + self.sentiment.high)


@dataclass
class VideoFeatures:
    visual: list
    prosody: list
    sentiments: list
    fps: float
    # (min_db, max_db) fixed for the whole video; derived from prosody if None
    loudness_range: tuple | None = None

    def __post_init__(self):
        if not self.fps > 0:
            raise ValueError(f"fps must be positive, got {self.fps}")


def loudness_range(prosody) -> tuple[float, float] | None:
    if not prosody:
        return None
    values = [f.loudness_db for f in prosody]
    return min(values), max(values)


class AudioTrack:
    """Prosody frames prepared for repeated span-weight queries."""

    def __init__(self, prosody, config: FusionConfig, loud_range=None):
        self.config = config
        self.times = [f.time for f in prosody]
        if any(b < a for a, b in zip(self.times, self.times[1:])):
            raise ValueError("prosody frames must be time-ordered")
        if loud_range is None:
            loud_range = loudness_range(prosody)
        self.activity = [f.voicing_prob * self._normalize(f.loudness_db, loud_range) for f in prosody]

    def _normalize(self, db, loud_range):
        if self.config.loudness_normalization == "absolute":
            floor = self.config.floor_db
            return min(1.0, max(0.0, (db - floor) / -floor))
        lo, hi = loud_range
        if hi <= lo:
            return 1.0
        return min(1.0, max(0.0, (db - lo) / (hi - lo)))

    def weight(self, start: float, end: float) -> float:
        """Floored mean of voicing x normalized loudness over frames in [start, end]."""
        i = bisect.bisect_left(self.times, start)
        j = bisect.bisect_right(self.times, end)
        eps = self.config.weight_floor
        if j <= i:
            return eps
        mean = math.fsum(self.activity[i:j]) / (j - i)
        return eps + (1.0 - eps) * mean


def audio_weight(prosody, span, config: FusionConfig = FusionConfig(), loud_range=None) -> float:
    """Audio weight in ``[weight_floor, 1]`` for the time span ``(start, end)``.

    Loudness is normalized over the whole of ``prosody`` unless
    ``loud_range`` fixes it explicitly.
    """
    return AudioTrack(prosody, config, loud_range).weight(*span)


def accumulate_breakdown(features: VideoFeatures, config: FusionConfig = FusionConfig()) -> FusionBreakdown:
    track = AudioTrack(features.prosody, config, features.loudness_range)
    half = config.visual_window
    terms = {
        ("visual", TensionLevel.LOW): [],
        ("visual", TensionLevel.HIGH): [],
        ("sentiment", TensionLevel.LOW): [],
        ("sentiment", TensionLevel.HIGH): [],
    }

    for vf in sorted(features.visual, key=lambda v: v.frame_index):
        if vf.emotion is EmotionLabel.NONEXISTENT:
            continue
        try:
            level = TensionLevel(config.emotion_map[vf.emotion])
        except KeyError:
            raise ConfigurationError(f"emotion {vf.emotion.value!r} has no tension level") from None
        t = vf.frame_index / features.fps
        terms[("visual", level)].append(vf.intensity * vf.field_size * track.weight(t - half, t + half))

    for sentence, vector in sorted(features.sentiments, key=lambda sv: sv[0].span):
        s = vector.total
        if s == 0:
            continue
        level = TensionLevel.HIGH if s < 0 else TensionLevel.LOW
        terms[("sentiment", level)].append(abs(s) * track.weight(*sentence.span))

    # fsum: exactly rounded, so the result does not depend on float error build-up
    sums = {key: math.fsum(values) for key, values in terms.items()}
    return FusionBreakdown(
        visual=TensionScores(sums[("visual", TensionLevel.LOW)], sums[("visual", TensionLevel.HIGH)]),
        sentiment=TensionScores(sums[("sentiment", TensionLevel.LOW)], sums[("sentiment", TensionLevel.HIGH)]),
    )


def accumulate(features: VideoFeatures, config: FusionConfig = FusionConfig()) -> TensionScores:
    return accumulate_breakdown(features, config).total


def classify(scores: TensionScores, config: FusionConfig = FusionConfig()) -> TensionLevel:
    if scores.high > scores.low:
        return TensionLevel.HIGH
    if scores.low > scores.high:
        return TensionLevel.LOW
    return config.tie_break
