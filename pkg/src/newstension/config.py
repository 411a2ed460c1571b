"""Run configuration: a JSON object with ``fusion``, ``prosody`` and ``scorers`` sections.

Example::

    {
      "fusion": {"weight_floor": 0.1, "loudness_normalization": "minmax",
                 "tie_break": "low", "visual_window": 0.005,
                 "emotion_map": {"happiness": "low", "anger": "high", ...}},
      "prosody": {"hop": 0.01, "window": 0.025, "voicing_threshold": 0.45,
                  "f0_min": 50, "f0_max": 500},
      "scorers": [{"name": "general", "lexicon": "builtin:general"},
                  {"name": "news", "lexicon": "builtin:news"}],
      "workers": 4,
      "export_features": false
    }

Every key is optional; omitted keys take the defaults shown by
``RunConfig().to_dict()``.
"""
from __future__ import annotations

import json
from dataclasses import dataclass, field, fields

from .errors import ConfigurationError
from .fusion import FusionConfig
from .prosody import ProsodyParams

DEFAULT_SCORERS = (
    {"name": "general", "lexicon": "builtin:general"},
    {"name": "news", "lexicon": "builtin:news"},
)

_TOP_LEVEL = {"fusion", "prosody", "scorers", "workers", "export_features"}


@dataclass(frozen=True)
class RunConfig:
    fusion: FusionConfig = field(default_factory=FusionConfig)
    prosody: ProsodyParams = field(default_factory=ProsodyParams)
    scorers: tuple = DEFAULT_SCORERS
    workers: int | None = None
    export_features: bool = False

    def to_dict(self) -> dict:
        return {
            "fusion": self.fusion.to_dict(),
            "prosody": self.prosody.to_dict(),
            "scorers": [dict(s) for s in self.scorers],
            "workers": self.workers,
            "export_features": self.export_features,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RunConfig":
        if not isinstance(data, dict):
            raise ConfigurationError("config must be a JSON object")
        unknown = set(data) - _TOP_LEVEL
        if unknown:
            raise ConfigurationError(f"unknown config keys: {', '.join(sorted(unknown))}")

        prosody_raw = data.get("prosody", {})
        known = {f.name for f in fields(ProsodyParams)}
        bad = set(prosody_raw) - known
        if bad:
            raise ConfigurationError(f"unknown prosody keys: {', '.join(sorted(bad))}")
        try:
            prosody = ProsodyParams(**{k: float(v) for k, v in prosody_raw.items()}).validate()
        except (TypeError, ValueError) as exc:
            if isinstance(exc, ConfigurationError):
                raise
            raise ConfigurationError(f"bad prosody config: {exc}") from exc

        fusion_raw = dict(data.get("fusion", {}))
        fusion_raw.setdefault("floor_db", prosody.floor_db)
        fusion = FusionConfig.from_dict(fusion_raw)

        scorers = data.get("scorers", DEFAULT_SCORERS)
        if not isinstance(scorers, (list, tuple)) or not scorers:
            raise ConfigurationError("scorers must be a non-empty list")
        for s in scorers:
            if not isinstance(s, dict) or set(s) != {"name", "lexicon"}:
                raise ConfigurationError(f"scorer entry needs exactly 'name' and 'lexicon': {s!r}")

        workers = data.get("workers")
        if workers is not None and (not isinstance(workers, int) or workers < 1):
            raise ConfigurationError("workers must be a positive integer or null")
        export = data.get("export_features", False)
        if not isinstance(export, bool):
            raise ConfigurationError("export_features must be true or false")
        return cls(fusion, prosody, tuple(dict(s) for s in scorers), workers, export)


def load_config(path) -> RunConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigurationError(f"config {path} is not valid JSON: {exc}") from exc
    return RunConfig.from_dict(data)
