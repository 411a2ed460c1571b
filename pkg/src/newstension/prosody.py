"""WAV decoding and per-10 ms prosodic features.

Three features are produced per analysis window: RMS loudness in dBFS,
fundamental frequency from normalized autocorrelation, and a voicing
probability equal to the autocorrelation peak height.

The per-window work runs in the compiled ``_kernels`` extension when it is
importable and in ``_kernels_py`` (NumPy) otherwise. Set
``NEWSTENSION_PURE_PYTHON=1`` to force the fallback.
"""
from __future__ import annotations

import csv
import io
import math
import os
import wave
from dataclasses import asdict, dataclass

import numpy as np

from .errors import ConfigurationError, CorruptFileError, UnsupportedFormatError

if os.environ.get("NEWSTENSION_PURE_PYTHON") == "1":
    from . import _kernels_py as _kernels
    BACKEND = "python"
else:
    try:
        from . import _kernels
        BACKEND = "cython"
    except ImportError:
        from . import _kernels_py as _kernels
        BACKEND = "python"

MIN_SAMPLE_RATE = 8000


@dataclass(frozen=True)
class ProsodyParams:
    hop: float = 0.010
    window: float = 0.025
    voicing_threshold: float = 0.45
    f0_min: float = 50.0
    f0_max: float = 500.0
    # shortest autocorrelation peak within this fraction of the best wins
    octave_ratio: float = 0.9
    floor_db: float = -96.0

    def validate(self):
        if not 0 < self.hop <= self.window:
            raise ConfigurationError(f"need 0 < hop <= window, got hop={self.hop} window={self.window}")
        if not 0 < self.f0_min < self.f0_max:
            raise ConfigurationError(f"bad f0 band [{self.f0_min}, {self.f0_max}]")
        if not 0.0 <= self.voicing_threshold <= 1.0:
            raise ConfigurationError("voicing_threshold must lie in [0, 1]")
        if not 0.0 < self.octave_ratio <= 1.0:
            raise ConfigurationError("octave_ratio must lie in (0, 1]")
        if self.floor_db >= 0:
            raise ConfigurationError("floor_db must be negative")
        return self

    def to_dict(self):
        return asdict(self)


@dataclass(frozen=True)
class AudioSignal:
    samples: np.ndarray
    sample_rate: int

    @property
    def duration(self) -> float:
        return len(self.samples) / self.sample_rate


@dataclass(frozen=True)
class ProsodyFrame:
    time: float
    loudness_db: float
    f0_hz: float
    voicing_prob: float


def decode_wav(document: bytes) -> AudioSignal:
    """Decode a 16-bit PCM RIFF/WAVE document; stereo is averaged to mono."""
    try:
        with wave.open(io.BytesIO(document), "rb") as wav:
            channels = wav.getnchannels()
            width = wav.getsampwidth()
            rate = wav.getframerate()
            nframes = wav.getnframes()
            raw = wav.readframes(nframes)
    except wave.Error as exc:
        if "unknown format" in str(exc):
            raise UnsupportedFormatError(f"non-PCM WAV codec ({exc})") from exc
        raise CorruptFileError(f"unreadable WAV: {exc}") from exc
    except (EOFError, ValueError) as exc:
        raise CorruptFileError(f"truncated WAV header: {exc}") from exc

    if width != 2:
        raise UnsupportedFormatError(f"only 16-bit PCM is supported, got {8 * width}-bit")
    if channels not in (1, 2):
        raise UnsupportedFormatError(f"only mono or stereo is supported, got {channels} channels")
    if len(raw) != nframes * channels * width:
        raise CorruptFileError(
            f"data chunk truncated: header declares {nframes} frames, found {len(raw) // (channels * width)}"
        )
    pcm = np.frombuffer(raw, dtype="<i2").astype(np.float64) / 32768.0
    if channels == 2:
        pcm = pcm.reshape(-1, 2).mean(axis=1)
    return AudioSignal(pcm, rate)


def encode_wav(signal: AudioSignal) -> bytes:
    """16-bit mono PCM encoding; samples are clipped to the representable range."""
    pcm = np.clip(np.round(np.asarray(signal.samples) * 32768.0), -32768, 32767).astype("<i2")
    buf = io.BytesIO()
    with wave.open(buf, "wb") as wav:
        wav.setnchannels(1)
        wav.setsampwidth(2)
        wav.setframerate(signal.sample_rate)
        wav.writeframes(pcm.tobytes())
    return buf.getvalue()


def _samples_per(seconds: float, sample_rate: int) -> int:
    return max(1, int(round(seconds * sample_rate)))


def window_starts(n_samples: int, hop_n: int, win_n: int) -> np.ndarray:
    """Start offsets of every analysis window, including a padded tail."""
    if n_samples < win_n:
        return np.zeros(0, dtype=np.int64)
    n_full = (n_samples - win_n) // hop_n + 1
    starts = np.arange(n_full, dtype=np.int64) * hop_n
    if (n_samples - win_n) % hop_n:
        starts = np.append(starts, n_full * hop_n)
    return starts


def frame_windows(signal: AudioSignal, hop: float = 0.010, window: float = 0.025) -> np.ndarray:
    """Slice ``signal`` into overlapping windows, shape ``(n_windows, window_samples)``.

    The final partial window is zero-padded. A signal shorter than one
    window yields an empty array.
    """
    if window < hop:
        raise ConfigurationError("window must be at least as long as hop")
    hop_n = _samples_per(hop, signal.sample_rate)
    win_n = _samples_per(window, signal.sample_rate)
    samples = np.asarray(signal.samples, dtype=np.float64)
    starts = window_starts(len(samples), hop_n, win_n)
    if len(starts) == 0:
        return np.zeros((0, win_n))
    padded = np.concatenate([samples, np.zeros(win_n)])
    idx = starts[:, None] + np.arange(win_n)[None, :]
    return padded[idx]


def loudness_db(window, floor_db: float = -96.0) -> float:
    """RMS level in dBFS with a rectangular window, floored at ``floor_db``."""
    window = np.asarray(window, dtype=np.float64)
    if window.size == 0:
        raise ValueError("loudness of an empty window is undefined")
    rms = math.sqrt(float(np.mean(window * window)))
    if rms == 0.0:
        return floor_db
    return min(0.0, max(floor_db, 20.0 * math.log10(rms)))


def lag_range(sample_rate: int, params: ProsodyParams) -> tuple[int, int]:
    lag_min = int(math.floor(sample_rate / params.f0_max))
    lag_max = int(math.ceil(sample_rate / params.f0_min))
    if lag_min < 2:
        raise ConfigurationError(
            f"sample rate {sample_rate} Hz is too low for an f0 ceiling of {params.f0_max} Hz"
        )
    return lag_min, lag_max


def _check_width(width: int, lag_max: int, params: ProsodyParams):
    if lag_max + 1 >= width:
        raise ConfigurationError(
            f"a {width}-sample window cannot hold one period at {params.f0_min} Hz"
        )


def estimate_f0(window, sample_rate: int, params: ProsodyParams = ProsodyParams()) -> tuple[float, float]:
    """Return ``(f0_hz, voicing_prob)`` for one window; ``f0_hz`` is 0 when unvoiced."""
    frame = np.asarray(window, dtype=np.float64)[None, :]
    lag_min, lag_max = lag_range(sample_rate, params)
    _check_width(frame.shape[1], lag_max, params)
    _, lag, voicing = _kernels.frame_features(
        frame, lag_min, lag_max, params.octave_ratio, params.voicing_threshold, params.floor_db
    )
    f0 = sample_rate / lag[0] if lag[0] > 0 else 0.0
    return float(f0), float(voicing[0])


def extract_prosody(signal: AudioSignal, params: ProsodyParams = ProsodyParams()) -> list[ProsodyFrame]:
    params.validate()
    if signal.sample_rate < MIN_SAMPLE_RATE:
        raise ConfigurationError(
            f"sample rate {signal.sample_rate} Hz is below the {MIN_SAMPLE_RATE} Hz speech minimum"
        )
    frames = frame_windows(signal, params.hop, params.window)
    if len(frames) == 0:
        return []
    lag_min, lag_max = lag_range(signal.sample_rate, params)
    _check_width(frames.shape[1], lag_max, params)
    loud, lag, voicing = _kernels.frame_features(
        frames, lag_min, lag_max, params.octave_ratio, params.voicing_threshold, params.floor_db
    )
    sr = signal.sample_rate
    hop_n = _samples_per(params.hop, sr)
    half = frames.shape[1] / 2.0
    out = []
    for k in range(len(frames)):
        f0 = sr / lag[k] if lag[k] > 0 else 0.0
        out.append(ProsodyFrame((k * hop_n + half) / sr, float(loud[k]), float(f0), float(voicing[k])))
    return out


def write_prosody_csv(frames: list[ProsodyFrame], stream) -> None:
    writer = csv.writer(stream, lineterminator="\n")
    writer.writerow(["time", "loudness_db", "f0_hz", "voicing_prob"])
    for f in frames:
        writer.writerow([f"{f.time:.6f}", f"{f.loudness_db:.6f}", f"{f.f0_hz:.6f}", f"{f.voicing_prob:.6f}"])


def read_prosody_csv(stream) -> list[ProsodyFrame]:
    reader = csv.DictReader(stream)
    return [
        ProsodyFrame(float(r["time"]), float(r["loudness_db"]), float(r["f0_hz"]), float(r["voicing_prob"]))
        for r in reader
    ]
