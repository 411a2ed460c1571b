"""NumPy implementation of the per-window prosody kernel.

Used when the compiled ``_kernels`` extension is unavailable, and as the
reference the extension is tested against. Both modules expose
``frame_features`` with the same signature and semantics.
"""
import numpy as np


def _next_pow2(n):
    return 1 << (int(n) - 1).bit_length()


def frame_features(frames, lag_min, lag_max, octave_ratio, voicing_threshold, floor_db):
    """Loudness, pitch lag and voicing for every row of ``frames``.

    Parameters
    ----------
    frames : ndarray, shape (n_frames, width)
        Sample windows, already zero-padded to a common width.
    lag_min, lag_max : int
        Inclusive lag search range in samples. ``lag_min >= 2`` and
        ``lag_max + 1 < width`` are required.
    octave_ratio : float
        A local autocorrelation maximum qualifies as the pitch period if it
        reaches this fraction of the best peak; the shortest qualifying lag
        wins, which suppresses subharmonic (octave-down) errors.
    voicing_threshold : float
        Below this peak value the window is unvoiced and its lag is 0.
    floor_db : float
        Lower clamp for loudness.

    Returns
    -------
    loudness_db, lag, voicing : ndarray, shape (n_frames,)
        ``lag`` is the fractional pitch period in samples (0 when unvoiced).
    """
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    n, width = frames.shape
    if n == 0:
        empty = np.zeros(0)
        return empty, empty.copy(), empty.copy()

    ms = np.mean(frames * frames, axis=1)
    with np.errstate(divide="ignore"):
        loud = 10.0 * np.log10(ms)
    loud = np.clip(np.nan_to_num(loud, neginf=floor_db), floor_db, 0.0)

    x = frames - frames.mean(axis=1, keepdims=True)
    nfft = _next_pow2(2 * width)
    spec = np.fft.rfft(x, nfft, axis=1)
    acf = np.fft.irfft(spec * np.conj(spec), nfft, axis=1)

    taus = np.arange(lag_min - 1, lag_max + 2)
    energy = np.concatenate([np.zeros((n, 1)), np.cumsum(x * x, axis=1)], axis=1)
    head = energy[:, width - taus]
    tail = energy[:, [width]] - energy[:, taus]
    denom = np.sqrt(head * tail)
    ok = denom > 1e-12 * np.maximum(energy[:, [width]], 1e-300)
    r = np.where(ok, acf[:, taus] / np.where(ok, denom, 1.0), 0.0)

    inner = r[:, 1:-1]
    best = inner.max(axis=1)
    voicing = np.clip(best, 0.0, 1.0)

    peaks = (inner >= r[:, :-2]) & (inner >= r[:, 2:]) & (inner >= octave_ratio * best[:, None])
    has_peak = peaks.any(axis=1)
    first = np.where(has_peak, peaks.argmax(axis=1), inner.argmax(axis=1))
    rows = np.arange(n)
    a = r[rows, first]
    b = r[rows, first + 1]
    c = r[rows, first + 2]
    curv = a - 2.0 * b + c
    shift = np.where(has_peak & (curv < 0.0), 0.5 * (a - c) / np.where(curv < 0.0, curv, -1.0), 0.0)
    lag = taus[first + 1] + shift

    voiced = voicing >= voicing_threshold
    lag = np.where(voiced, lag, 0.0)
    return loud, lag, voicing
