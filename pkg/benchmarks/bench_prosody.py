"""Compare the compiled and NumPy prosody kernels.

    python benchmarks/bench_prosody.py --seconds 60 --repeat 5

Reports the best-of-N wall time per backend, the speedup and the largest
disagreement between the two outputs.
"""
import argparse
import time

import numpy as np

from newstension import _kernels_py
from newstension.prosody import AudioSignal, ProsodyParams, frame_windows, lag_range

try:
    from newstension import _kernels as _compiled
except ImportError:
    _compiled = None


def make_signal(seconds, sr, seed):
    rng = np.random.default_rng(seed)
    t = np.arange(int(seconds * sr)) / sr
    f0 = 140 + 40 * np.sin(2 * np.pi * 0.3 * t)  # slow glide like speech intonation
    voiced = 0.4 * np.sin(2 * np.pi * np.cumsum(f0) / sr)
    gate = (np.sin(2 * np.pi * 1.5 * t) > -0.3).astype(float)
    return voiced * gate + 0.02 * rng.normal(size=t.size)


def best_time(fn, repeat):
    best, out = float("inf"), None
    for _ in range(repeat):
        t0 = time.perf_counter()
        out = fn()
        best = min(best, time.perf_counter() - t0)
    return best, out


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--seconds", type=float, default=60.0, help="audio length to analyze")
    ap.add_argument("--sr", type=int, default=16000)
    ap.add_argument("--repeat", type=int, default=5)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args(argv)

    params = ProsodyParams()
    frames = frame_windows(AudioSignal(make_signal(args.seconds, args.sr, args.seed), args.sr),
                           params.hop, params.window)
    lo, hi = lag_range(args.sr, params)
    kargs = (frames, lo, hi, params.octave_ratio, params.voicing_threshold, params.floor_db)
    print(f"{len(frames)} frames of {frames.shape[1]} samples, lags {lo}..{hi}")

    t_py, out_py = best_time(lambda: _kernels_py.frame_features(*kargs), args.repeat)
    print(f"python  {t_py * 1e3:9.1f} ms  ({len(frames) / t_py:,.0f} frames/s)")
    if _compiled is None:
        print("cython  not built (pip install -e . --no-build-isolation)")
        return 0
    t_cy, out_cy = best_time(lambda: _compiled.frame_features(*kargs), args.repeat)
    print(f"cython  {t_cy * 1e3:9.1f} ms  ({len(frames) / t_cy:,.0f} frames/s)")
    print(f"speedup {t_py / t_cy:.2f}x")
    names = ("loudness_db", "lag", "voicing")
    for name, a, b in zip(names, out_py, out_cy):
        print(f"max |diff| {name:12s} {np.max(np.abs(np.asarray(a) - np.asarray(b))):.3g}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
