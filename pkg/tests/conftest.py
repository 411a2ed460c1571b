import io
import wave

import numpy as np
import pytest

SR = 16000


def sine(freq, seconds=1.0, amp=0.5, sr=SR, phase=0.0):
    t = np.arange(int(round(seconds * sr))) / sr
    return amp * np.sin(2 * np.pi * freq * t + phase)


def wav_bytes(samples, sr=SR, channels=1, sampwidth=2):
    buf = io.BytesIO()
    with wave.open(buf, "wb") as w:
        w.setnchannels(channels)
        w.setsampwidth(sampwidth)
        w.setframerate(sr)
        w.writeframes(np.asarray(samples).astype("<i%d" % sampwidth).tobytes())
    return buf.getvalue()


@pytest.fixture(scope="session")
def dataset(tmp_path_factory):
    from newstension import fixtures
    return fixtures.generate(tmp_path_factory.mktemp("fixtures"))


def random_video(rng, fps=None, n_visual=None, n_sent=None, with_captions=True):
    """Random but valid VideoFeatures: visual frames, 10 ms prosody and captions."""
    from newstension.caption import Sentence
    from newstension.fusion import VideoFeatures
    from newstension.prosody import ProsodyFrame
    from newstension.sentiment import SentimentVector
    from newstension.visual import EMOTIONS, EmotionLabel, VisualFeatures

    fps = fps or float(rng.choice([5.0, 10.0, 25.0, 29.97]))
    duration = float(rng.uniform(0.5, 6.0))
    n_pros = int(duration / 0.01)
    prosody = []
    for k in range(n_pros):
        voiced = rng.random() < 0.6
        prosody.append(ProsodyFrame(
            0.0125 + 0.01 * k,
            float(rng.uniform(-96, 0)),
            float(rng.uniform(80, 300)) if voiced else 0.0,
            float(rng.uniform(0.45, 1)) if voiced else float(rng.uniform(0, 0.45)),
        ))
    n_visual = int(duration * fps) if n_visual is None else n_visual
    labels = list(EMOTIONS) + [EmotionLabel.NONEXISTENT]
    visual = []
    for i in range(n_visual):
        e = labels[rng.integers(len(labels))]
        if e is EmotionLabel.NONEXISTENT:
            visual.append(VisualFeatures(i, e, 0.0, 0.0))
        else:
            visual.append(VisualFeatures(i, e, float(rng.exponential(1.0)), float(rng.uniform(0, 1))))
    sentiments = []
    if with_captions:
        n_sent = int(rng.integers(0, 8)) if n_sent is None else n_sent
        t = 0.0
        k = int(rng.integers(1, 19))
        for j in range(n_sent):
            start = t + float(rng.uniform(0, 0.5))
            end = start + float(rng.uniform(0.05, 1.0))
            t = end
            scores = [int(s) for s in rng.integers(-1, 2, size=k)]
            sentiments.append((Sentence(f"s{j}", (start, end), j + 1), SentimentVector.of(scores)))
    return VideoFeatures(visual, prosody, sentiments, fps)


def pytest_terminal_summary(terminalreporter):
    import sys
    mod = sys.modules.get("test_acceptance")
    if mod is not None and mod.RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in mod.RESULTS:
            terminalreporter.write_line(line)
