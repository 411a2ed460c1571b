import itertools
import json

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newstension.errors import AnnotationSchemaError, AnnotationValidationError
from newstension.visual import (
    EMOTIONS,
    EmotionLabel,
    FaceObservation,
    FrameAnnotation,
    dump_visual_annotations,
    field_size,
    load_visual_annotations,
    recognized_emotion,
    visual_features,
)

E = EmotionLabel


def margins(**over):
    m = {e: -1.0 for e in EMOTIONS}
    m.update({E(k): v for k, v in over.items()})
    return m


def face(x=0, y=0, w=10, h=10, **over):
    return FaceObservation(x, y, w, h, margins(**over))


def doc(frames, width=1920, height=1080):
    return json.dumps({"frame_width": width, "frame_height": height, "frames": frames}).encode()


def raw_face(x=0, y=0, w=10, h=10, drop=None):
    m = {e.value: 0.0 for e in EMOTIONS}
    if drop:
        del m[drop]
    return {"x": x, "y": y, "w": w, "h": h, "margins": m}


def test_load_two_frames():
    w, h, frames = load_visual_annotations(doc([{"index": 0, "faces": [raw_face()]},
                                                {"index": 3, "faces": [raw_face()]}]))
    assert (w, h) == (1920, 1080)
    assert [f.frame_index for f in frames] == [0, 3]
    assert len(frames[0].faces) == 1


def test_load_empty_frames():
    assert load_visual_annotations(doc([]))[2] == []


def test_missing_margin_names_frame():
    with pytest.raises(AnnotationSchemaError, match="frame 7.*fear"):
        load_visual_annotations(doc([{"index": 7, "faces": [raw_face(drop="fear")]}]))


def test_bbox_outside_frame():
    with pytest.raises(AnnotationValidationError):
        load_visual_annotations(doc([{"index": 0, "faces": [raw_face(x=1915)]}]))


def test_non_positive_box():
    with pytest.raises(AnnotationValidationError):
        load_visual_annotations(doc([{"index": 0, "faces": [raw_face(w=0)]}]))


def test_indices_must_increase():
    with pytest.raises(AnnotationValidationError):
        load_visual_annotations(doc([{"index": 2, "faces": []}, {"index": 2, "faces": []}]))


@pytest.mark.parametrize("bad", [b"not json", b"[]", b'{"frame_width": 10}',
                                 doc([{"index": "a", "faces": []}]), doc([{"index": 0}])])
def test_schema_errors(bad):
    with pytest.raises(AnnotationSchemaError):
        load_visual_annotations(bad)


def test_dump_load_round_trip():
    frames = [FrameAnnotation(0, (face(1, 2, 30, 40, anger=0.5),)), FrameAnnotation(4, ())]
    assert load_visual_annotations(dump_visual_annotations(100, 100, frames)) == (100, 100, frames)


def test_field_size_examples():
    assert field_size(FrameAnnotation(0, (face(w=192, h=108),)), 1920, 1080) == pytest.approx(0.01)
    assert field_size(FrameAnnotation(0, ()), 1920, 1080) == 0.0
    two = FrameAnnotation(0, (face(w=10, h=10), face(w=20, h=20)))
    assert field_size(two, 40, 25) == pytest.approx(0.4)


def test_emotion_argmax():
    assert recognized_emotion(FrameAnnotation(0, (face(happiness=1.2),))) == (E.HAPPINESS, 1.2)


def test_emotion_no_face():
    assert recognized_emotion(FrameAnnotation(0, ())) == (E.NONEXISTENT, 0.0)


def test_negative_winner_clamped():
    m = {e: -2.0 for e in EMOTIONS}
    m[E.FEAR] = -0.3
    assert recognized_emotion(FrameAnnotation(0, (FaceObservation(0, 0, 5, 5, m),))) == (E.FEAR, 0.0)


def test_largest_face_decides():
    frame = FrameAnnotation(0, (face(w=5, h=5, happiness=9.0), face(x=10, w=20, h=20, anger=0.5)))
    assert recognized_emotion(frame) == (E.ANGER, 0.5)


def test_tie_breaks():
    # equal areas: lowest x wins
    frame = FrameAnnotation(0, (face(x=50, sadness=1.0), face(x=5, fear=1.0)))
    assert recognized_emotion(frame)[0] is E.FEAR
    # equal margins: label order
    m = {e: 1.0 for e in EMOTIONS}
    assert recognized_emotion(FrameAnnotation(0, (FaceObservation(0, 0, 1, 1, m),)))[0] is E.HAPPINESS
    m[E.HAPPINESS] = 0.0
    assert recognized_emotion(FrameAnnotation(0, (FaceObservation(0, 0, 1, 1, m),)))[0] is E.SURPRISE


def test_visual_features_composition():
    frames = [FrameAnnotation(i, (face(w=20, h=10, anger=1.5),) if i % 2 else ()) for i in range(100)]
    out = visual_features(frames, 100, 100)
    assert len(out) == 100
    assert [v.frame_index for v in out] == list(range(100))
    assert (out[1].emotion, out[1].intensity, out[1].field_size) == (E.ANGER, 1.5, 0.02)
    for v in out[::2]:
        assert (v.emotion, v.intensity, v.field_size) == (E.NONEXISTENT, 0.0, 0.0)


margin_values = st.floats(-5, 5, allow_nan=False)
face_st = st.builds(
    lambda x, y, w, h, ms: FaceObservation(x, y, w, h, dict(zip(EMOTIONS, ms))),
    st.integers(0, 50), st.integers(0, 50), st.integers(1, 50), st.integers(1, 50),
    st.lists(margin_values, min_size=7, max_size=7),
)


@settings(max_examples=200, deadline=None)
@given(st.lists(face_st, max_size=5), st.floats(-3, 3))
def test_properties(faces, shift):
    frame = FrameAnnotation(0, tuple(faces))
    size = field_size(frame, 100, 100)
    assert 0.0 <= size <= 1.0
    emotion, intensity = recognized_emotion(frame)
    # permuted faces give the same answer
    for perm in itertools.islice(itertools.permutations(faces), 6):
        assert recognized_emotion(FrameAnnotation(0, perm)) == (emotion, intensity)
    if not faces:
        assert (emotion, intensity, size) == (E.NONEXISTENT, 0.0, 0.0)
        return
    # common shift of all margins keeps the argmax when it does not create ties
    shifted = tuple(FaceObservation(f.x, f.y, f.w, f.h, {e: v + shift for e, v in f.margins.items()})
                    for f in faces)
    top = sorted(min(faces, key=lambda f: (-f.area, f.x, f.y, f.w, tuple(-f.margins[e] for e in EMOTIONS))).margins.values())
    if len(top) < 2 or top[-1] - top[-2] > 1e-9:
        assert recognized_emotion(FrameAnnotation(0, shifted))[0] is emotion


@given(st.integers(1, 100), st.integers(1, 100))
def test_field_size_monotone(a, b):
    small, large = sorted((a, b))
    f = lambda side: field_size(FrameAnnotation(0, (face(w=side, h=side),)), 100, 100)
    assert f(small) <= f(large)
