import logging

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from newstension.caption import (
    CaptionCue,
    CaptionParseError,
    CaptionValidationError,
    Sentence,
    format_timestamp,
    parse_srt,
    segment_sentences,
    serialize_srt,
)


def test_single_cue():
    doc = b"1\n00:00:01,000 --> 00:00:02,500\nHello\n\n"
    assert parse_srt(doc) == [CaptionCue(1, 1.0, 2.5, "Hello")]


def test_empty_document():
    assert parse_srt(b"") == []


def test_multiline_text_joined():
    doc = b"1\n00:00:01,000 --> 00:00:02,000\nBREAKING\nNEWS\n"
    assert parse_srt(doc)[0].text == "BREAKING NEWS"


def test_bom_crlf_and_hours():
    doc = "﻿1\r\n01:02:03,004 --> 01:02:04,000\r\nÓtimo  dia\r\n\r\n".encode("utf-8")
    (cue,) = parse_srt(doc)
    assert cue.start == pytest.approx(3723.004)
    assert cue.text == "Ótimo dia"


def test_cues_in_document_order():
    doc = (b"1\n00:00:00,500 --> 00:00:01,000\nA\n\n"
           b"2\n00:00:01,000 --> 00:00:02,000\nB\n\n"
           b"3\n00:00:03,000 --> 00:00:04,000\nC\n")
    assert [c.text for c in parse_srt(doc)] == ["A", "B", "C"]


def test_empty_text_cue_dropped_with_warning(caplog):
    doc = b"1\n00:00:01,000 --> 00:00:02,000\n   \n\n2\n00:00:03,000 --> 00:00:04,000\nkept\n"
    # a whitespace-only body line is indistinguishable from a separator
    with caplog.at_level(logging.WARNING):
        cues = parse_srt(doc)
    assert [c.index for c in cues] == [2]
    assert "dropping cue 1" in caplog.text


@pytest.mark.parametrize("timing", [
    "00:00:01.000 --> 00:00:02,000",
    "0:00:01,000 --> 00:00:02,000",
    "00:00:01,000 -> 00:00:02,000",
    "00:61:01,000 --> 00:62:02,000",
    "garbage",
])
def test_malformed_timestamp_names_line(timing):
    doc = f"1\n00:00:00,000 --> 00:00:00,500\nok\n\n2\n{timing}\nbad\n".encode()
    with pytest.raises(CaptionParseError) as info:
        parse_srt(doc)
    assert info.value.line == 6
    assert "line 6" in str(info.value)


def test_bad_index_is_parse_error():
    with pytest.raises(CaptionParseError):
        parse_srt(b"one\n00:00:01,000 --> 00:00:02,000\nx\n")


def test_end_not_after_start():
    with pytest.raises(CaptionValidationError):
        parse_srt(b"1\n00:00:02,000 --> 00:00:02,000\nx\n")
    with pytest.raises(CaptionValidationError):
        parse_srt(b"1\n00:00:03,000 --> 00:00:02,000\nx\n")


def test_overlap_rejected():
    doc = b"1\n00:00:01,000 --> 00:00:03,000\nA\n\n2\n00:00:02,000 --> 00:00:04,000\nB\n"
    with pytest.raises(CaptionValidationError):
        parse_srt(doc)


def test_invalid_utf8():
    with pytest.raises(CaptionParseError):
        parse_srt(b"1\n00:00:01,000 --> 00:00:02,000\n\xff\xfe\n")


def test_format_timestamp():
    assert format_timestamp(3723.004) == "01:02:03,004"
    assert format_timestamp(0.0) == "00:00:00,000"


def test_segment_three_cues():
    cues = [CaptionCue(i + 1, float(i), i + 0.5, f"s{i}") for i in range(3)]
    sentences = segment_sentences(cues)
    assert [s.text for s in sentences] == ["s0", "s1", "s2"]
    assert [s.span for s in sentences] == [c.span for c in cues]
    assert [s.source_cue for s in sentences] == [1, 2, 3]


def test_segment_empty():
    assert segment_sentences([]) == []


def test_segment_trims():
    (s,) = segment_sentences([CaptionCue(1, 0.0, 1.0, "  Fire downtown.  ")])
    assert s == Sentence("Fire downtown.", (0.0, 1.0), 1)


words = st.text(alphabet=st.characters(whitelist_categories=("L", "N", "P")), min_size=1, max_size=8)
lines = st.lists(words, min_size=1, max_size=4).map(" ".join)


@st.composite
def cue_lists(draw):
    n = draw(st.integers(0, 12))
    t = 0
    cues = []
    for i in range(n):
        t += draw(st.integers(0, 5000))
        dur = draw(st.integers(1, 8000))
        body = draw(st.lists(lines, min_size=1, max_size=3))
        cues.append((i + 1, t, t + dur, body))
        t += dur
    return cues


def _document(spec):
    blocks = []
    for index, start, end, body in spec:
        blocks.append(f"{index}\n{format_timestamp(start / 1000)} --> {format_timestamp(end / 1000)}\n"
                      + "\n".join(body) + "\n")
    return "\n".join(blocks).encode()


@settings(max_examples=200, deadline=None)
@given(cue_lists())
def test_round_trip(spec):
    cues = parse_srt(_document(spec))
    assert len(cues) == len(spec)
    assert parse_srt(serialize_srt(cues)) == cues
    assert len(segment_sentences(cues)) == len(cues)
    for cue, s in zip(cues, segment_sentences(cues)):
        assert s.span == cue.span
