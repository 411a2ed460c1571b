"""SubRip caption parsing and per-cue sentence extraction."""
from __future__ import annotations

import logging
import re
from dataclasses import dataclass

log = logging.getLogger(__name__)

_TIMESTAMP = r"(\d{2,}):([0-5]\d):([0-5]\d),(\d{3})"
_TIMING_LINE = re.compile(rf"^\s*{_TIMESTAMP}\s*-->\s*{_TIMESTAMP}\s*$")
_WS = re.compile(r"\s+")


class CaptionError(ValueError):
    """Base class for caption document problems."""


class CaptionParseError(CaptionError):
    """The document is not well-formed SubRip."""

    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


class CaptionValidationError(CaptionError):
    """Cues are well-formed but their timing is inconsistent."""


@dataclass(frozen=True)
class CaptionCue:
    index: int
    start: float
    end: float
    text: str

    @property
    def span(self) -> tuple[float, float]:
        return (self.start, self.end)


@dataclass(frozen=True)
class Sentence:
    text: str
    span: tuple[float, float]
    source_cue: int


def normalize_text(text: str) -> str:
    """Trim and collapse whitespace runs; casing is preserved."""
    return _WS.sub(" ", text).strip()


def _seconds(h: str, m: str, s: str, ms: str) -> float:
    return (int(h) * 3600_000 + int(m) * 60_000 + int(s) * 1000 + int(ms)) / 1000.0


def format_timestamp(seconds: float) -> str:
    total_ms = int(round(seconds * 1000))
    h, rem = divmod(total_ms, 3600_000)
    m, rem = divmod(rem, 60_000)
    s, ms = divmod(rem, 1000)
    return f"{h:02d}:{m:02d}:{s:02d},{ms:03d}"


def _blocks(lines: list[str]):
    """Yield (first_line_number, lines) for each blank-line separated block."""
    block: list[str] = []
    first = 0
    for number, line in enumerate(lines, start=1):
        if line.strip():
            if not block:
                first = number
            block.append(line)
        elif block:
            yield first, block
            block = []
    if block:
        yield first, block


def parse_srt(document: bytes) -> list[CaptionCue]:
    """Parse a UTF-8 SubRip document into validated cues.

    Multi-line cue bodies are joined with single spaces. Cues whose text is
    empty after whitespace normalization are dropped with a warning.

    Raises
    ------
    CaptionParseError
        Bad encoding, a non-integer cue index or a malformed timing line.
    CaptionValidationError
        A cue ending at or before its start, or overlapping its predecessor.
    """
    try:
        text = document.decode("utf-8-sig")
    except UnicodeDecodeError as exc:
        raise CaptionParseError(f"not valid UTF-8 ({exc.reason})", 1) from exc
    lines = text.replace("\r\n", "\n").replace("\r", "\n").split("\n")

    cues: list[CaptionCue] = []
    for lineno, block in _blocks(lines):
        head = block[0].strip()
        if not head.isdigit():
            raise CaptionParseError(f"expected cue index, got {head!r}", lineno)
        if len(block) < 2:
            raise CaptionParseError("cue has no timing line", lineno)
        match = _TIMING_LINE.match(block[1])
        if match is None:
            raise CaptionParseError(f"malformed timestamp {block[1].strip()!r}", lineno + 1)
        g = match.groups()
        start, end = _seconds(*g[:4]), _seconds(*g[4:])
        index = int(head)
        if end <= start:
            raise CaptionValidationError(
                f"cue {index} (line {lineno}) ends at {end:.3f}s, not after its start {start:.3f}s"
            )
        if cues and start < cues[-1].end:
            raise CaptionValidationError(
                f"cue {index} (line {lineno}) starts at {start:.3f}s, "
                f"overlapping cue {cues[-1].index} which ends at {cues[-1].end:.3f}s"
            )
        body = normalize_text(" ".join(block[2:]))
        if not body:
            log.warning("dropping cue %d at line %d: empty text", index, lineno)
            continue
        cues.append(CaptionCue(index, start, end, body))
    return cues


def serialize_srt(cues: list[CaptionCue]) -> bytes:
    parts = []
    for cue in cues:
        parts.append(
            f"{cue.index}\n{format_timestamp(cue.start)} --> {format_timestamp(cue.end)}\n{cue.text}\n"
        )
    return "\n".join(parts).encode("utf-8")


def segment_sentences(cues: list[CaptionCue]) -> list[Sentence]:
    """One sentence per cue, spans copied verbatim. No cross-cue merging."""
    sentences = []
    for cue in cues:
        sentence = Sentence(normalize_text(cue.text), cue.span, cue.index)
        assert sentence.span == cue.span
        sentences.append(sentence)
    return sentences
