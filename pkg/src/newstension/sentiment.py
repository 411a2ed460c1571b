"""Sentence polarity from an ensemble of -1/0/+1 scorers.

Each scorer is an opaque callable ``text -> {-1, 0, +1}`` carrying a
``name``. A sentence's vector holds one score per scorer; its sum is the
sentence's sentiment score. Two lexicon scorers ship with the package
(``builtin:general`` and ``builtin:news``), and any directory holding
``positive.txt`` and ``negative.txt`` can back another.
"""
from __future__ import annotations

import re
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Callable, Sequence

from .caption import Sentence
from .errors import ConfigurationError

_WORD = re.compile(r"[^\W\d_]+")

BUILTIN_LEXICONS = ("general", "news")


@dataclass(frozen=True)
class Lexicon:
    positive: frozenset
    negative: frozenset

    def __post_init__(self):
        overlap = self.positive & self.negative
        if overlap:
            raise ValueError(f"lexicon lists overlap: {sorted(overlap)[:5]}")
        if not (self.positive or self.negative):
            raise ValueError("lexicon is empty")

    @classmethod
    def from_words(cls, positive, negative):
        return cls(frozenset(w.lower() for w in positive), frozenset(w.lower() for w in negative))


def _read_words(text: str):
    return [line.strip() for line in text.splitlines() if line.strip()]


def load_lexicon(directory) -> Lexicon:
    directory = Path(directory)
    try:
        pos = (directory / "positive.txt").read_text(encoding="utf-8")
        neg = (directory / "negative.txt").read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigurationError(f"cannot read lexicon in {directory}: {exc}") from exc
    return Lexicon.from_words(_read_words(pos), _read_words(neg))


def builtin_lexicon(name: str) -> Lexicon:
    if name not in BUILTIN_LEXICONS:
        raise ConfigurationError(f"unknown built-in lexicon {name!r}; have {', '.join(BUILTIN_LEXICONS)}")
    base = resources.files("newstension") / "lexicons" / name
    return Lexicon.from_words(
        _read_words((base / "positive.txt").read_text(encoding="utf-8")),
        _read_words((base / "negative.txt").read_text(encoding="utf-8")),
    )


def tokenize(text: str) -> list[str]:
    return [t.lower() for t in _WORD.findall(text)]


def lexicon_polarity(text: str, lexicon: Lexicon) -> int:
    """Sign of (positive hits - negative hits) over letter-run tokens."""
    balance = 0
    for token in tokenize(text):
        if token in lexicon.positive:
            balance += 1
        elif token in lexicon.negative:
            balance -= 1
    return (balance > 0) - (balance < 0)


class LexiconScorer:
    def __init__(self, name: str, lexicon: Lexicon):
        self.name = name
        self.lexicon = lexicon

    def __call__(self, text: str) -> int:
        return lexicon_polarity(text, self.lexicon)

    def __repr__(self):
        return f"LexiconScorer({self.name!r})"


PolarityScorer = Callable[[str], int]


@dataclass(frozen=True)
class SentimentVector:
    scores: tuple
    total: int

    @classmethod
    def of(cls, scores: Sequence[int]):
        scores = tuple(int(s) for s in scores)
        return cls(scores, sum(scores))


def score_sentence(sentence: Sentence, scorers: Sequence[PolarityScorer]) -> SentimentVector:
    if not scorers:
        raise ValueError("at least one scorer is required")
    text = sentence.text
    if not text.strip():
        return SentimentVector.of([0] * len(scorers))
    scores = []
    for scorer in scorers:
        s = scorer(text)
        if s not in (-1, 0, 1):
            raise ValueError(f"scorer {getattr(scorer, 'name', scorer)!r} returned {s!r}, expected -1, 0 or +1")
        scores.append(s)
    return SentimentVector.of(scores)


def score_captions(sentences, scorers) -> list[tuple[Sentence, SentimentVector]]:
    return [(s, score_sentence(s, scorers)) for s in sentences]


def build_ensemble(declaration: Sequence[dict]) -> list[LexiconScorer]:
    """Instantiate scorers from config entries ``{"name": ..., "lexicon": ...}``.

    ``lexicon`` is ``builtin:<name>`` or a directory path.
    """
    if not declaration:
        raise ConfigurationError("the scorer ensemble is empty")
    scorers = []
    seen = set()
    for entry in declaration:
        try:
            name, source = entry["name"], entry["lexicon"]
        except (KeyError, TypeError):
            raise ConfigurationError(f"scorer entry needs 'name' and 'lexicon': {entry!r}") from None
        if name in seen:
            raise ConfigurationError(f"duplicate scorer name {name!r}")
        seen.add(name)
        if source.startswith("builtin:"):
            lexicon = builtin_lexicon(source.split(":", 1)[1])
        else:
            lexicon = load_lexicon(source)
        scorers.append(LexiconScorer(name, lexicon))
    return scorers
