"""Annotator agreement, accuracy, single-feature baselines and comparisons."""
from __future__ import annotations

import csv
import io
import logging
from collections import Counter, defaultdict
from dataclasses import dataclass
from itertools import combinations

from .errors import EvaluationError
from .fusion import TensionLevel
from .stats import paired_t_test

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class AnnotationRecord:
    video_id: str
    annotator_id: str
    label: TensionLevel


@dataclass(frozen=True)
class GoldLabel:
    video_id: str
    label: TensionLevel
    agreement: float
    votes: int = 0
    annotators: int = 0

    @property
    def unanimous(self) -> bool:
        return self.votes == self.annotators


def read_annotations_csv(document: bytes) -> list[AnnotationRecord]:
    """Parse ``video_id,annotator_id,label`` rows; labels are ``low``/``high``."""
    reader = csv.DictReader(io.StringIO(document.decode("utf-8-sig")))
    expected = {"video_id", "annotator_id", "label"}
    if reader.fieldnames is None or not expected <= set(reader.fieldnames):
        raise EvaluationError(f"annotations need columns {sorted(expected)}, got {reader.fieldnames}")
    records = []
    for lineno, row in enumerate(reader, start=2):
        try:
            label = TensionLevel(row["label"].strip().lower())
        except ValueError:
            raise EvaluationError(f"line {lineno}: label must be low or high, got {row['label']!r}") from None
        records.append(AnnotationRecord(row["video_id"].strip(), row["annotator_id"].strip(), label))
    return records


def write_annotations_csv(records) -> bytes:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(["video_id", "annotator_id", "label"])
    for r in records:
        writer.writerow([r.video_id, r.annotator_id, r.label.value])
    return buf.getvalue().encode("utf-8")


def group_by_video(records) -> dict[str, list[AnnotationRecord]]:
    grouped = defaultdict(list)
    seen = set()
    for r in records:
        key = (r.video_id, r.annotator_id)
        if key in seen:
            raise EvaluationError(f"annotator {r.annotator_id!r} labeled video {r.video_id!r} twice")
        seen.add(key)
        grouped[r.video_id].append(r)
    return dict(grouped)


def majority_label(records) -> GoldLabel | None:
    """Strict-majority label for one video's records; None on a tie."""
    records = list(records)
    if not records:
        raise EvaluationError("no annotation records")
    videos = {r.video_id for r in records}
    if len(videos) != 1:
        raise EvaluationError(f"records span several videos: {sorted(videos)}")
    annotators = [r.annotator_id for r in records]
    if len(set(annotators)) != len(annotators):
        dup = next(a for a, c in Counter(annotators).items() if c > 1)
        raise EvaluationError(f"annotator {dup!r} labeled video {records[0].video_id!r} twice")
    counts = Counter(r.label for r in records)
    n = len(records)
    for level in (TensionLevel.LOW, TensionLevel.HIGH):
        if 2 * counts[level] > n:
            return GoldLabel(records[0].video_id, level, counts[level] / n, counts[level], n)
    return None


def gold_labels(records) -> tuple[list[GoldLabel], list[str]]:
    """Gold labels in video-id order plus the ids that abstained (ties)."""
    gold, ties = [], []
    for video_id, recs in sorted(group_by_video(records).items()):
        g = majority_label(recs)
        if g is None:
            ties.append(video_id)
        else:
            gold.append(g)
    return gold, ties


def agreement_stats(records) -> dict:
    """Share of videos with unanimous labels and with exactly 3-of-4 style agreement.

    ``counts`` partitions the videos into ``full``, ``at_0_75``,
    ``other_majority`` (strict majority at any other level) and ``ties``.
    """
    grouped = group_by_video(records)
    counts = Counter(full=0, at_0_75=0, other_majority=0, ties=0)
    for recs in grouped.values():
        g = majority_label(recs)
        if g is None:
            counts["ties"] += 1
        elif g.votes == g.annotators:
            counts["full"] += 1
        elif 4 * g.votes == 3 * g.annotators:
            counts["at_0_75"] += 1
        else:
            counts["other_majority"] += 1
    total = len(grouped)
    return {
        "videos": total,
        "full_agreement_rate": counts["full"] / total if total else 0.0,
        "rate_at_0_75": counts["at_0_75"] / total if total else 0.0,
        "counts": dict(counts),
    }


def accuracy(predictions: dict, gold) -> float:
    gold = list(gold)
    if not gold:
        raise EvaluationError("no gold-labeled videos to evaluate")
    hits = 0
    for g in gold:
        if g.video_id not in predictions:
            raise EvaluationError(f"no prediction for video {g.video_id!r}")
        hits += TensionLevel(predictions[g.video_id]) is g.label
    return hits / len(gold)


def correctness(predictions: dict, gold) -> list[int]:
    return [int(TensionLevel(predictions[g.video_id]) is g.label) for g in gold]


def baseline_field_size(mean_field: dict, threshold: float) -> dict:
    """High when a video's mean field size reaches ``threshold``."""
    return {vid: TensionLevel.HIGH if m >= threshold else TensionLevel.LOW for vid, m in mean_field.items()}


def sweep_field_size_threshold(mean_field: dict, calibration) -> tuple[float, float]:
    """Exhaustive threshold search maximizing accuracy on ``calibration`` gold rows.

    Candidates are the lowest observed mean, every midpoint between
    consecutive distinct means and one above the highest; predictions only
    change at those points. Ties go to the smallest threshold.
    """
    calibration = [g for g in calibration if g.video_id in mean_field]
    if not calibration:
        raise EvaluationError("empty calibration split for the field-size baseline")
    values = sorted({mean_field[g.video_id] for g in calibration})
    candidates = [values[0]] + [(a + b) / 2 for a, b in zip(values, values[1:])] + [values[-1] + 1.0]
    best_theta, best_acc = candidates[0], -1.0
    for theta in candidates:
        acc = accuracy(baseline_field_size(mean_field, theta), calibration)
        if acc > best_acc:
            best_theta, best_acc = theta, acc
    return best_theta, best_acc


def baseline_sentiment(total_sentiment: dict) -> dict:
    """High when the summed sentence scores of a video are negative."""
    return {vid: TensionLevel.HIGH if s < 0 else TensionLevel.LOW for vid, s in total_sentiment.items()}


def _ttest_dict(result):
    t = result.t if result.t == result.t and abs(result.t) != float("inf") else None
    return {"t": t, "df": result.df, "p_two_sided": result.p_two_sided, "significant_at_0_05": result.significant()}


def evaluate(approaches: dict, records) -> dict:
    """Accuracy of each approach on all majority-labeled videos and the unanimous subset.

    ``approaches`` maps a name to ``{video_id: TensionLevel}``. Gold videos
    an approach cannot predict are left out of that approach's rows (with a
    warning) and out of any t-test involving it.
    """
    gold, ties = gold_labels(records)
    subsets = {"all": gold, "concordance": [g for g in gold if g.unanimous]}
    out = {
        "agreement": agreement_stats(records),
        "denominator": "strict-majority gold labels; 2-2 ties abstain",
        "abstained_videos": ties,
        "approaches": {},
        "t_tests": [],
    }
    for name, preds in approaches.items():
        row = {}
        for subset, rows in subsets.items():
            covered = [g for g in rows if g.video_id in preds]
            if len(covered) < len(rows):
                log.warning("%s: %d %s gold video(s) lack a prediction", name, len(rows) - len(covered), subset)
            row[subset] = accuracy(preds, covered) if covered else None
            row[f"n_{subset}"] = len(covered)
        out["approaches"][name] = row

    for a, b in combinations(approaches, 2):
        for subset, rows in subsets.items():
            shared = [g for g in rows if g.video_id in approaches[a] and g.video_id in approaches[b]]
            if len(shared) < 2:
                continue
            result = paired_t_test(correctness(approaches[a], shared), correctness(approaches[b], shared))
            out["t_tests"].append({"a": a, "b": b, "subset": subset, "n": len(shared), **_ttest_dict(result)})
    return out
