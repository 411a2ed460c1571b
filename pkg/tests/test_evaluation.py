import pytest

from newstension.errors import EvaluationError
from newstension.evaluation import (
    AnnotationRecord,
    GoldLabel,
    accuracy,
    agreement_stats,
    baseline_field_size,
    baseline_sentiment,
    evaluate,
    gold_labels,
    majority_label,
    read_annotations_csv,
    sweep_field_size_threshold,
    write_annotations_csv,
)
from newstension.fixtures import agreement_fixture_records
from newstension.fusion import TensionLevel

H, L = TensionLevel.HIGH, TensionLevel.LOW


def recs(video, labels):
    return [AnnotationRecord(video, f"a{i}", lab) for i, lab in enumerate(labels)]


def test_majority_three_of_four():
    g = majority_label(recs("v", [H, H, H, L]))
    assert g == GoldLabel("v", H, 0.75, 3, 4)
    assert not g.unanimous


def test_majority_unanimous():
    g = majority_label(recs("v", [L, L, L, L]))
    assert g.label is L and g.agreement == 1.0 and g.unanimous


def test_tie_abstains():
    assert majority_label(recs("v", [H, H, L, L])) is None


def test_odd_panel():
    assert majority_label(recs("v", [H, L, H])).agreement == pytest.approx(2 / 3)


def test_duplicate_annotator():
    with pytest.raises(EvaluationError):
        majority_label([AnnotationRecord("v", "a", H), AnnotationRecord("v", "a", L)])
    with pytest.raises(EvaluationError):
        gold_labels([AnnotationRecord("v", "a", H), AnnotationRecord("v", "a", H)])


def test_agreement_520():
    stats = agreement_stats(agreement_fixture_records())
    assert stats["videos"] == 520
    assert stats["full_agreement_rate"] == pytest.approx(0.7327, abs=1e-4)
    assert stats["rate_at_0_75"] == pytest.approx(0.1846, abs=1e-4)
    assert stats["counts"] == {"full": 381, "at_0_75": 96, "other_majority": 0, "ties": 43}


def test_agreement_empty():
    assert agreement_stats([])["full_agreement_rate"] == 0.0


def test_csv_round_trip():
    records = recs("v1", [H, L, H]) + recs("v2", [L, L, L])
    assert read_annotations_csv(write_annotations_csv(records)) == records


def test_csv_bad_label():
    with pytest.raises(EvaluationError):
        read_annotations_csv(b"video_id,annotator_id,label\nv,a,medium\n")
    with pytest.raises(EvaluationError):
        read_annotations_csv(b"video,who,label\nv,a,high\n")


def test_accuracy():
    gold = [GoldLabel("a", H, 1.0), GoldLabel("b", L, 1.0), GoldLabel("c", H, 0.75)]
    assert accuracy({"a": H, "b": L, "c": L}, gold) == pytest.approx(2 / 3)
    with pytest.raises(EvaluationError):
        accuracy({"a": H}, gold)
    with pytest.raises(EvaluationError):
        accuracy({}, [])


def test_field_size_baseline_rule():
    preds = baseline_field_size({"a": 0.1, "b": 0.3, "c": 0.2}, 0.2)
    assert preds == {"a": L, "b": H, "c": H}


def test_sweep_separable():
    means = {f"v{i}": 0.05 * i for i in range(10)}
    gold = [GoldLabel(v, H if m > 0.22 else L, 1.0) for v, m in means.items()]
    theta, acc = sweep_field_size_threshold(means, gold)
    assert acc == 1.0
    assert accuracy(baseline_field_size(means, theta), gold) == 1.0
    assert 0.2 < theta <= 0.25


def test_sweep_all_high_picks_minimum():
    means = {"a": 0.3, "b": 0.1}
    theta, acc = sweep_field_size_threshold(means, [GoldLabel("a", H, 1), GoldLabel("b", H, 1)])
    assert (theta, acc) == (0.1, 1.0)


def test_sweep_empty():
    with pytest.raises(EvaluationError):
        sweep_field_size_threshold({"a": 1.0}, [GoldLabel("b", H, 1)])


def test_sentiment_baseline():
    assert baseline_sentiment({"a": -1, "b": 0, "c": 3}) == {"a": H, "b": L, "c": L}


def test_evaluate_report():
    records = recs("v1", [H] * 4) + recs("v2", [L, L, L, H]) + recs("v3", [H, H, L, L]) + recs("v4", [L] * 4)
    perfect = {"v1": H, "v2": L, "v3": H, "v4": L}
    wrong = {"v1": L, "v2": L, "v3": L, "v4": L}
    out = evaluate({"proposed": perfect, "constant": wrong}, records)
    assert out["abstained_videos"] == ["v3"]
    assert out["approaches"]["proposed"] == {"all": 1.0, "n_all": 3, "concordance": 1.0, "n_concordance": 2}
    assert out["approaches"]["constant"]["all"] == pytest.approx(2 / 3)
    assert out["approaches"]["constant"]["concordance"] == 0.5
    subsets = {t["subset"]: t for t in out["t_tests"]}
    assert set(subsets) == {"all", "concordance"}
    assert subsets["all"]["n"] == 3


def test_evaluate_identical_approaches():
    records = recs("v1", [H] * 4) + recs("v2", [L] * 4) + recs("v3", [H, H, H, L])
    p = {"v1": H, "v2": H, "v3": H}
    out = evaluate({"a": p, "b": dict(p)}, records)
    for t in out["t_tests"]:
        assert t["p_two_sided"] == 1.0 and not t["significant_at_0_05"]


def test_evaluate_missing_predictions_excluded():
    records = recs("v1", [H] * 4) + recs("v2", [L] * 4)
    out = evaluate({"partial": {"v1": H}}, records)
    assert out["approaches"]["partial"]["n_all"] == 1
    assert out["approaches"]["partial"]["all"] == 1.0
