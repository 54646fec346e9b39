import random

import pytest

from synth import pa_oracle, partition_to_labels, set_partitions
from ustep.evaluation import (
    DatasetFormatError,
    LabeledRecord,
    grouping_accuracy,
    load_labeled_dataset,
    robustness_stats,
    run_miner,
    throughput_bench,
)
from ustep.miner import MinerConfig


def _records(labels):
    return [LabeledRecord(i + 1, f"msg {i}", str(g))
            for i, g in enumerate(labels)]


# -- grouping accuracy -----------------------------------------------------

def test_perfect_parse():
    recs = _records(["A", "A", "B", "B"])
    rep = grouping_accuracy(recs, [1, 1, 2, 2])
    assert rep.parsing_accuracy == 1.0
    assert (rep.correct_groups, rep.total_groups) == (2, 2)


def test_merged_groups_fail_both():
    recs = _records(["A", "A", "B", "B"])
    rep = grouping_accuracy(recs, [1, 1, 1, 2])
    assert rep.parsing_accuracy == 0.0
    assert rep.correct_groups == 0


def test_split_group_fails_only_itself():
    recs = _records(["A", "A", "B", "B"])
    rep = grouping_accuracy(recs, [1, 1, 2, 3])
    assert rep.parsing_accuracy == 0.5
    assert rep.correct_groups == 1
    assert rep.group_detail["B"] == [2, 3]


def test_length_mismatch_rejected():
    with pytest.raises(ValueError):
        grouping_accuracy(_records(["A"]), [1, 2])


def test_relabeling_predictions_never_changes_accuracy():
    rng = random.Random(7)
    for _ in range(50):
        n = rng.randrange(1, 12)
        truth = [rng.randrange(3) for _ in range(n)]
        pred = [rng.randrange(4) for _ in range(n)]
        base = grouping_accuracy(_records(truth), pred).parsing_accuracy
        perm = {v: f"p{v}" for v in set(pred)}
        relabeled = [perm[v] for v in pred]
        assert grouping_accuracy(_records(truth),
                                 relabeled).parsing_accuracy == base


def test_exhaustive_partitions_match_brute_force_oracle():
    # every pair of partitions of 5 messages, scored both ways
    n = 5
    parts = list(set_partitions(range(n)))
    for truth_part in parts:
        truth = partition_to_labels(truth_part, n)
        recs = _records(truth)
        for pred_part in parts:
            pred = partition_to_labels(pred_part, n)
            got = grouping_accuracy(recs, pred).parsing_accuracy
            assert got == pytest.approx(pa_oracle(truth, pred))


def test_accuracy_one_iff_partitions_equal():
    n = 4
    parts = list(set_partitions(range(n)))
    for truth_part in parts:
        truth = partition_to_labels(truth_part, n)
        recs = _records(truth)
        for pred_part in parts:
            pred = partition_to_labels(pred_part, n)
            pa = grouping_accuracy(recs, pred).parsing_accuracy
            same = sorted(map(sorted, truth_part)) == \
                sorted(map(sorted, pred_part))
            assert (pa == 1.0) == same


# -- dataset loading -------------------------------------------------------

def test_load_labeled_csv(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text(
        "LineId,Content,EventId,EventTemplate\n"
        '1,"hello, world",E1,hello <*>\n'
        "2,bye now,E2,bye <*>\n")
    recs = load_labeled_dataset(path)
    assert len(recs) == 2
    assert recs[0].content == "hello, world"
    assert recs[0].event_id == "E1"
    assert recs[1].line_id == 2


def test_load_header_only(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("LineId,Content,EventId\n")
    assert load_labeled_dataset(path) == []


def test_load_missing_column(tmp_path):
    path = tmp_path / "d.csv"
    path.write_text("LineId,Content\n1,x\n")
    with pytest.raises(DatasetFormatError, match="EventId"):
        load_labeled_dataset(path)


def test_load_unreadable_file(tmp_path):
    with pytest.raises(OSError):
        load_labeled_dataset(tmp_path / "missing.csv")


# -- throughput ------------------------------------------------------------

def test_chunk_bookkeeping():
    lines = [f"evt {i % 3} ok" for i in range(95)]
    rep = throughput_bench(MinerConfig(), lines, chunk_size=10)
    assert rep.total_messages == 95
    assert len(rep.chunk_seconds) == 10
    assert rep.total_seconds == pytest.approx(sum(rep.chunk_seconds))


def test_state_persists_across_chunks():
    lines = ["same line here"] * 40
    predicted, rep, miner = run_miner(MinerConfig(), lines, chunk_size=7)
    assert set(predicted) == {1}
    assert miner.stats.template_count == 1


def test_empty_stream():
    rep = throughput_bench(MinerConfig(), [], chunk_size=5)
    assert rep.total_messages == 0
    assert rep.chunk_seconds == []
    assert rep.total_seconds == 0.0


def test_bad_chunk_size():
    with pytest.raises(ValueError):
        throughput_bench(MinerConfig(), ["x"], chunk_size=0)


# -- robustness ------------------------------------------------------------

def test_singleton_stats():
    rep = robustness_stats([1.0])
    assert (rep.minimum, rep.q1, rep.median, rep.q3, rep.maximum) == \
        (1.0, 1.0, 1.0, 1.0, 1.0)
    assert rep.iqr == 0.0


def test_two_point_median():
    assert robustness_stats([0.0, 1.0]).median == 0.5


def test_constant_list_has_zero_iqr():
    rep = robustness_stats([0.42] * 9)
    assert rep.iqr == 0.0


def test_published_benchmark_mean():
    values = [1.0, 0.964, 0.951, 0.998, 0.906, 0.848, 0.996, 0.764,
              0.954, 0.988]
    rep = robustness_stats(values)
    assert sum(rep.values) / len(rep.values) == pytest.approx(0.937, abs=5e-4)
    assert rep.q1 <= rep.median <= rep.q3


def test_empty_values_rejected():
    with pytest.raises(ValueError):
        robustness_stats([])
