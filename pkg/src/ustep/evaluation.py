"""Scoring and measurement harness: grouping accuracy, throughput, robustness."""

import csv
import time
from collections import defaultdict
from dataclasses import dataclass, field

import numpy as np

from .miner import Miner


class DatasetFormatError(ValueError):
    """Labeled CSV is missing a required column."""


@dataclass
class LabeledRecord:
    line_id: int
    content: str
    event_id: str
    event_template: str = ""


@dataclass
class GroupingReport:
    dataset_name: str
    total_messages: int
    parsing_accuracy: float
    correct_groups: int
    total_groups: int
    #: ground-truth group -> sorted predicted template ids seen in it
    group_detail: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "dataset_name": self.dataset_name,
            "total_messages": self.total_messages,
            "parsing_accuracy": self.parsing_accuracy,
            "correct_groups": self.correct_groups,
            "total_groups": self.total_groups,
            "group_detail": self.group_detail,
        }


@dataclass
class ThroughputReport:
    dataset_name: str
    total_messages: int
    total_seconds: float
    chunk_size: int
    chunk_seconds: list

    def as_dict(self):
        return {
            "dataset_name": self.dataset_name,
            "total_messages": self.total_messages,
            "total_seconds": self.total_seconds,
            "chunk_size": self.chunk_size,
            "chunk_seconds": self.chunk_seconds,
        }


@dataclass
class RobustnessReport:
    values: list
    minimum: float
    q1: float
    median: float
    q3: float
    maximum: float
    iqr: float

    def as_dict(self):
        return {
            "values": self.values,
            "min": self.minimum,
            "q1": self.q1,
            "median": self.median,
            "q3": self.q3,
            "max": self.maximum,
            "iqr": self.iqr,
        }


REQUIRED_COLUMNS = ("LineId", "Content", "EventId")


def load_labeled_dataset(path):
    """Read a loghub-style structured CSV into LabeledRecords, in file order."""
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        header = reader.fieldnames or []
        for col in REQUIRED_COLUMNS:
            if col not in header:
                raise DatasetFormatError(
                    f"{path}: missing required column {col!r}")
        has_template = "EventTemplate" in header
        records = []
        for row in reader:
            records.append(LabeledRecord(
                line_id=int(row["LineId"]),
                content=row["Content"],
                event_id=row["EventId"],
                event_template=row["EventTemplate"] if has_template else "",
            ))
    return records


def grouping_accuracy(records, predicted, dataset_name=""):
    """Score predictions against ground-truth groups.

    A ground-truth group counts as correct only when its messages all got
    one single predicted template id and no outside message got that id.
    Accuracy is the fraction of messages lying in correct groups.
    """
    if len(records) != len(predicted):
        raise ValueError("predicted length must match record count")
    truth = defaultdict(list)
    pred_sizes = defaultdict(int)
    for rec, tid in zip(records, predicted):
        truth[rec.event_id].append(tid)
        pred_sizes[tid] += 1
    correct_groups = 0
    correct_messages = 0
    detail = {}
    for event_id, tids in truth.items():
        uniq = set(tids)
        detail[event_id] = sorted(uniq)
        if len(uniq) == 1 and pred_sizes[tids[0]] == len(tids):
            correct_groups += 1
            correct_messages += len(tids)
    total = len(records)
    return GroupingReport(
        dataset_name=dataset_name,
        total_messages=total,
        parsing_accuracy=correct_messages / total if total else 0.0,
        correct_groups=correct_groups,
        total_groups=len(truth),
        group_detail=detail,
    )


def run_miner(config, lines, chunk_size=1000, dataset_name=""):
    """Feed lines through a fresh miner, timing each chunk.

    Returns (predicted template ids, ThroughputReport, miner).  Miner
    state persists across chunks; timings cover preprocessing through
    template assignment end to end.
    """
    if chunk_size < 1:
        raise ValueError("chunk_size must be >= 1")
    miner = Miner(config)
    predicted = []
    chunk_seconds = []
    total = 0
    it = iter(lines)
    done = False
    while not done:
        start = time.perf_counter()
        n = 0
        for line in it:
            predicted.append(miner.process_message(line).template_id)
            n += 1
            if n == chunk_size:
                break
        else:
            done = True
        if n:
            chunk_seconds.append(time.perf_counter() - start)
            total += n
    report = ThroughputReport(
        dataset_name=dataset_name,
        total_messages=total,
        total_seconds=sum(chunk_seconds),
        chunk_size=chunk_size,
        chunk_seconds=chunk_seconds,
    )
    return predicted, report, miner


def throughput_bench(config, lines, chunk_size, dataset_name=""):
    """Process a raw line stream once and report per-chunk wall time."""
    _, report, _ = run_miner(config, lines, chunk_size, dataset_name)
    return report


def robustness_stats(values):
    """Five-number summary of accuracy values.

    Quartiles use inclusive linear interpolation so results are
    reproducible across implementations.
    """
    if not len(values):
        raise ValueError("robustness_stats requires at least one value")
    vals = [float(v) for v in values]
    q1, med, q3 = np.percentile(vals, [25, 50, 75])
    return RobustnessReport(
        values=vals,
        minimum=min(vals),
        q1=float(q1),
        median=float(med),
        q3=float(q3),
        maximum=max(vals),
        iqr=float(q3 - q1),
    )


def sweep(records, grid, mask_rules=(), strict=False, chunk_size=1000,
          dataset_name=""):
    """Score every (sigma, phi) pair over a labeled corpus.

    Returns (best result, all results) where each result is a dict with
    sigma, phi and parsing_accuracy.  Ties go to the earliest grid entry.
    """
    from .miner import MinerConfig

    if not grid:
        raise ValueError("empty hyperparameter grid")
    lines = [r.content for r in records]
    results = []
    best = None
    for sigma, phi in grid:
        cfg = MinerConfig(sigma=sigma, phi=phi, mask_rules=list(mask_rules),
                          strict_wildcard_sim=strict)
        predicted, _, _ = run_miner(cfg, lines, chunk_size, dataset_name)
        report = grouping_accuracy(records, predicted, dataset_name)
        res = {"sigma": sigma, "phi": phi,
               "parsing_accuracy": report.parsing_accuracy}
        results.append(res)
        if best is None or res["parsing_accuracy"] > best["parsing_accuracy"]:
            best = res
    return best, results


def write_timing_csv(report, fh):
    """Per-chunk timing rows suitable for plotting cumulative speed curves."""
    writer = csv.writer(fh)
    writer.writerow(["chunk_index", "messages", "seconds",
                     "cumulative_seconds"])
    cum = 0.0
    done = 0
    for i, secs in enumerate(report.chunk_seconds):
        msgs = min(report.chunk_size, report.total_messages - done)
        done += msgs
        cum += secs
        writer.writerow([i, msgs, f"{secs:.6f}", f"{cum:.6f}"])
