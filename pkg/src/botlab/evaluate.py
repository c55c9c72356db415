"""Label-quality metrics against a ground truth file.

The spambot class is the positive class everywhere. Accounts labeled
"unlabeled" are excluded from the confusion counts; labeled_count reports
how many accounts actually entered them.
"""
from __future__ import annotations

import csv
import os
from dataclasses import dataclass

from .errors import FileMissing, IdMismatch, MalformedCsv


@dataclass(frozen=True)
class EvalReport:
    precision: float
    recall: float
    f1: float
    accuracy: float
    tp: int
    fp: int
    fn: int
    tn: int
    labeled_count: int

    def to_json(self) -> dict:
        return {
            "precision": self.precision, "recall": self.recall, "f1": self.f1,
            "accuracy": self.accuracy, "tp": self.tp, "fp": self.fp,
            "fn": self.fn, "tn": self.tn, "labeled_count": self.labeled_count,
        }


def _read_label_csv(path: str, allow_unlabeled: bool) -> dict[str, str]:
    if not os.path.isfile(path):
        raise FileMissing(path)
    out: dict[str, str] = {}
    with open(path, newline="", encoding="utf-8") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if not header or header[:2] != ["account_id", "label"]:
            raise MalformedCsv(f"{path}: expected header account_id,label[,...]")
        valid = {"genuine", "spambot"} | ({"unlabeled"} if allow_unlabeled else set())
        for row in reader:
            if not row:
                continue
            if len(row) < 2:
                raise MalformedCsv(f"{path}: short row {row}")
            aid, label = row[0], row[1]
            if label not in valid:
                raise MalformedCsv(f"{path}: unknown label {label!r} for {aid}")
            if aid in out:
                raise MalformedCsv(f"{path}: duplicate account {aid}")
            out[aid] = label
    return out


def evaluate(labels_path: str, truth_path: str) -> EvalReport:
    labels = _read_label_csv(labels_path, allow_unlabeled=True)
    truth = _read_label_csv(truth_path, allow_unlabeled=False)
    missing = sorted(set(labels) - set(truth))
    if missing:
        raise IdMismatch(f"labeled accounts missing from truth: {missing[:5]}")

    tp = fp = fn = tn = 0
    for aid, label in labels.items():
        if label == "unlabeled":
            continue
        actual = truth[aid]
        if label == "spambot":
            if actual == "spambot":
                tp += 1
            else:
                fp += 1
        else:
            if actual == "spambot":
                fn += 1
            else:
                tn += 1

    labeled = tp + fp + fn + tn
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    accuracy = (tp + tn) / labeled if labeled else 0.0
    return EvalReport(
        precision=precision, recall=recall, f1=f1, accuracy=accuracy,
        tp=tp, fp=fp, fn=fn, tn=tn, labeled_count=labeled,
    )
