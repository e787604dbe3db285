"""Precision/recall/F1 scoring of annotation files against gold files.

A prediction is correct iff its entity id equals the gold id for the same
key after IRI normalization; table ids compare case-sensitively, row and
column ids numerically. Exact match only; no class-hierarchy credit.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

from tabkg import submission
from tabkg.submission import TASK_CEA, TASK_CTA


@dataclass(frozen=True)
class ScoreReport:
    """Counts plus the derived precision, recall, and F1."""

    task: str
    targets: int
    submitted: int
    correct: int
    precision: float
    recall: float
    f1: float

    def to_json(self) -> dict:
        return {
            "task": self.task,
            "targets": self.targets,
            "submitted": self.submitted,
            "correct": self.correct,
            "precision": self.precision,
            "recall": self.recall,
            "f1": self.f1,
        }

    def summary(self) -> str:
        return (
            f"{self.task.upper()}: targets={self.targets} submitted={self.submitted} "
            f"correct={self.correct} precision={self.precision:.4f} "
            f"recall={self.recall:.4f} f1={self.f1:.4f}"
        )


def compute_scores(targets: int, submitted: int, correct: int) -> tuple[float, float, float]:
    """Precision, recall, F1 from raw counts with zero-denominator guards."""
    precision = correct / submitted if submitted else 0.0
    recall = correct / targets if targets else 0.0
    f1 = (
        2 * precision * recall / (precision + recall)
        if precision + recall
        else 0.0
    )
    return precision, recall, f1


def score(predictions_path: str | Path, gold_path: str | Path, task: str) -> ScoreReport:
    """Score one annotation file against one gold file."""
    if task not in (TASK_CTA, TASK_CEA):
        raise ValueError(f"task must be {TASK_CTA!r} or {TASK_CEA!r}, got {task!r}")
    predictions = submission.read_annotations(predictions_path, task)
    gold = submission.read_annotations(gold_path, task)
    correct = sum(
        1 for key, entity_id in predictions.items() if gold.get(key) == entity_id
    )
    precision, recall, f1 = compute_scores(len(gold), len(predictions), correct)
    return ScoreReport(
        task=task,
        targets=len(gold),
        submitted=len(predictions),
        correct=correct,
        precision=precision,
        recall=recall,
        f1=f1,
    )
