"""Ranking metrics and the evaluation report.

Average precision here is the classification analogue: records are ranked
per class by their final logit for that class and precision is averaged
over the positive ranks. No boxes, no IoU matching.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np

from .core import AdcConfig
from .frequency import FrequencyTable
from .records import PredictionRecord


class EvaluationUnavailableError(ValueError):
    """No record carries a ground-truth class, so nothing can be scored."""


@dataclass
class EvalReport:
    map_full: float
    map_rare: Optional[float]
    map_nonrare: Optional[float]
    per_class_ap: np.ndarray  # NaN for classes with no ground-truth instance
    rare_mask: np.ndarray
    class_counts: np.ndarray
    quality_trace: List[Tuple[int, float]] = field(default_factory=list)
    runtime_ms: float = 0.0

    def to_dict(self) -> dict:
        """Canonical JSON payload. Excludes runtime so that runs with the
        same seed serialize byte-identically."""
        return {
            "map_full": self.map_full,
            "map_rare": self.map_rare,
            "map_nonrare": self.map_nonrare,
            "per_class_ap": [
                None if np.isnan(v) else float(v) for v in self.per_class_ap
            ],
            "rare_mask": [bool(v) for v in self.rare_mask],
            "class_counts": [int(v) for v in self.class_counts],
            "quality_trace": [[int(s), float(v)] for s, v in self.quality_trace],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1) + "\n"


def average_precision(scores: np.ndarray, positives: np.ndarray) -> float:
    """Mean precision at the ranks of the positives (ranked by score desc,
    ties by original index)."""
    scores = np.asarray(scores, dtype=np.float64)
    positives = np.asarray(positives, dtype=bool)
    if not positives.any():
        raise ValueError("average precision needs at least one positive")
    order = np.argsort(-scores, kind="stable")
    hits = positives[order]
    cum_hits = np.cumsum(hits)
    ranks = np.arange(1, scores.shape[0] + 1)
    return float((cum_hits[hits] / ranks[hits]).mean())


def _quartile_rare_mask(counts: np.ndarray) -> np.ndarray:
    """Bottom frequency quartile of the observed classes (ties included)."""
    observed = counts > 0
    obs_counts = np.sort(counts[observed])
    k = max(1, obs_counts.size // 4)
    threshold = obs_counts[k - 1]
    return observed & (counts <= threshold)


def build_report(
    final_logits: Sequence[np.ndarray],
    records: Sequence[PredictionRecord],
    freq: Optional[FrequencyTable],
    cfg: AdcConfig,
    quality_trace: Sequence[Tuple[int, float]] = (),
    runtime_ms: float = 0.0,
) -> EvalReport:
    """Score final logits against ground truth, split rare vs non-rare.

    With an offline frequency table the rare set is every class whose
    supplied count is below ``cfg.rare_threshold``; otherwise it is the
    bottom quartile of the observed ground-truth counts, which keeps the
    split meaningful at any synthetic stream size.
    """
    eval_idx = [i for i, r in enumerate(records) if r.gt_class is not None]
    if not eval_idx:
        raise EvaluationUnavailableError("no record carries gt_class")
    gt = np.array([records[i].gt_class for i in eval_idx])
    scores = np.stack([np.asarray(final_logits[i], dtype=np.float64) for i in eval_idx])
    n_classes = scores.shape[1]

    gt_counts = np.bincount(gt, minlength=n_classes)
    per_class_ap = np.full(n_classes, np.nan)
    for c in range(n_classes):
        pos = gt == c
        if pos.any():
            per_class_ap[c] = average_precision(scores[:, c], pos)

    observed = gt_counts > 0
    map_full = float(per_class_ap[observed].mean())

    if freq is not None and freq.source == "offline":
        rare_mask = freq.counts < cfg.rare_threshold
    else:
        rare_mask = _quartile_rare_mask(gt_counts)

    def masked_mean(mask: np.ndarray) -> Optional[float]:
        sel = mask & observed
        return float(per_class_ap[sel].mean()) if sel.any() else None

    return EvalReport(
        map_full=map_full,
        map_rare=masked_mean(rare_mask),
        map_nonrare=masked_mean(~rare_mask),
        per_class_ap=per_class_ap,
        rare_mask=rare_mask.astype(bool),
        class_counts=gt_counts,
        quality_trace=list(quality_trace),
        runtime_ms=runtime_ms,
    )


def write_report(report: EvalReport, out_dir, prefix: str = "report") -> None:
    """Write <prefix>.json plus the per-class and quality-trace CSVs."""
    from pathlib import Path

    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    (out / f"{prefix}.json").write_text(report.to_json(), encoding="utf-8")
    with open(out / f"{prefix}_per_class.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["class_index", "count", "ap", "is_rare"])
        for c in range(report.per_class_ap.shape[0]):
            ap = report.per_class_ap[c]
            writer.writerow(
                [
                    c,
                    int(report.class_counts[c]),
                    "" if np.isnan(ap) else f"{ap!r}",
                    int(report.rare_mask[c]),
                ]
            )
    with open(out / f"{prefix}_quality_trace.csv", "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["step", "mean_joint_score"])
        for step, value in report.quality_trace:
            writer.writerow([step, f"{value!r}"])
