"""Line-delimited JSON ingestion and dump of prediction records.

The first line is a header declaring the geometry; every following line
is one record. Floats are serialized at full precision so a save/load
round trip is exact.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import List, Optional, Sequence, Tuple

import numpy as np


class RecordFormatError(ValueError):
    """Malformed record file; message carries the offending line number."""


@dataclass(frozen=True)
class RecordHeader:
    d: int
    n_classes: int
    n_objects: int
    n_verbs: int

    def __post_init__(self):
        if self.n_objects * self.n_verbs != self.n_classes:
            raise RecordFormatError(
                "header: n_classes must equal n_objects * n_verbs"
            )
        if min(self.d, self.n_classes, self.n_objects, self.n_verbs) < 1:
            raise RecordFormatError("header: all geometry fields must be positive")


@dataclass
class PredictionRecord:
    id: str
    feature: np.ndarray
    logit_base: np.ndarray
    object_pred: int
    gt_class: Optional[int] = None


def save_records(path, header: RecordHeader, records: Sequence[PredictionRecord]) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(
            json.dumps(
                {
                    "d": header.d,
                    "n_classes": header.n_classes,
                    "n_objects": header.n_objects,
                    "n_verbs": header.n_verbs,
                }
            )
            + "\n"
        )
        for rec in records:
            obj = {
                "id": rec.id,
                "feature": rec.feature.tolist(),
                "logit_base": rec.logit_base.tolist(),
                "object_pred": rec.object_pred,
            }
            if rec.gt_class is not None:
                obj["gt_class"] = rec.gt_class
            fh.write(json.dumps(obj) + "\n")


def load_records(path) -> Tuple[Optional[RecordHeader], List[PredictionRecord]]:
    """Parse a record file; raises RecordFormatError naming the bad line.

    An empty file yields ``(None, [])``.
    """
    records: List[PredictionRecord] = []
    header: Optional[RecordHeader] = None
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise RecordFormatError(f"line {lineno}: invalid JSON ({exc.msg})") from None
            if header is None:
                try:
                    header = RecordHeader(
                        d=int(obj["d"]),
                        n_classes=int(obj["n_classes"]),
                        n_objects=int(obj["n_objects"]),
                        n_verbs=int(obj["n_verbs"]),
                    )
                except KeyError as exc:
                    raise RecordFormatError(
                        f"line {lineno}: header missing field {exc.args[0]!r}"
                    ) from None
                continue
            records.append(_parse_record(obj, header, lineno))
    return header, records


def _parse_record(obj: dict, header: RecordHeader, lineno: int) -> PredictionRecord:
    try:
        feature = np.asarray(obj["feature"], dtype=np.float64)
        logit_base = np.asarray(obj["logit_base"], dtype=np.float64)
        rec_id = str(obj["id"])
        object_pred = int(obj["object_pred"])
    except KeyError as exc:
        raise RecordFormatError(
            f"line {lineno}: missing field {exc.args[0]!r}"
        ) from None
    except (TypeError, ValueError):
        raise RecordFormatError(f"line {lineno}: malformed field value") from None
    if feature.ndim != 1 or feature.shape[0] != header.d:
        raise RecordFormatError(
            f"line {lineno}: feature length {feature.shape} does not match header d={header.d}"
        )
    if logit_base.ndim != 1 or logit_base.shape[0] != header.n_classes:
        raise RecordFormatError(
            f"line {lineno}: logit length does not match header n_classes={header.n_classes}"
        )
    if not 0 <= object_pred < header.n_objects:
        raise RecordFormatError(f"line {lineno}: object_pred out of range")
    gt_class = obj.get("gt_class")
    if gt_class is not None:
        gt_class = int(gt_class)
        if not 0 <= gt_class < header.n_classes:
            raise RecordFormatError(f"line {lineno}: gt_class out of range")
    return PredictionRecord(
        id=rec_id,
        feature=feature,
        logit_base=logit_base,
        object_pred=object_pred,
        gt_class=gt_class,
    )
