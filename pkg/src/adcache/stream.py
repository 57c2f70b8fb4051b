"""Synthetic long-tail prediction streams.

Class frequencies follow a Zipf law (class 0 is the head), each class has
a unit prototype, and the simulated base model is right except on a
controlled fraction of samples whose argmax is forced to the most
confusable wrong class.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List

import numpy as np

from .core import ConfigError
from .records import PredictionRecord, RecordHeader


@dataclass(frozen=True)
class StreamSpec:
    n_objects: int = 10
    n_verbs: int = 10
    dim: int = 32
    n_samples: int = 20000
    zipf_exponent: float = 1.5
    prototype_separation: float = 5.0
    label_noise: float = 0.25
    base_model_temperature: float = 0.35
    seed: int = 0

    @property
    def n_classes(self) -> int:
        return self.n_objects * self.n_verbs

    def __post_init__(self):
        def check(ok: bool, name: str, msg: str) -> None:
            if not ok:
                raise ConfigError(f"{name}: {msg} (got {getattr(self, name)!r})")

        check(self.n_objects >= 1, "n_objects", "must be a positive integer")
        check(self.n_verbs >= 1, "n_verbs", "must be a positive integer")
        check(self.dim >= 1, "dim", "must be a positive integer")
        check(self.n_samples >= 1, "n_samples", "must be a positive integer")
        check(self.zipf_exponent > 0.0, "zipf_exponent", "must be > 0")
        check(
            self.prototype_separation > 0.0, "prototype_separation", "must be > 0"
        )
        check(0.0 <= self.label_noise < 1.0, "label_noise", "must be in [0, 1)")
        check(
            self.base_model_temperature > 0.0,
            "base_model_temperature",
            "must be > 0",
        )
        check(self.seed >= 0, "seed", "must be a non-negative integer")

    def header(self) -> RecordHeader:
        return RecordHeader(
            d=self.dim,
            n_classes=self.n_classes,
            n_objects=self.n_objects,
            n_verbs=self.n_verbs,
        )


def zipf_probabilities(n_classes: int, exponent: float) -> np.ndarray:
    ranks = np.arange(1, n_classes + 1, dtype=np.float64)
    p = ranks**-exponent
    return p / p.sum()


def generate_stream(spec: StreamSpec) -> List[PredictionRecord]:
    """Draw a deterministic synthetic stream for the given spec.

    Per-class sample counts are a multinomial Zipf draw sorted descending,
    so lower flat class indices are more frequent. Prototypes share a
    common direction plus a scaled random offset; larger separation pushes
    them toward mutual orthogonality. Features are normalized prototypes
    plus unit-scale Gaussian noise.
    """
    rng = np.random.default_rng(spec.seed)
    n_c, d = spec.n_classes, spec.dim

    counts = np.sort(rng.multinomial(spec.n_samples, zipf_probabilities(n_c, spec.zipf_exponent)))[::-1]

    anchor = rng.standard_normal(d)
    anchor /= np.linalg.norm(anchor)
    offsets = rng.standard_normal((n_c, d)) / np.sqrt(d)
    protos = anchor[None, :] + spec.prototype_separation * offsets
    protos /= np.linalg.norm(protos, axis=1, keepdims=True)

    gt = np.repeat(np.arange(n_c), counts)
    order = rng.permutation(spec.n_samples)
    gt = gt[order]

    noise = rng.standard_normal((spec.n_samples, d)) / np.sqrt(d)
    feats = protos[gt] + noise
    feats /= np.linalg.norm(feats, axis=1, keepdims=True)

    sims = feats @ protos.T
    logits = sims / spec.base_model_temperature
    noisy = rng.random(spec.n_samples) < spec.label_noise

    records: List[PredictionRecord] = []
    for i in range(spec.n_samples):
        row = logits[i].copy()
        if noisy[i]:
            # most confusable wrong class: best-scoring non-ground-truth
            masked = row.copy()
            masked[gt[i]] = -np.inf
            target = int(np.argmax(masked))
        else:
            target = int(gt[i])
        top = int(np.argmax(row))
        if top != target:
            row[top], row[target] = row[target], row[top]
        records.append(
            PredictionRecord(
                id=f"s{i:06d}",
                feature=feats[i].copy(),
                logit_base=row,
                object_pred=target // spec.n_verbs,
                gt_class=int(gt[i]),
            )
        )
    return records
