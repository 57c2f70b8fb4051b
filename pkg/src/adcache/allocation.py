"""Frequency-aware capacity allocation and augmentation-based completion.

Rare classes get larger queue capacities through an inverse-frequency
scaling law; queues that cannot fill their allocation from the stream are
topped up with perturbed copies of their own entries.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import List

import numpy as np

from .cache import CacheEntry, CacheState, ClassQueue, rank_entries, score_entries
from .core import AUGMENT_OPS, AdcConfig, InteractionClass
from .frequency import FrequencyTable


def scaling_factor(n_c: int, freq: FrequencyTable, cfg: AdcConfig) -> float:
    """Inverse-frequency capacity multiplier for a class seen ``n_c`` times."""
    if freq.total == 0:
        return 1.0
    ratio = (freq.max_count + cfg.gamma_smooth) / (n_c + cfg.gamma_smooth)
    return ratio**cfg.alpha_alloc * math.exp(-cfg.lambda_mod * n_c / freq.total)


def capacity(class_index: int, freq: FrequencyTable, cfg: AdcConfig) -> int:
    """Queue capacity for a class: scaled base size, floored and clipped."""
    if not cfg.use_adaptive_capacity:
        return cfg.k_base
    scaled = math.floor(cfg.k_base * scaling_factor(int(freq.counts[class_index]), freq, cfg))
    return int(min(max(scaled, cfg.k_min), cfg.k_max))


@dataclass(frozen=True)
class AugmentSpec:
    op: str  # one of AUGMENT_OPS
    severity: float
    rng_seed: int


def augment_feature(f: np.ndarray, spec: AugmentSpec) -> np.ndarray:
    """Apply one severity-scaled stochastic perturbation; renormalize.

    Severity zero is the exact identity for every op. Output is
    deterministic given ``spec.rng_seed``.
    """
    f = np.asarray(f, dtype=np.float64)
    if spec.severity == 0.0:
        return f.copy()
    rng = np.random.default_rng(spec.rng_seed)
    d = f.shape[0]
    out = f.copy()
    if spec.op == "coordinate_dropout":
        n_drop = min(d, math.ceil(0.1 * spec.severity * d))
        out[rng.choice(d, size=n_drop, replace=False)] = 0.0
    elif spec.op == "subspace_rotation":
        angle = spec.severity * math.pi / 12.0
        if d >= 2:
            i, j = rng.choice(d, size=2, replace=False)
            c, s = math.cos(angle), math.sin(angle)
            out[i], out[j] = c * f[i] - s * f[j], s * f[i] + c * f[j]
    elif spec.op == "coordinate_scale":
        out *= rng.uniform(1.0 - 0.1 * spec.severity, 1.0 + 0.1 * spec.severity, size=d)
    elif spec.op == "coordinate_shift":
        direction = rng.standard_normal(d)
        norm = np.linalg.norm(direction)
        if norm > 0.0:
            out += 0.05 * spec.severity * np.linalg.norm(f) * direction / norm
    elif spec.op == "gaussian_jitter":
        out += rng.normal(0.0, 0.05 * spec.severity, size=d)
    else:
        raise ValueError(f"unknown augmentation op {spec.op!r}")
    norm = np.linalg.norm(out)
    if norm < 1e-12:
        return f.copy()
    return out / norm


def _proxy_entropies(variants: np.ndarray, queue_features: np.ndarray, beta: float) -> np.ndarray:
    """Entropy of a softmax over each variant's similarities to the queue.

    Augmented features carry no model prediction of their own, so the
    self-entropy filter ranks variants by how decisively they sit relative
    to the cached features instead.
    """
    sims = variants @ queue_features.T
    z = beta * sims
    z -= z.max(axis=1, keepdims=True)
    p = np.exp(z)
    p /= p.sum(axis=1, keepdims=True)
    with np.errstate(divide="ignore", invalid="ignore"):
        terms = np.where(p > 0.0, p * np.log(p), 0.0)
    return -terms.sum(axis=1)


def complete_queue(
    q: ClassQueue,
    k_final: int,
    cfg: AdcConfig,
    rng: np.random.Generator,
    seq_start: int = 0,
) -> ClassQueue:
    """Fill a queue up to ``k_final`` with augmented copies of its entries.

    For every existing entry, ``cfg.aug_count`` perturbed variants are
    generated, the lowest-entropy fraction survives, and the survivors with
    the best joint scores against the current queue are appended (flagged
    augmented). Existing entries are never mutated or removed.
    """
    delta = k_final - len(q.entries)
    if delta <= 0:
        return q
    if not q.entries:
        warnings.warn("cannot complete an empty queue; skipping")
        return q
    n_keep = math.floor(cfg.aug_keep_fraction * cfg.aug_count)
    if n_keep == 0:
        return q

    queue_features = np.stack([e.feature for e in q.entries])
    kept_features: List[np.ndarray] = []
    kept_sources: List[CacheEntry] = []
    for src in q.entries:
        ops = rng.integers(0, len(AUGMENT_OPS), size=cfg.aug_count)
        seeds = rng.integers(0, 2**63, size=cfg.aug_count)
        variants = np.stack(
            [
                augment_feature(
                    src.feature, AugmentSpec(AUGMENT_OPS[ops[i]], cfg.severity, int(seeds[i]))
                )
                for i in range(cfg.aug_count)
            ]
        )
        order = np.argsort(
            _proxy_entropies(variants, queue_features, cfg.beta), kind="stable"
        )
        for i in order[:n_keep]:
            kept_features.append(variants[i])
            kept_sources.append(src)

    # score every survivor against the current queue (variants inherit the
    # prediction of their source entry)
    scored: List[CacheEntry] = []
    for feat, src in zip(kept_features, kept_sources):
        candidate = CacheEntry(
            feature=feat,
            logits=src.logits,
            probs=src.probs,
            entropy=src.entropy,
            joint_score=0.0,
            seq=0,
            augmented=True,
        )
        _, _, joint = score_entries(q.entries + [candidate], cfg)
        candidate.joint_score = float(joint[-1])
        scored.append(candidate)

    scored.sort(key=lambda e: -e.joint_score)  # stable: ties keep generation order
    for offset, winner in enumerate(scored[:delta]):
        winner.seq = seq_start + offset
        q.entries.append(winner)
    q.entries = rank_entries(q.entries)
    q.capacity = k_final
    return q


def complete_all(state: CacheState, cfg: AdcConfig, rng: np.random.Generator) -> None:
    """Run completion over every queue, in flat-class order."""
    if not cfg.use_augment_completion:
        return
    freq = state.capacity_freq
    for flat in sorted(q.cls.flat(state.n_verbs) for q in state.queues.values()):
        q = state.queues[InteractionClass.from_flat(flat, state.n_verbs)]
        k_final = capacity(flat, freq, cfg)
        before = len(q.entries)
        complete_queue(q, k_final, cfg, rng, seq_start=state.global_seq)
        state.global_seq += len(q.entries) - before
