"""Cache containers and the confidence/diversity scoring of their entries.

Each interaction class owns a bounded queue of entries ranked by a joint
score: a locality-weighted dissimilarity term (how much a feature adds to
the spread of its queue) blended with an entropy-based certainty term.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from .core import AdcConfig, InteractionClass, entropy, l2_normalize, softmax
from .frequency import FrequencyTable


@dataclass
class CacheEntry:
    feature: np.ndarray  # stored L2-normalized
    logits: np.ndarray
    probs: np.ndarray
    entropy: float
    joint_score: float
    seq: int
    augmented: bool = False


@dataclass
class ClassQueue:
    cls: InteractionClass
    entries: List[CacheEntry] = field(default_factory=list)
    capacity: int = 0


@dataclass
class CacheState:
    n_objects: int
    n_verbs: int
    queues: Dict[InteractionClass, ClassQueue] = field(default_factory=dict)
    freq: FrequencyTable = None
    offline_freq: Optional[FrequencyTable] = None
    global_seq: int = 0
    dim: Optional[int] = None

    @property
    def n_classes(self) -> int:
        return self.n_objects * self.n_verbs

    @property
    def capacity_freq(self) -> FrequencyTable:
        """Table that drives capacity allocation: offline counts if supplied."""
        return self.offline_freq if self.offline_freq is not None else self.freq

    @classmethod
    def empty(
        cls,
        n_objects: int,
        n_verbs: int,
        offline_freq: Optional[FrequencyTable] = None,
    ) -> "CacheState":
        return cls(
            n_objects=n_objects,
            n_verbs=n_verbs,
            freq=FrequencyTable.empty(n_objects * n_verbs),
            offline_freq=offline_freq,
        )

    def all_entries(self) -> List[CacheEntry]:
        out: List[CacheEntry] = []
        for flat in sorted(q.cls.flat(self.n_verbs) for q in self.queues.values()):
            out.extend(self.queues[InteractionClass.from_flat(flat, self.n_verbs)].entries)
        return out

    def mean_joint_score(self) -> float:
        total, count = 0.0, 0
        for q in self.queues.values():
            for e in q.entries:
                total += e.joint_score
                count += 1
        return total / count if count else 0.0


def make_entry(feature: np.ndarray, logits: np.ndarray, seq: int) -> CacheEntry:
    """Build an entry: normalize the feature, cache softmax probs and entropy."""
    feature = np.asarray(feature, dtype=np.float64)
    logits = np.asarray(logits, dtype=np.float64)
    if not np.all(np.isfinite(feature)):
        raise ValueError("feature contains non-finite values")
    if not np.all(np.isfinite(logits)):
        raise ValueError("logits contain non-finite values")
    probs = softmax(logits)
    return CacheEntry(
        feature=l2_normalize(feature),
        logits=logits.copy(),
        probs=probs,
        entropy=entropy(probs),
        joint_score=0.0,
        seq=seq,
    )


def diversity_score(
    k: int,
    temp: Sequence[CacheEntry],
    bandwidth: float,
    exclude_self_in_denominator: bool = False,
) -> float:
    """Spread contribution of entry ``k`` within the temporary set.

    Mean over the other entries of cosine dissimilarity damped by a
    Gaussian kernel on squared Euclidean distance. The mean divides by the
    full set size unless the denominator toggle excludes the entry itself.
    """
    return float(
        _diversity_all(
            np.stack([e.feature for e in temp]), bandwidth, exclude_self_in_denominator
        )[k]
    )


def confidence_score(k: int, temp: Sequence[CacheEntry]) -> float:
    """1 minus the entry's entropy relative to the set maximum (1 if all zero)."""
    ent = np.array([e.entropy for e in temp])
    return float(_confidence_all(ent)[k])


def joint_score(s_div: float, s_conf: float, tau: float) -> float:
    return tau * s_div + (1.0 - tau) * s_conf


def _diversity_all(
    features: np.ndarray, bandwidth: float, exclude_self_in_denominator: bool = False
) -> np.ndarray:
    m = features.shape[0]
    if m == 1:
        return np.zeros(1)
    gram = features @ features.T
    norms = np.sqrt(np.diag(gram))
    cos = gram / np.outer(norms, norms)
    sq_dist = np.maximum(norms[:, None] ** 2 + norms[None, :] ** 2 - 2.0 * gram, 0.0)
    weights = (1.0 - cos) * np.exp(-bandwidth * sq_dist)
    np.fill_diagonal(weights, 0.0)
    denom = m - 1 if exclude_self_in_denominator else m
    return weights.sum(axis=1) / denom


def _confidence_all(entropies: np.ndarray) -> np.ndarray:
    h_max = entropies.max()
    if h_max <= 0.0:
        return np.ones_like(entropies)
    return 1.0 - entropies / h_max


def score_entries(
    temp: Sequence[CacheEntry], cfg: AdcConfig
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Diversity, confidence, and joint scores for every entry of ``temp``."""
    if cfg.use_diversity:
        div = _diversity_all(
            np.stack([e.feature for e in temp]),
            cfg.bandwidth,
            cfg.diversity_excludes_self_in_denominator,
        )
    else:
        div = np.zeros(len(temp))
    conf = _confidence_all(np.array([e.entropy for e in temp]))
    joint = cfg.tau * div + (1.0 - cfg.tau) * conf
    return div, conf, joint


def rank_entries(temp: Sequence[CacheEntry]) -> List[CacheEntry]:
    """Sort by joint score descending, ties broken newest-first."""
    return sorted(temp, key=lambda e: (-e.joint_score, -e.seq))


def export_snapshot(state: CacheState, path) -> int:
    """Write one JSON line per cached entry; returns the number written.

    Fields: flat class index, joint score, insertion sequence, augmented
    flag, and the stored feature coordinates. Intended for external
    embedding/cluster visualisation of cache contents.
    """
    n = 0
    with open(path, "w", encoding="utf-8") as fh:
        for flat in sorted(q.cls.flat(state.n_verbs) for q in state.queues.values()):
            q = state.queues[InteractionClass.from_flat(flat, state.n_verbs)]
            for e in q.entries:
                fh.write(
                    json.dumps(
                        {
                            "class": flat,
                            "joint_score": e.joint_score,
                            "seq": e.seq,
                            "augmented": e.augmented,
                            "feature": e.feature.tolist(),
                        }
                    )
                    + "\n"
                )
                n += 1
    return n
