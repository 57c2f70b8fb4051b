"""Affinity-weighted readout of the cache and fusion with base logits.

Read-only with respect to the cache: queries gather every entry cached
under the predicted object, weight their one-hot class votes by
exponentiated feature affinity, and add the result to the base logits.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Sequence

import numpy as np

from .cache import CacheEntry, CacheState
from .core import AdcConfig, InteractionClass, flat_argmax, l2_normalize


@dataclass
class KeyValuePair:
    keys: np.ndarray  # (m, d) normalized cached features
    values: np.ndarray  # (m, n_classes) one-hot rows at each entry's pseudo-label


def gather_entries(state: CacheState, object_pred: int) -> List[CacheEntry]:
    """All cached entries whose class involves the predicted object."""
    out: List[CacheEntry] = []
    for verb in range(state.n_verbs):
        q = state.queues.get(InteractionClass(object_pred, verb))
        if q is not None:
            out.extend(q.entries)
    return out


def build_key_value(entries: Sequence[CacheEntry], n_classes: int) -> KeyValuePair:
    if not entries:
        raise ValueError("cannot build key/value matrices from an empty cache")
    keys = np.stack([e.feature for e in entries])
    values = np.zeros((len(entries), n_classes))
    for i, e in enumerate(entries):
        values[i, flat_argmax(e.logits)] = 1.0
    return KeyValuePair(keys=keys, values=values)


def affinity(f_p: np.ndarray, kv: KeyValuePair) -> np.ndarray:
    """Dot products of a normalized query against every cached key."""
    f_p = np.asarray(f_p, dtype=np.float64)
    if f_p.shape[0] != kv.keys.shape[1]:
        raise ValueError(
            f"query dimension {f_p.shape[0]} does not match key dimension {kv.keys.shape[1]}"
        )
    return kv.keys @ f_p


def cache_logits(
    a: np.ndarray, kv: KeyValuePair, alpha_fuse: float, beta: float
) -> np.ndarray:
    """Exponentially weighted sum of one-hot votes, scaled by the fusion gain."""
    w = np.exp(beta * (np.asarray(a, dtype=np.float64) - 1.0))
    return alpha_fuse * (w @ kv.values)


def fuse(logit_base: np.ndarray, logit_cache: np.ndarray) -> np.ndarray:
    logit_base = np.asarray(logit_base, dtype=np.float64)
    logit_cache = np.asarray(logit_cache, dtype=np.float64)
    if logit_base.shape != logit_cache.shape:
        raise ValueError(
            f"logit shapes differ: {logit_base.shape} vs {logit_cache.shape}"
        )
    return logit_base + logit_cache


def enhance(
    state: CacheState,
    feature: np.ndarray,
    logit_base: np.ndarray,
    object_pred: int,
    cfg: AdcConfig,
) -> np.ndarray:
    """Full read path: gather, affinity-weight, fuse.

    Returns the base logits unchanged when fusion is disabled or nothing
    relevant is cached (no borrowing across objects unless the global
    fallback toggle is on).
    """
    logit_base = np.asarray(logit_base, dtype=np.float64)
    if cfg.alpha_fuse == 0.0:
        return logit_base.copy()
    entries = gather_entries(state, object_pred)
    if not entries and cfg.global_fallback:
        entries = state.all_entries()
    if not entries:
        return logit_base.copy()
    kv = build_key_value(entries, state.n_classes)
    a = affinity(l2_normalize(feature), kv)
    return fuse(logit_base, cache_logits(a, kv, cfg.alpha_fuse, cfg.beta))
