"""Joint confidence/diversity cache update.

Every incoming sample is pseudo-labeled, merged with its class queue into
a temporary set, all members are rescored (diversity depends on the whole
set), and the best ones up to the class's current capacity are retained.
"""

from __future__ import annotations

import numpy as np

from .allocation import capacity
from .cache import CacheState, ClassQueue, make_entry, rank_entries, score_entries
from .core import AdcConfig, InteractionClass, pseudo_label


def update_cache(
    state: CacheState, feature: np.ndarray, logits: np.ndarray, cfg: AdcConfig
) -> InteractionClass:
    """Insert one sample into its pseudo-labeled queue; returns the label.

    Mutates ``state`` in place (single writer at a time). The class's
    frequency count is bumped first, so the retention capacity reflects
    this observation.
    """
    feature = np.asarray(feature, dtype=np.float64)
    logits = np.asarray(logits, dtype=np.float64)
    if state.dim is None:
        state.dim = feature.shape[0]
    elif feature.shape[0] != state.dim:
        raise ValueError(
            f"feature dimension {feature.shape[0]} does not match cache dimension {state.dim}"
        )
    if logits.shape[0] != state.n_classes:
        raise ValueError(
            f"logit length {logits.shape[0]} does not match class count {state.n_classes}"
        )

    label = pseudo_label(logits, state.n_verbs)
    entry = make_entry(feature, logits, seq=state.global_seq)
    state.global_seq += 1

    queue = state.queues.get(label)
    if queue is None:
        queue = ClassQueue(cls=label, capacity=cfg.k_base)
        state.queues[label] = queue

    temp = queue.entries + [entry]
    flat = label.flat(state.n_verbs)
    state.freq.observe(flat)
    k_final = capacity(flat, state.capacity_freq, cfg)

    _, _, joint = score_entries(temp, cfg)
    for e, score in zip(temp, joint):
        e.joint_score = float(score)
    queue.entries = rank_entries(temp)[:k_final]
    queue.capacity = k_final
    return label
