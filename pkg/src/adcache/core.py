"""Numeric primitives and configuration shared by every other module.

Features and logits are plain 1-D float64 numpy arrays. An interaction
class is an (object_id, verb_id) pair; its flat index is
``object_id * n_verbs + verb_id``.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field, fields
from typing import NamedTuple, Optional

import numpy as np

DEGENERATE_NORM = 1e-12

AUGMENT_OPS = (
    "coordinate_dropout",
    "subspace_rotation",
    "coordinate_scale",
    "coordinate_shift",
    "gaussian_jitter",
)


class ConfigError(ValueError):
    """Invalid configuration value; message names the offending field."""


class InteractionClass(NamedTuple):
    object_id: int
    verb_id: int

    def flat(self, n_verbs: int) -> int:
        return self.object_id * n_verbs + self.verb_id

    @classmethod
    def from_flat(cls, index: int, n_verbs: int) -> "InteractionClass":
        return cls(index // n_verbs, index % n_verbs)


def softmax(logits: np.ndarray) -> np.ndarray:
    """Exp-normalize logits, stabilized by subtracting the maximum."""
    z = np.asarray(logits, dtype=np.float64)
    e = np.exp(z - z.max())
    return e / e.sum()


def entropy(p: np.ndarray) -> float:
    """Shannon entropy in nats, with 0*ln(0) taken as 0."""
    p = np.asarray(p, dtype=np.float64)
    nz = p > 0.0
    return float(-(p[nz] * np.log(p[nz])).sum())


def l2_normalize(f: np.ndarray) -> np.ndarray:
    """Scale to unit L2 norm; near-zero vectors pass through with a warning."""
    f = np.asarray(f, dtype=np.float64)
    norm = float(np.linalg.norm(f))
    if norm < DEGENERATE_NORM:
        warnings.warn("degenerate feature with near-zero norm left unnormalized")
        return f.copy()
    return f / norm


def flat_argmax(logits: np.ndarray) -> int:
    """Index of the largest logit; ties go to the lowest index."""
    return int(np.argmax(logits))


def pseudo_label(logits: np.ndarray, n_verbs: int) -> InteractionClass:
    """Class whose flat index is the argmax of the logits."""
    return InteractionClass.from_flat(flat_argmax(logits), n_verbs)


def derive_rng(seed: int, *key: int) -> np.random.Generator:
    """Deterministic child generator of a root seed, keyed by position."""
    return np.random.default_rng(np.random.SeedSequence(seed, spawn_key=key))


@dataclass(frozen=True)
class AdcConfig:
    """All knobs of the adaptive cache.

    ``k_min``/``k_max`` default to ``k_base // 2`` and ``2 * k_base`` so a
    capacity sweep scales the whole clip window; at the default
    ``k_base = 6`` this resolves to the stock bounds (3, 12).
    """

    tau: float = 0.5
    bandwidth: float = 1.0
    alpha_alloc: float = 0.5
    gamma_smooth: float = 1.0
    lambda_mod: float = 1.0
    k_base: int = 6
    k_min: Optional[int] = None
    k_max: Optional[int] = None
    alpha_fuse: float = 3.0
    beta: float = 5.0
    aug_count: int = 64
    aug_keep_fraction: float = 0.1
    severity: float = 1.0
    rare_threshold: int = 10
    seed: int = 0
    # behaviour toggles
    diversity_excludes_self_in_denominator: bool = False
    use_diversity: bool = True
    use_adaptive_capacity: bool = True
    use_augment_completion: bool = True
    update_with_enhanced: bool = True
    global_fallback: bool = False
    completion_interval: int = 1000
    snapshot_batch: int = 1

    def __post_init__(self):
        if self.k_min is None:
            object.__setattr__(self, "k_min", max(1, self.k_base // 2))
        if self.k_max is None:
            object.__setattr__(self, "k_max", 2 * self.k_base)
        self.validate()

    def validate(self) -> None:
        def check(ok: bool, name: str, msg: str) -> None:
            if not ok:
                raise ConfigError(f"{name}: {msg} (got {getattr(self, name)!r})")

        check(0.0 <= self.tau <= 1.0, "tau", "must be in [0, 1]")
        check(self.bandwidth > 0.0, "bandwidth", "must be > 0")
        check(0.0 < self.alpha_alloc <= 1.0, "alpha_alloc", "must be in (0, 1]")
        check(self.gamma_smooth > 0.0, "gamma_smooth", "must be > 0")
        check(self.lambda_mod >= 0.0, "lambda_mod", "must be >= 0")
        check(self.k_base >= 1, "k_base", "must be a positive integer")
        check(self.k_min >= 1, "k_min", "must be a positive integer")
        check(self.k_min <= self.k_max, "k_max", "must satisfy k_min <= k_max")
        check(self.alpha_fuse >= 0.0, "alpha_fuse", "must be >= 0")
        check(self.beta > 0.0, "beta", "must be > 0")
        check(self.aug_count >= 1, "aug_count", "must be a positive integer")
        check(
            0.0 < self.aug_keep_fraction <= 1.0,
            "aug_keep_fraction",
            "must be in (0, 1]",
        )
        check(self.severity >= 0.0, "severity", "must be >= 0")
        check(self.rare_threshold >= 1, "rare_threshold", "must be a positive integer")
        check(self.seed >= 0, "seed", "must be a non-negative integer")
        check(self.completion_interval >= 1, "completion_interval", "must be >= 1")
        check(self.snapshot_batch >= 1, "snapshot_batch", "must be >= 1")

    @classmethod
    def field_names(cls) -> tuple:
        return tuple(f.name for f in fields(cls))
