"""Per-class occurrence counts driving capacity allocation.

Online tables count test-time pseudo-labels as they are observed; offline
tables are loaded from a user-supplied count file (e.g. known training
frequencies) and stay fixed for the whole run.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class FrequencyTable:
    counts: np.ndarray  # int64, one slot per flat class index
    total: int
    max_count: int
    source: str = "online"  # "online" | "offline"

    @classmethod
    def empty(cls, n_classes: int, source: str = "online") -> "FrequencyTable":
        return cls(np.zeros(n_classes, dtype=np.int64), 0, 0, source)

    @classmethod
    def from_counts(cls, counts, source: str = "offline") -> "FrequencyTable":
        arr = np.asarray(counts, dtype=np.int64)
        if np.any(arr < 0):
            raise ValueError("frequency counts must be non-negative")
        return cls(arr, int(arr.sum()), int(arr.max()) if arr.size else 0, source)

    def observe(self, class_index: int) -> None:
        self.counts[class_index] += 1
        self.total += 1
        if self.counts[class_index] > self.max_count:
            self.max_count = int(self.counts[class_index])


def observe(freq: FrequencyTable, class_index: int) -> FrequencyTable:
    freq.observe(class_index)
    return freq


def load_frequency_file(path, n_classes: int) -> FrequencyTable:
    """Read whitespace-separated ``flat_class_index count`` pairs."""
    counts = np.zeros(n_classes, dtype=np.int64)
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.strip()
            if not line:
                continue
            parts = line.split()
            if len(parts) != 2:
                raise ValueError(f"line {lineno}: expected 'class_index count'")
            try:
                idx, count = int(parts[0]), int(parts[1])
            except ValueError:
                raise ValueError(f"line {lineno}: non-integer field") from None
            if not 0 <= idx < n_classes:
                raise ValueError(f"line {lineno}: class index {idx} out of range")
            if count < 0:
                raise ValueError(f"line {lineno}: negative count")
            counts[idx] = count
    return FrequencyTable.from_counts(counts, source="offline")
