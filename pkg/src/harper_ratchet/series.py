from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("quantum", "classical", "noise-averaged")


@dataclass
class CurrentSeries:
    """Mean momentum after each kick; ``values[n - 1]`` is <p> after kick ``n``.

    ``stderr`` is only set for noise-averaged series (standard error over
    realizations).
    """

    values: np.ndarray
    kind: str
    stderr: np.ndarray | None = None

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown series kind {self.kind!r}")
        self.values = np.asarray(self.values, dtype=float)
        if self.stderr is not None:
            self.stderr = np.asarray(self.stderr, dtype=float)
            if self.stderr.shape != self.values.shape:
                raise ValueError("stderr must match values in length")

    def __len__(self):
        return len(self.values)

    @property
    def kicks(self) -> np.ndarray:
        return np.arange(1, len(self.values) + 1)
