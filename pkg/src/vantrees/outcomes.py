from __future__ import annotations

from dataclasses import dataclass

import numpy as np

PROB_SUM_TOL = 1e-10
DPROB_SUM_TOL = 1e-8


@dataclass(frozen=True)
class OutcomeDistribution:
    """Outcome probabilities p(xi|theta) and their theta-derivatives."""

    probs: np.ndarray
    dprobs: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=float)
        dprobs = np.asarray(self.dprobs, dtype=float)
        if probs.shape != dprobs.shape or probs.ndim != 1:
            raise ValueError("probs and dprobs must be 1-d arrays of equal length")
        if np.any(probs < 0):
            raise ValueError("negative probability")
        if abs(probs.sum() - 1) > PROB_SUM_TOL:
            raise ValueError(f"probabilities sum to {probs.sum()!r}")
        if abs(dprobs.sum()) > DPROB_SUM_TOL:
            raise ValueError(f"derivatives sum to {dprobs.sum()!r}")
        object.__setattr__(self, "probs", probs)
        object.__setattr__(self, "dprobs", dprobs)

    def __len__(self):
        return self.probs.size
