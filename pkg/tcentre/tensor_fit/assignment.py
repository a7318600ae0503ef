"""
Peak Assignment
===============
Optimal one-to-one matching of observed resonances to predicted lines.

Minimises the total |Δf| with scipy's linear_sum_assignment. Exact ties go to the lower
predicted frequency. Observations left over (more observations than allowed lines) are
flagged, not treated as failures.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.optimize import linear_sum_assignment

from tcentre.spectra import TransitionList

logger = logging.getLogger(__name__)

# Per-rank tie-break penalty (MHz); far below any physical residual
TIE_BREAK_MHZ = 1e-12
# Cost standing in for a forbidden pairing
FORBIDDEN_COST = 1e9


@dataclass
class Assignment:
    """Result of matching observations to predictions"""
    predicted_index: np.ndarray                 # per observation, index into the sorted predictions or -1
    cost: float                                 # Σ|Δf| over matched observations (MHz)
    unmatched_observations: List[int] = field(default_factory=list)
    unmatched_predictions: List[int] = field(default_factory=list)

    @property
    def pairs(self) -> List[Tuple[int, int]]:
        return [(i, int(j)) for i, j in enumerate(self.predicted_index) if j >= 0]

    @property
    def complete(self) -> bool:
        return not self.unmatched_observations


def _as_frequencies(predicted: Union[TransitionList, Sequence[float]]) -> np.ndarray:
    if isinstance(predicted, TransitionList):
        return predicted.frequencies
    return np.asarray(predicted, dtype=float).reshape(-1)


def pair_mask(predicted: TransitionList, pairs: Sequence[Optional[Tuple[int, int]]]) -> np.ndarray:
    """Allowed (observation, prediction) entries from per-observation (lower, upper) hints"""
    lines = predicted.lines
    mask = np.ones((len(pairs), len(lines)), dtype=bool)
    for i, pair in enumerate(pairs):
        if pair is not None:
            mask[i] = [(ln.lower, ln.upper) == tuple(pair) for ln in lines]
    return mask


def assign_peaks(predicted: Union[TransitionList, Sequence[float]],
                 observed: Sequence[float],
                 allowed: Optional[np.ndarray] = None) -> Assignment:
    """
    Match observed frequencies to predicted lines

    Args:
        predicted: TransitionList or frequencies, ascending
        observed: observed frequencies (MHz), any order
        allowed: optional (n_obs, n_pred) boolean mask of permitted pairings

    Returns:
        Assignment with a prediction index per observation (-1 if unmatched)
    """
    pred = _as_frequencies(predicted)
    obs = np.asarray(observed, dtype=float).reshape(-1)
    n_obs, n_pred = obs.size, pred.size

    if n_obs == 0 or n_pred == 0:
        return Assignment(np.full(n_obs, -1, dtype=int), 0.0, list(range(n_obs)), list(range(n_pred)))

    distance = np.abs(obs[:, None] - pred[None, :])
    cost = distance + TIE_BREAK_MHZ * np.arange(n_pred)[None, :]
    if allowed is not None:
        cost = np.where(allowed, cost, FORBIDDEN_COST + distance)

    rows, cols = linear_sum_assignment(cost)

    index = np.full(n_obs, -1, dtype=int)
    for r, c in zip(rows, cols):
        if allowed is None or allowed[r, c]:
            index[r] = c

    matched = index >= 0
    total = float(np.sum(distance[np.nonzero(matched)[0], index[matched]]))
    used = set(index[matched].tolist())
    return Assignment(
        predicted_index=index,
        cost=total,
        unmatched_observations=[int(i) for i in np.nonzero(~matched)[0]],
        unmatched_predictions=[j for j in range(n_pred) if j not in used],
    )
