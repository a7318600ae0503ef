"""
Transition Frequencies
======================
All pairwise level differences of the 4x4 ground Hamiltonian, labelled and sorted.

Components:
- TransitionLine / TransitionList: labelled lines with a DataFrame view
- transition_frequencies: lines for one tensor
- ensemble_transitions: lines for every orientation
- split_bands: NMR/EPR split by a frequency threshold
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Tuple, Union

import numpy as np
import pandas as pd

from tcentre.config import NUMERICS_CONFIG
from tcentre.spin_core import (
    HyperfineTensor,
    MagneticField,
    PhysicalConstants,
    build_ground_hamiltonian,
    eigensystem,
    RAD_S_TO_MHZ,
)
from tcentre.orientations import OrientationId, orientation_set, tensor_for_orientation

logger = logging.getLogger(__name__)

LINE_COLUMNS = ['freq_MHz', 'lower', 'upper', 'orientation']


@dataclass(frozen=True)
class TransitionLine:
    """One transition between ground levels (indices in ascending energy order)"""
    freq_mhz: float
    lower: int
    upper: int
    orientation: str = ""


@dataclass
class TransitionList:
    """Lines sorted by ascending frequency"""
    lines: List[TransitionLine] = field(default_factory=list)

    def __post_init__(self):
        self.lines = sorted(self.lines, key=lambda ln: (ln.freq_mhz, ln.orientation, ln.lower, ln.upper))

    def __len__(self) -> int:
        return len(self.lines)

    def __iter__(self):
        return iter(self.lines)

    @property
    def frequencies(self) -> np.ndarray:
        return np.array([ln.freq_mhz for ln in self.lines])

    def for_orientation(self, label: str) -> 'TransitionList':
        return TransitionList([ln for ln in self.lines if ln.orientation == label])

    def top(self, n: int) -> np.ndarray:
        """The n highest frequencies, ascending"""
        return self.frequencies[-n:] if n else np.array([])

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame(
            [(ln.freq_mhz, ln.lower, ln.upper, ln.orientation) for ln in self.lines],
            columns=LINE_COLUMNS,
        )


def _lines_from_levels(levels: np.ndarray, label: str) -> List[TransitionLine]:
    out = []
    for i in range(len(levels)):
        for j in range(i + 1, len(levels)):
            out.append(TransitionLine(float((levels[j] - levels[i]) * RAD_S_TO_MHZ), i, j, label))
    return out


def transition_frequencies(b: Union[MagneticField, np.ndarray],
                           a_crystal: Union[HyperfineTensor, np.ndarray],
                           orientation: str = "",
                           constants: PhysicalConstants = None) -> TransitionList:
    """
    All 6 ground-state transitions

    Args:
        b: field (MagneticField or 3-vector in tesla)
        a_crystal: HyperfineTensor or crystal-frame 3x3 in rad/s
        orientation: label attached to each line

    Returns:
        TransitionList sorted ascending (MHz)
    """
    h = build_ground_hamiltonian(b, a_crystal, constants)
    levels = eigensystem(h).eigenvalues
    return TransitionList(_lines_from_levels(levels, orientation))


def ensemble_transitions(b: Union[MagneticField, np.ndarray],
                         tensor: HyperfineTensor,
                         orientations: Optional[List[OrientationId]] = None,
                         constants: PhysicalConstants = None) -> TransitionList:
    """Lines of every orientation, labelled by orientation"""
    orientations = orientation_set() if orientations is None else orientations
    lines: List[TransitionLine] = []
    for oid in orientations:
        lines.extend(transition_frequencies(b, tensor_for_orientation(tensor, oid), oid.label, constants).lines)
    return TransitionList(lines)


def split_bands(lines: TransitionList, threshold_mhz: float = None) -> Tuple[TransitionList, TransitionList]:
    """
    Split into (NMR band, EPR band)

    Lines below the threshold go to the NMR band. Purely presentational.
    """
    threshold = NUMERICS_CONFIG.get("BAND_SPLIT_MHZ", 100.0) if threshold_mhz is None else threshold_mhz
    nmr = [ln for ln in lines if ln.freq_mhz < threshold]
    epr = [ln for ln in lines if ln.freq_mhz >= threshold]
    return TransitionList(nmr), TransitionList(epr)


def distinct_frequencies(lines: TransitionList, tolerance_mhz: float = None) -> np.ndarray:
    """Ascending frequencies with near-duplicates (within tolerance) merged"""
    tol = NUMERICS_CONFIG.get("EQUIVALENCE_TOL_MHZ", 1e-3) if tolerance_mhz is None else tolerance_mhz
    out: List[float] = []
    for f in np.sort(lines.frequencies):
        if not out or f - out[-1] > tol:
            out.append(float(f))
    return np.array(out)
