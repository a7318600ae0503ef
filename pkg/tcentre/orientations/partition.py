"""
Orientation Partition
=====================
Groups orientations whose ground-state transition lists coincide for a given field,
i.e. the spectrally equivalent subsets seen in ODMR along a field direction.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence

import numpy as np

from tcentre.config import NUMERICS_CONFIG
from tcentre.spin_core import (
    HyperfineTensor,
    PhysicalConstants,
    ground_hamiltonian_stack,
    unit,
    RAD_S_TO_MHZ,
)
from tcentre.spin_core.errors import InvalidFieldError
from .cubic_group import OrientationId, orientation_set, orientation_tensors
from .errors import OrientationError

logger = logging.getLogger(__name__)


@dataclass
class OrientationPartition:
    """Disjoint classes of orientation labels for one field"""
    classes: List[List[str]]
    field_direction: np.ndarray
    field_magnitude: float
    tolerance_mhz: float
    representative_lines: List[np.ndarray] = field(default_factory=list)

    @property
    def n_classes(self) -> int:
        return len(self.classes)

    @property
    def sizes(self) -> List[int]:
        return [len(c) for c in self.classes]

    def class_of(self, label: str) -> int:
        for i, members in enumerate(self.classes):
            if label in members:
                return i
        raise OrientationError(f"orientation '{label}' not in partition")


def transition_matrix(field_vector: Sequence[float], tensors: np.ndarray,
                      constants: PhysicalConstants = None) -> np.ndarray:
    """
    Sorted transition frequencies (MHz) of each tensor at one field

    Returns:
        (n_tensors, 6) array, each row ascending
    """
    h = ground_hamiltonian_stack(np.asarray(field_vector, dtype=float)[None, :], tensors, constants)[:, 0]
    levels = np.linalg.eigvalsh(h)
    i, j = np.triu_indices(4, k=1)
    lines = (levels[:, j] - levels[:, i]) * RAD_S_TO_MHZ
    return np.sort(lines, axis=1)


def partition_by_field(direction: Sequence[float],
                       tensor: HyperfineTensor,
                       magnitude: float,
                       tolerance_mhz: float = None,
                       orientations: Optional[List[OrientationId]] = None,
                       constants: PhysicalConstants = None) -> OrientationPartition:
    """
    Partition orientations into spectrally equivalent classes

    Args:
        direction: field direction (normalised here)
        tensor: z0 hyperfine tensor
        magnitude: field magnitude in tesla
        tolerance_mhz: equivalence tolerance on every transition (default 1 kHz)
        orientations: orientation list, any order (defaults to the full set)

    Returns:
        OrientationPartition with classes ordered by their lowest member index

    Raises:
        InvalidFieldError: zero-length direction
    """
    tol = NUMERICS_CONFIG.get("EQUIVALENCE_TOL_MHZ", 1e-3) if tolerance_mhz is None else tolerance_mhz
    try:
        b_hat = unit(direction)
    except InvalidFieldError:
        raise InvalidFieldError(f"partition needs a non-zero field direction, got {list(direction)}")

    members = orientation_set() if orientations is None else sorted(orientations, key=lambda o: o.index)
    lines = transition_matrix(magnitude * b_hat, orientation_tensors(tensor, members), constants)

    classes: List[List[int]] = []
    for k in range(len(members)):
        for cls in classes:
            if np.max(np.abs(lines[k] - lines[cls[0]])) <= tol:
                cls.append(k)
                break
        else:
            classes.append([k])

    partition = OrientationPartition(
        classes=[[members[k].label for k in cls] for cls in classes],
        field_direction=b_hat,
        field_magnitude=float(magnitude),
        tolerance_mhz=tol,
        representative_lines=[lines[cls[0]] for cls in classes],
    )
    logger.debug(f"🔧 Partition at |B|={magnitude} T along {np.round(b_hat, 4).tolist()}: sizes {partition.sizes}")
    return partition
