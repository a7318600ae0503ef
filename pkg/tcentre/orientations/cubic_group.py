"""
Cubic Group and Orientation Set
===============================
The 24 proper rotations of the cubic point group and the 12 inversion-symmetric
T centre orientations they generate from z0.

Orientations are found by acting with the group on a generic tensor in the z0 frame and
deduplicating the results; inversion pairs coincide because the hyperfine tensor is
inversion invariant. The set is built once and cached (singleton with lock).
"""
import itertools
import json
import logging
import threading
from dataclasses import dataclass
from typing import List, Optional

import numpy as np

from tcentre.spin_core import HyperfineTensor
from tcentre.spin_core.tensor import Z0_ALPHA_DEG, Z0_BETA_DEG, Z0_GAMMA_DEG
from .errors import OrientationError

logger = logging.getLogger(__name__)

N_ORIENTATIONS = 12
DEDUP_TOL = 1e-9

# Generic principal values in the z0 frame: only the C2 about hyperfine Z survives
_REFERENCE_TENSOR = HyperfineTensor((3.0, -2.0, 1.0), (Z0_ALPHA_DEG, Z0_BETA_DEG, Z0_GAMMA_DEG))


@dataclass(frozen=True)
class OrientationId:
    """One of the 12 orientation classes"""
    label: str
    index: int
    rotation: np.ndarray

    def __post_init__(self):
        r = np.array(self.rotation, dtype=float, copy=True)
        r.setflags(write=False)
        object.__setattr__(self, 'rotation', r)

    def to_dict(self) -> dict:
        return {'label': self.label, 'rotation': [float(x) for x in self.rotation.reshape(-1)]}


def cubic_rotations() -> List[np.ndarray]:
    """
    The 24 proper rotations of the cube as signed permutation matrices

    Deterministic order with the identity first.
    """
    rotations = []
    for perm in itertools.permutations(range(3)):
        for signs in itertools.product((1.0, -1.0), repeat=3):
            m = np.zeros((3, 3))
            for row, col in enumerate(perm):
                m[row, col] = signs[row]
            if np.linalg.det(m) > 0:
                rotations.append(m)
    return rotations


def _same_tensor(a: np.ndarray, b: np.ndarray, scale: float) -> bool:
    return bool(np.max(np.abs(a - b)) <= DEDUP_TOL * scale)


def distinct_orbit(matrix: np.ndarray) -> List[np.ndarray]:
    """All distinct g·M·gᵀ over the cubic group, in group order"""
    scale = max(np.max(np.abs(matrix)), np.finfo(float).tiny)
    orbit = []
    for g in cubic_rotations():
        candidate = g @ matrix @ g.T
        if not any(_same_tensor(candidate, m, scale) for m in orbit):
            orbit.append(candidate)
    return orbit


# Singleton cache
_orientations: Optional[List[OrientationId]] = None
_orientations_lock = threading.Lock()


def _build_orientations() -> List[OrientationId]:
    reference = _REFERENCE_TENSOR.crystal_matrix_mhz()
    scale = np.max(np.abs(reference))
    found, tensors = [], []

    for g in cubic_rotations():
        candidate = g @ reference @ g.T
        if any(_same_tensor(candidate, m, scale) for m in tensors):
            continue
        tensors.append(candidate)
        found.append(OrientationId(label=f"z{len(found)}", index=len(found), rotation=g))

    if len(found) != N_ORIENTATIONS:
        raise OrientationError(f"expected {N_ORIENTATIONS} orientation classes, found {len(found)}")
    return found


def orientation_set() -> List[OrientationId]:
    """
    The 12 orientation classes z0..z11 (cached)

    Returns:
        Deterministic list; z0 carries the identity rotation
    """
    global _orientations

    if _orientations is None:
        with _orientations_lock:
            if _orientations is None:
                _orientations = _build_orientations()
                logger.debug(f"✅ Built {len(_orientations)} orientation classes")

    return list(_orientations)


def get_orientation(label: str) -> OrientationId:
    for oid in orientation_set():
        if oid.label == label:
            return oid
    raise OrientationError(f"unknown orientation '{label}'")


def tensor_for_orientation(tensor: HyperfineTensor, oid: OrientationId) -> np.ndarray:
    """
    Crystal-frame tensor of an orientation, rad/s

    M_id = R_id · M_z0 · R_idᵀ
    """
    r = oid.rotation
    return r @ tensor.crystal_matrix() @ r.T


def orientation_tensors(tensor: HyperfineTensor,
                        orientations: Optional[List[OrientationId]] = None) -> np.ndarray:
    """(n, 3, 3) stack of crystal-frame tensors in rad/s"""
    orientations = orientation_set() if orientations is None else orientations
    return np.array([tensor_for_orientation(tensor, oid) for oid in orientations])


def orientations_to_json(orientations: Optional[List[OrientationId]] = None, indent: int = 2) -> str:
    """Labels with row-major 3x3 rotations"""
    orientations = orientation_set() if orientations is None else orientations
    return json.dumps([oid.to_dict() for oid in orientations], indent=indent)
