"""
Orientations Module
===================
The 12 inversion-symmetric T centre orientations as cubic-group images of z0, and their
partition into spectrally equivalent subsets for a field direction.

Components:
- cubic_group: cubic rotations, orientation_set, tensor_for_orientation, JSON export
- partition: OrientationPartition, partition_by_field
- errors: OrientationError
"""

from .errors import OrientationError
from .cubic_group import (
    OrientationId,
    cubic_rotations,
    distinct_orbit,
    orientation_set,
    get_orientation,
    tensor_for_orientation,
    orientation_tensors,
    orientations_to_json,
    N_ORIENTATIONS,
)
from .partition import OrientationPartition, partition_by_field, transition_matrix

__version__ = '1.0.0'

__all__ = [
    # Group
    'OrientationError',
    'OrientationId',
    'cubic_rotations',
    'distinct_orbit',
    'orientation_set',
    'get_orientation',
    'N_ORIENTATIONS',

    # Tensors
    'tensor_for_orientation',
    'orientation_tensors',
    'orientations_to_json',

    # Partition
    'OrientationPartition',
    'partition_by_field',
    'transition_matrix',
]
