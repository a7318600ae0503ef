"""
Spin Core Module
================
Ground/excited spin Hamiltonians and the small dense linear algebra the other modules use.

Components:
- constants: PhysicalConstants (CODATA via scipy.constants, configured g-factors)
- tensor: HyperfineTensor, Euler frames, built-in tensors
- field: MagneticField and spherical helpers
- hamiltonian: build_ground_hamiltonian, build_excited_nuclear_hamiltonian, zero-field forms
- linalg: SpinHamiltonian, Eigensystem, eigensystem, propagator
"""

from .errors import SpinCoreError, InvalidTensorError, NonHermitianError, InvalidFieldError
from .constants import (
    PhysicalConstants,
    get_constants,
    mhz_to_rad_s,
    rad_s_to_mhz,
    MHZ_TO_RAD_S,
    RAD_S_TO_MHZ,
)
from .tensor import (
    HyperfineTensor,
    BUILTIN_TENSORS,
    euler_rotation,
    get_builtin_tensor,
    parse_tensor,
    load_tensor_file,
    tensor_from_mapping,
)
from .field import MagneticField, CRYSTAL_AXES, spherical_to_unit, unit_to_spherical, unit
from .linalg import (
    SpinHamiltonian,
    Eigensystem,
    eigensystem,
    propagator,
    check_hermitian,
    is_unitary,
)
from .hamiltonian import (
    build_ground_hamiltonian,
    build_excited_nuclear_hamiltonian,
    ground_hamiltonian_stack,
    crystal_tensor,
    field_vector,
    zero_field_eigenvalues,
    zero_field_transitions,
    electron_projector,
    electron_state,
    S_OPS,
    I_OPS,
    SPIN_HALF,
)

__version__ = '1.0.0'

__all__ = [
    # Errors
    'SpinCoreError',
    'InvalidTensorError',
    'NonHermitianError',
    'InvalidFieldError',

    # Constants
    'PhysicalConstants',
    'get_constants',
    'mhz_to_rad_s',
    'rad_s_to_mhz',
    'MHZ_TO_RAD_S',
    'RAD_S_TO_MHZ',

    # Tensors and fields
    'HyperfineTensor',
    'BUILTIN_TENSORS',
    'euler_rotation',
    'get_builtin_tensor',
    'parse_tensor',
    'load_tensor_file',
    'tensor_from_mapping',
    'MagneticField',
    'CRYSTAL_AXES',
    'spherical_to_unit',
    'unit_to_spherical',
    'unit',

    # Linear algebra
    'SpinHamiltonian',
    'Eigensystem',
    'eigensystem',
    'propagator',
    'check_hermitian',
    'is_unitary',

    # Hamiltonians
    'build_ground_hamiltonian',
    'build_excited_nuclear_hamiltonian',
    'ground_hamiltonian_stack',
    'crystal_tensor',
    'field_vector',
    'zero_field_eigenvalues',
    'zero_field_transitions',
    'electron_projector',
    'electron_state',
    'S_OPS',
    'I_OPS',
    'SPIN_HALF',
]
