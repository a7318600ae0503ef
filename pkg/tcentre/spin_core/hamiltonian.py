"""
Spin Hamiltonians
=================
Ground state (T0) electron-hydrogen Hamiltonian and excited state (TX0) nuclear Hamiltonian.

    H_e = -B·(γ_e S + γ_n I) + Σ_ij A_ij S_i⊗I_j      (4x4)
    H_h = -γ_n B·I                                   (2x2)

Basis order |↑⇑⟩, |↑⇓⟩, |↓⇑⟩, |↓⇓⟩ (electron ⊗ nucleus), S = σ/2, entries in rad/s.
The hole Zeeman term of TX0 is dropped: with zero hole hyperfine it only adds a global phase.
"""
import logging
from typing import Sequence, Tuple, Union

import numpy as np

from .constants import PhysicalConstants, get_constants
from .errors import InvalidTensorError
from .field import MagneticField
from .linalg import SpinHamiltonian
from .tensor import HyperfineTensor, symmetric_check

logger = logging.getLogger(__name__)

# Pauli matrices / 2
SIGMA = np.array([
    [[0, 1], [1, 0]],
    [[0, -1j], [1j, 0]],
    [[1, 0], [0, -1]],
], dtype=complex)
SPIN_HALF = 0.5 * SIGMA
ID2 = np.eye(2, dtype=complex)

# Electron and nuclear operators on the 4-dim product space
S_OPS = np.array([np.kron(SPIN_HALF[i], ID2) for i in range(3)])
I_OPS = np.array([np.kron(ID2, SPIN_HALF[i]) for i in range(3)])
SI_OPS = np.array([[np.kron(SPIN_HALF[i], SPIN_HALF[j]) for j in range(3)] for i in range(3)])

# Zero-field sign triples (s1·s2·s3 = -1 for each)
ZERO_FIELD_SIGNS = np.array([
    [+1, -1, +1],
    [-1, +1, +1],
    [+1, +1, -1],
    [-1, -1, -1],
], dtype=float)

TensorLike = Union[HyperfineTensor, np.ndarray]


def crystal_tensor(a: TensorLike) -> np.ndarray:
    """Crystal-frame tensor in rad/s; arrays are taken as rad/s already"""
    if isinstance(a, HyperfineTensor):
        return a.crystal_matrix()
    m = np.asarray(a, dtype=float)
    if m.shape != (3, 3):
        raise InvalidTensorError(f"hyperfine tensor must be 3x3, got shape {m.shape}")
    if not symmetric_check(m):
        raise InvalidTensorError("hyperfine tensor must be symmetric")
    return m


def field_vector(b: Union[MagneticField, Sequence[float]]) -> np.ndarray:
    return b.array if isinstance(b, MagneticField) else np.asarray(b, dtype=float).reshape(3)


def build_ground_hamiltonian(b: Union[MagneticField, Sequence[float]],
                             a: TensorLike,
                             constants: PhysicalConstants = None) -> SpinHamiltonian:
    """
    Build the 4x4 T0 Hamiltonian (rad/s)

    Args:
        b: field in tesla
        a: HyperfineTensor, or symmetric 3x3 crystal-frame array in rad/s
        constants: physical constants (configured defaults if None)

    Raises:
        InvalidTensorError: if the tensor is not symmetric
    """
    c = get_constants() if constants is None else constants
    bvec = field_vector(b)
    tensor = crystal_tensor(a)

    zeeman = -np.einsum('i,ijk->jk', bvec, c.gamma_e * S_OPS + c.gamma_n * I_OPS)
    hyperfine = np.einsum('ij,ijkl->kl', tensor, SI_OPS)
    return SpinHamiltonian(zeeman + hyperfine, kind="ground")


def build_excited_nuclear_hamiltonian(b: Union[MagneticField, Sequence[float]],
                                      constants: PhysicalConstants = None) -> SpinHamiltonian:
    """2x2 TX0 nuclear Hamiltonian -γ_n B·I (rad/s)"""
    c = get_constants() if constants is None else constants
    bvec = field_vector(b)
    return SpinHamiltonian(-c.gamma_n * np.einsum('i,ijk->jk', bvec, SPIN_HALF), kind="excited")


def ground_hamiltonian_stack(fields: np.ndarray, tensors: np.ndarray,
                             constants: PhysicalConstants = None) -> np.ndarray:
    """
    Vectorised ground Hamiltonians for many fields and tensors

    Args:
        fields: (N, 3) tesla
        tensors: (M, 3, 3) crystal-frame tensors in rad/s

    Returns:
        (M, N, 4, 4) complex array
    """
    c = get_constants() if constants is None else constants
    fields = np.asarray(fields, dtype=float).reshape(-1, 3)
    tensors = np.asarray(tensors, dtype=float).reshape(-1, 3, 3)

    zeeman = -np.einsum('ni,ijk->njk', fields, c.gamma_e * S_OPS + c.gamma_n * I_OPS)
    hyperfine = np.einsum('mij,ijkl->mkl', tensors, SI_OPS)
    return hyperfine[:, None, :, :] + zeeman[None, :, :, :]


def zero_field_eigenvalues(principal_mhz: Sequence[float]) -> np.ndarray:
    """Closed-form B=0 eigenvalues ¼(s·A) in MHz, ascending"""
    a = np.asarray(principal_mhz, dtype=float).reshape(3)
    return np.sort(0.25 * ZERO_FIELD_SIGNS @ a)


def zero_field_transitions(principal_mhz: Sequence[float]) -> Tuple[np.ndarray, np.ndarray]:
    """
    Closed-form B=0 transitions in MHz

    Returns:
        (from_lowest, intra_triplet): the three lines out of the lowest level and the
        three splittings among the upper three levels, each ascending
    """
    e = zero_field_eigenvalues(principal_mhz)
    from_lowest = np.sort(e[1:] - e[0])
    upper = e[1:]
    intra = np.sort([upper[1] - upper[0], upper[2] - upper[1], upper[2] - upper[0]])
    return from_lowest, intra


def electron_projector(direction: Sequence[float], branch: str = 'up') -> np.ndarray:
    """
    4x4 projector on electron spin ±½ along a unit direction, times the nuclear identity

    Args:
        direction: unit vector
        branch: 'up' (+½) or 'down' (-½)
    """
    sign = 1.0 if branch == 'up' else -1.0
    b = np.asarray(direction, dtype=float).reshape(3)
    return 0.5 * np.eye(4) + sign * np.einsum('i,ijk->jk', b, S_OPS)


def electron_state(direction: Sequence[float], branch: str = 'up') -> np.ndarray:
    """Electron spinor with spin ±½ along a unit direction"""
    sign = 1.0 if branch == 'up' else -1.0
    b = np.asarray(direction, dtype=float).reshape(3)
    op = sign * np.einsum('i,ijk->jk', b, SPIN_HALF)
    values, vectors = np.linalg.eigh(op)
    v = vectors[:, int(np.argmax(values))]
    k = int(np.argmax(np.abs(v)))
    return v * np.conj(v[k]) / abs(v[k])