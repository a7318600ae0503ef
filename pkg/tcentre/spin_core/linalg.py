"""
Spin Linear Algebra
===================
Small dense Hermitian operators, their eigensystems and propagators.

Components:
- SpinHamiltonian: Hermitian matrix in rad/s, read-only
- Eigensystem: ascending eigenvalues with phase-fixed eigenvectors
- eigensystem / propagator: diagonalisation and U(t) = V·exp(-iΛt)·V†

Eigenvector phase: the largest-magnitude component of each vector is made real positive.
Within a degenerate block vectors are ordered by descending |first nonzero component|;
only the spectral projector of such a block is stable.
"""
import logging
from dataclasses import dataclass
from typing import Union

import numpy as np

from tcentre.config import NUMERICS_CONFIG
from .errors import NonHermitianError

logger = logging.getLogger(__name__)

ArrayLike = Union[np.ndarray, 'SpinHamiltonian']


def _readonly(matrix: np.ndarray) -> np.ndarray:
    m = np.array(matrix, dtype=complex, copy=True)
    m.setflags(write=False)
    return m


def check_hermitian(matrix: np.ndarray, rtol: float = None) -> bool:
    """‖H − H†‖ ≤ rtol·‖H‖ (Frobenius)"""
    rtol = NUMERICS_CONFIG.get("HERMITIAN_RTOL", 1e-12) if rtol is None else rtol
    m = np.asarray(matrix)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        return False
    norm = np.linalg.norm(m)
    return bool(np.linalg.norm(m - m.conj().T) <= rtol * max(norm, np.finfo(float).tiny))


@dataclass(frozen=True)
class SpinHamiltonian:
    """Hermitian spin Hamiltonian, entries in rad/s"""
    matrix: np.ndarray
    kind: str = "custom"

    def __post_init__(self):
        m = np.asarray(self.matrix)
        if not check_hermitian(m):
            raise NonHermitianError(f"{self.kind} Hamiltonian is not Hermitian")
        object.__setattr__(self, 'matrix', _readonly(m))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.matrix))


@dataclass(frozen=True)
class Eigensystem:
    """Eigenvalues (rad/s, ascending) and unitary eigenvector columns"""
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    def projector(self, index: int) -> np.ndarray:
        v = self.eigenvectors[:, index]
        return np.outer(v, v.conj())


def _as_matrix(h: ArrayLike) -> np.ndarray:
    return h.matrix if isinstance(h, SpinHamiltonian) else np.asarray(h, dtype=complex)


def fix_phases(vectors: np.ndarray) -> np.ndarray:
    """Rotate each column so its largest-magnitude entry is real positive"""
    v = np.array(vectors, dtype=complex, copy=True)
    for col in range(v.shape[1]):
        mags = np.abs(v[:, col])
        k = int(np.argmax(mags >= mags.max() - 1e-12))
        if mags[k] > 0:
            v[:, col] *= np.conj(v[k, col]) / mags[k]
    return v


def _first_nonzero_magnitude(vector: np.ndarray, atol: float = 1e-12) -> float:
    mags = np.abs(vector)
    nz = np.nonzero(mags > atol)[0]
    return float(mags[nz[0]]) if nz.size else 0.0


def eigensystem(h: ArrayLike) -> Eigensystem:
    """
    Diagonalise a Hermitian operator

    Args:
        h: SpinHamiltonian or square complex array

    Returns:
        Eigensystem with ascending eigenvalues and phase-fixed eigenvectors

    Raises:
        NonHermitianError: if h is not Hermitian
    """
    m = _as_matrix(h)
    if not check_hermitian(m):
        raise NonHermitianError("eigensystem requires a Hermitian matrix")

    values, vectors = np.linalg.eigh(0.5 * (m + m.conj().T))
    vectors = fix_phases(vectors)

    # Canonical order inside degenerate blocks
    scale = max(np.max(np.abs(values)) if values.size else 0.0, np.finfo(float).tiny)
    tol = NUMERICS_CONFIG.get("DEGENERACY_ATOL", 1e-9) * scale
    order = list(range(len(values)))
    start = 0
    while start < len(values):
        stop = start + 1
        while stop < len(values) and values[stop] - values[stop - 1] <= tol:
            stop += 1
        if stop - start > 1:
            block = sorted(range(start, stop),
                           key=lambda i: -_first_nonzero_magnitude(vectors[:, i]))
            order[start:stop] = block
        start = stop

    return Eigensystem(eigenvalues=values[order], eigenvectors=vectors[:, order])


def propagator(h: ArrayLike, t: float, eig: Eigensystem = None) -> np.ndarray:
    """
    U(t) = exp(-iHt) from the eigensystem

    Args:
        h: Hamiltonian (rad/s)
        t: time in seconds, t ≥ 0
        eig: precomputed eigensystem of h (optional)
    """
    if t < 0:
        raise ValueError(f"propagator time must be non-negative, got {t}")
    eig = eigensystem(h) if eig is None else eig
    v = eig.eigenvectors
    return (v * np.exp(-1j * eig.eigenvalues * t)) @ v.conj().T


def is_unitary(u: np.ndarray, atol: float = None) -> bool:
    atol = NUMERICS_CONFIG.get("UNITARY_ATOL", 1e-10) if atol is None else atol
    u = np.asarray(u)
    return bool(np.allclose(u.conj().T @ u, np.eye(u.shape[0]), atol=atol))
