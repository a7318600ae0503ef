"""
Effective Field Geometry
========================
Secular picture of the ground-state nuclear spin: inside an electron branch the hydrogen
precesses about B_eff = B + F, with γ_n F = −S·A and S = ±½ b̂. The excited state has no
hyperfine field, so every optical cycle swaps the quantisation axis between B_eff and B.

Components:
- EffectiveFieldGeometry: F, B_eff, θ_q, a
- effective_field_geometry: build the geometry for a field, tensor and branch
- flip_probability_limit / flip_population_limit / corrected_flip_limit / moment_limit
- branch_nuclear_hamiltonian: exact 2x2 nuclear Hamiltonian of one branch
"""
import logging
from dataclasses import dataclass
from typing import Dict, Any

import numpy as np
from scipy.linalg import polar

from tcentre.spectra import SecularRegimeError, require_secular_regime, BRANCHES
from tcentre.spin_core import (
    PhysicalConstants,
    get_constants,
    eigensystem,
    electron_projector,
    electron_state,
    crystal_tensor,
    field_vector,
)
from tcentre.spin_core.hamiltonian import ID2
from .errors import DecoherenceError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class EffectiveFieldGeometry:
    """Quantisation axes of the ground and excited nuclear spin"""
    field: np.ndarray           # B (tesla)
    electron_field: np.ndarray  # F (tesla)
    effective_field: np.ndarray  # B_eff = B + F (tesla)
    theta_q: float              # ∠(B_eff, B), rad
    branch: str = 'up'

    @property
    def a(self) -> float:
        """Overlap ½(1 + cos θ_q)"""
        return 0.5 * (1.0 + np.cos(self.theta_q))

    def to_dict(self) -> Dict[str, Any]:
        return {
            'branch': self.branch,
            'B_T': self.field.tolist(),
            'F_T': self.electron_field.tolist(),
            'B_eff_T': self.effective_field.tolist(),
            'theta_q_rad': self.theta_q,
            'a': self.a,
        }


def branch_sign(branch: str) -> float:
    if branch not in BRANCHES:
        raise DecoherenceError(f"branch must be 'up' or 'down', got '{branch}'")
    return 1.0 if branch == 'up' else -1.0


def effective_field_geometry(b, a, branch: str = 'up',
                             constants: PhysicalConstants = None) -> EffectiveFieldGeometry:
    """
    Effective field seen by the hydrogen inside one electron branch

    Args:
        b: MagneticField or 3-vector (tesla)
        a: HyperfineTensor or crystal-frame array (rad/s)
        branch: 'up' or 'down'

    Raises:
        SecularRegimeError: below the secular guard
    """
    c = get_constants() if constants is None else constants
    sign = branch_sign(branch)
    require_secular_regime(b, a, c)

    bvec = field_vector(b)
    b_hat = bvec / np.linalg.norm(bvec)
    spin = 0.5 * sign * b_hat
    f = -(spin @ crystal_tensor(a)) / c.gamma_n
    b_eff = bvec + f

    theta = float(np.arctan2(np.linalg.norm(np.cross(b_eff, bvec)), b_eff @ bvec))
    return EffectiveFieldGeometry(field=bvec, electron_field=f, effective_field=b_eff,
                                  theta_q=theta, branch=branch)


def flip_probability_limit(geometry: EffectiveFieldGeometry) -> float:
    """Long-lifetime P_flip = 4a(1−a) = sin²θ_q"""
    a = geometry.a
    return 4.0 * a * (1.0 - a)


def flip_population_limit(geometry: EffectiveFieldGeometry) -> float:
    """Long-lifetime population moved out of the initial eigenstate, 2a(1−a)"""
    a = geometry.a
    return 2.0 * a * (1.0 - a)


def corrected_flip_limit(geometry: EffectiveFieldGeometry) -> float:
    """
    Long-lifetime P_flip after the average-unitary correction

    ½(1−c)(1+c²) with c = cos θ_q; tends to 2 sin²(θ_q/2) for small θ_q.
    """
    c = np.cos(geometry.theta_q)
    return float(0.5 * (1.0 - c) * (1.0 + c * c))


def moment_limit(geometry: EffectiveFieldGeometry) -> float:
    """Long-lifetime |⟨I⟩| after one cycle, ½|2a−1|"""
    return 0.5 * abs(2.0 * geometry.a - 1.0)


def branch_isometry(direction, branch: str = 'up') -> np.ndarray:
    """4x2 embedding |e⟩⊗1 of the nuclear space into the ground space"""
    e = electron_state(direction, branch)
    return np.kron(e.reshape(2, 1), ID2)


def reduced_branch_basis(vectors: np.ndarray, isometry: np.ndarray) -> np.ndarray:
    """Branch eigenvectors (4x2) reduced onto the nuclear space, nearest orthonormal pair"""
    basis, _ = polar(isometry.conj().T @ vectors)
    return basis


def branch_nuclear_hamiltonian(h_ground, direction, branch: str = 'up') -> np.ndarray:
    """
    Exact 2x2 nuclear Hamiltonian of one electron branch (rad/s)

    Keeps the two exact eigenvalues of the branch; the eigenvectors are the branch
    eigenstates reduced onto |e⟩ and orthonormalised.

    Args:
        h_ground: 4x4 ground Hamiltonian (SpinHamiltonian or array)
        direction: unit field direction
        branch: 'up' or 'down'

    Raises:
        SecularRegimeError: when the eigenstates do not split 2/2 between branches
    """
    branch_sign(branch)
    eig = eigensystem(h_ground)
    projector = electron_projector(direction, branch)
    overlaps = np.real(np.einsum('ik,ij,jk->k', eig.eigenvectors.conj(), projector, eig.eigenvectors))
    selected = np.nonzero(overlaps > 0.5)[0]
    if selected.size != 2:
        raise SecularRegimeError(
            f"branch '{branch}' is ambiguous (overlaps {np.round(overlaps, 3).tolist()})"
        )

    basis = reduced_branch_basis(eig.eigenvectors[:, selected], branch_isometry(direction, branch))
    h = (basis * eig.eigenvalues[selected]) @ basis.conj().T
    return 0.5 * (h + h.conj().T)
