"""
Effective Hyperfine Quantities
==============================
Nuclear splittings inside each electron branch of the ground state.

Components:
- SpectraError / SecularRegimeError
- check_secular_regime: |γ_e|·|B| > factor·max|A|
- branch_eigensystem: exact eigenpairs grouped by dominant electron character
- effective_hyperfine: (b̂ᵀAb̂, δ_e = Δ↓ − Δ↑)
- delta_h: Δ_n(branch) − γ_n|B|/2π

Branches are picked by overlap with the electron projector ½ ± b̂·S, never by energy order.
"""
import logging
from dataclasses import dataclass
from typing import Dict, Tuple, Union

import numpy as np

from tcentre.config import NUMERICS_CONFIG
from tcentre.spin_core import (
    HyperfineTensor,
    MagneticField,
    PhysicalConstants,
    get_constants,
    build_ground_hamiltonian,
    eigensystem,
    electron_projector,
    RAD_S_TO_MHZ,
)
from tcentre.spin_core.hamiltonian import crystal_tensor, field_vector
from .errors import SecularRegimeError, SpectraError

logger = logging.getLogger(__name__)

BRANCHES = ('up', 'down')
TensorLike = Union[HyperfineTensor, np.ndarray]
FieldLike = Union[MagneticField, np.ndarray]


@dataclass(frozen=True)
class BranchEigensystem:
    """Exact ground eigenpairs split by electron branch"""
    levels: Dict[str, np.ndarray]       # branch -> (2,) rad/s ascending
    vectors: Dict[str, np.ndarray]      # branch -> (4, 2)
    direction: np.ndarray
    magnitude: float

    def splitting(self, branch: str) -> float:
        """Nuclear splitting inside a branch, rad/s"""
        lv = self.levels[branch]
        return float(lv[1] - lv[0])


def _check_branch(branch: str) -> str:
    if branch not in BRANCHES:
        raise SpectraError(f"branch must be 'up' or 'down', got '{branch}'")
    return branch


def max_abs_hyperfine(a: TensorLike) -> float:
    """Largest |principal value| in rad/s"""
    return float(np.max(np.abs(np.linalg.eigvalsh(crystal_tensor(a)))))


def check_secular_regime(b: FieldLike, a: TensorLike, constants: PhysicalConstants = None,
                         factor: float = None) -> Tuple[bool, str]:
    """
    Test the secular guard

    Returns:
        (ok, message)
    """
    c = get_constants() if constants is None else constants
    factor = NUMERICS_CONFIG.get("SECULAR_FACTOR", 10.0) if factor is None else factor
    magnitude = float(np.linalg.norm(field_vector(b)))
    zeeman = abs(c.gamma_e) * magnitude
    limit = factor * max_abs_hyperfine(a)

    if magnitude == 0.0:
        return False, "field magnitude is zero; electron branches are undefined"
    if zeeman <= limit:
        return False, (f"|B|={magnitude:.6g} T is below the secular guard: "
                       f"|γ_e|B={zeeman * RAD_S_TO_MHZ:.4g} MHz ≤ {factor:g}·max|A|={limit * RAD_S_TO_MHZ:.4g} MHz")
    return True, ""


def require_secular_regime(b: FieldLike, a: TensorLike, constants: PhysicalConstants = None) -> None:
    ok, message = check_secular_regime(b, a, constants)
    if not ok:
        raise SecularRegimeError(message)


def branch_eigensystem(b: FieldLike, a: TensorLike, constants: PhysicalConstants = None,
                       check_regime: bool = True) -> BranchEigensystem:
    """
    Diagonalise the ground Hamiltonian and group eigenpairs by electron branch

    Raises:
        SecularRegimeError: below the secular guard, or when overlaps do not split 2/2
    """
    if check_regime:
        require_secular_regime(b, a, constants)

    bvec = field_vector(b)
    magnitude = float(np.linalg.norm(bvec))
    if magnitude == 0.0:
        raise SecularRegimeError("field magnitude is zero; electron branches are undefined")
    direction = bvec / magnitude

    eig = eigensystem(build_ground_hamiltonian(bvec, a, constants))
    p_up = electron_projector(direction, 'up')
    overlaps = np.real(np.einsum('ik,ij,jk->k', eig.eigenvectors.conj(), p_up, eig.eigenvectors))

    up = np.nonzero(overlaps > 0.5)[0]
    down = np.nonzero(overlaps <= 0.5)[0]
    if len(up) != 2 or len(down) != 2:
        raise SecularRegimeError(
            f"ambiguous electron branches at |B|={magnitude:.6g} T (↑e overlaps {np.round(overlaps, 3).tolist()})"
        )

    return BranchEigensystem(
        levels={'up': eig.eigenvalues[up], 'down': eig.eigenvalues[down]},
        vectors={'up': eig.eigenvectors[:, up], 'down': eig.eigenvectors[:, down]},
        direction=direction,
        magnitude=magnitude,
    )


def nuclear_splittings(b: FieldLike, a: TensorLike, constants: PhysicalConstants = None) -> Tuple[float, float]:
    """(Δ↑e, Δ↓e) in MHz"""
    branches = branch_eigensystem(b, a, constants)
    return branches.splitting('up') * RAD_S_TO_MHZ, branches.splitting('down') * RAD_S_TO_MHZ


def effective_hyperfine(b: FieldLike, a: TensorLike, constants: PhysicalConstants = None) -> Tuple[float, float]:
    """
    Effective hyperfine constant and electron-dependent splitting difference

    Returns:
        (A_eff, δ_e) in MHz, with A_eff = b̂ᵀAb̂ and δ_e = Δ↓e − Δ↑e from exact diagonalisation

    Raises:
        SecularRegimeError: field below the secular guard
    """
    branches = branch_eigensystem(b, a, constants)
    b_hat = branches.direction
    a_eff = float(b_hat @ crystal_tensor(a) @ b_hat) * RAD_S_TO_MHZ
    delta_e = (branches.splitting('down') - branches.splitting('up')) * RAD_S_TO_MHZ
    return a_eff, delta_e


def delta_h(b: FieldLike, a: TensorLike, branch: str = 'up', constants: PhysicalConstants = None) -> float:
    """
    Ground-branch nuclear splitting minus the bare hydrogen Larmor splitting, MHz

    Positive when the ground splitting exceeds γ_n|B|/2π.
    """
    c = get_constants() if constants is None else constants
    branches = branch_eigensystem(b, a, c)
    return (branches.splitting(_check_branch(branch)) - c.gamma_n * branches.magnitude) * RAD_S_TO_MHZ


def secular_splittings(b: FieldLike, a: TensorLike, constants: PhysicalConstants = None) -> Tuple[float, float]:
    """
    First-order (Δ↑e, Δ↓e) in MHz: |γ_n B ∓ ½ b̂ᵀA| magnitudes

    Used as the high-field reference for the exact values.
    """
    c = get_constants() if constants is None else constants
    bvec = field_vector(b)
    magnitude = float(np.linalg.norm(bvec))
    if magnitude == 0.0:
        raise SecularRegimeError("field magnitude is zero; electron branches are undefined")
    b_hat = bvec / magnitude
    coupling = b_hat @ crystal_tensor(a)
    up = np.linalg.norm(c.gamma_n * bvec - 0.5 * coupling)
    down = np.linalg.norm(c.gamma_n * bvec + 0.5 * coupling)
    return float(up) * RAD_S_TO_MHZ, float(down) * RAD_S_TO_MHZ
