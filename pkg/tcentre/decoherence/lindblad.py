"""
Master-Equation Oracle
======================
Independent check of the trajectory mixture: the excited nuclear block (2) and the ground
block (4) evolve together under

    dρ/dt = −i[H, ρ] + (1/τ)(L ρ L† − ½{L†L, ρ}),    H = H_h ⊕ H_e,  L = E: excited → ground

and the ground block at t, renormalised, is compared with the trajectory result.

Two integrators:
- expm: column-stacked Liouvillian exponentiated with scipy.linalg.expm
- ode:  scipy.integrate.solve_ivp (DOP853) on the complex vectorised state
"""
import logging
from typing import Tuple

import numpy as np
from scipy.integrate import solve_ivp
from scipy.linalg import block_diag, expm

from tcentre.config import NUMERICS_CONFIG
from .cycle import CycleOutcome, CycleParams, CycleSystem, check_regime, outcome_from_ground, prepare_cycle
from .errors import DecoherenceError, IntegratorError

logger = logging.getLogger(__name__)

LINDBLAD_METHODS = ('expm', 'ode')
EXCITED_DIM = 2
GROUND_DIM = 4


def cycle_operators(system: CycleSystem) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """
    Hamiltonian, jump operator and initial state on the 6-dim cycle space

    Returns:
        (H, L, ρ₀), all 6x6
    """
    v, lam = system.ground.eigenvectors, system.ground.eigenvalues
    w, mu = system.excited.eigenvectors, system.excited.eigenvalues
    h_ground = (v * lam) @ v.conj().T
    h_excited = (w * mu) @ w.conj().T
    hamiltonian = block_diag(h_excited, h_ground).astype(complex)

    dim = EXCITED_DIM + GROUND_DIM
    jump = np.zeros((dim, dim), dtype=complex)
    jump[EXCITED_DIM:, :EXCITED_DIM] = system.isometry

    rho0 = np.zeros((dim, dim), dtype=complex)
    rho0[:EXCITED_DIM, :EXCITED_DIM] = np.outer(system.chi, system.chi.conj())
    return hamiltonian, jump, rho0


def liouvillian(hamiltonian: np.ndarray, jump: np.ndarray, rate: float) -> np.ndarray:
    """Column-stacking superoperator: vec(AXB) = (Bᵀ ⊗ A) vec(X)"""
    dim = hamiltonian.shape[0]
    eye = np.eye(dim)
    decay = jump.conj().T @ jump
    coherent = -1j * (np.kron(eye, hamiltonian) - np.kron(hamiltonian.T, eye))
    dissipative = rate * (np.kron(jump.conj(), jump)
                          - 0.5 * np.kron(eye, decay)
                          - 0.5 * np.kron(decay.T, eye))
    return coherent + dissipative


def _evolve_expm(generator: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    return expm(generator * t) @ rho0.reshape(-1, order='F')


def _evolve_ode(generator: np.ndarray, rho0: np.ndarray, t: float) -> np.ndarray:
    rtol = NUMERICS_CONFIG.get("LINDBLAD_RTOL", 1e-10)
    atol = NUMERICS_CONFIG.get("LINDBLAD_ATOL", 1e-12)
    y0 = rho0.reshape(-1, order='F')
    if t == 0.0:
        return y0

    solution = solve_ivp(lambda _, y: generator @ y, (0.0, t), y0,
                         method='DOP853', rtol=rtol, atol=atol)
    if not solution.success:
        raise IntegratorError(f"lindblad: DOP853 failed at rtol={rtol:g}, atol={atol:g}: {solution.message}")
    logger.debug(f"🔧 DOP853 finished in {solution.nfev} evaluations")
    return solution.y[:, -1]


def lindblad_oracle(params: CycleParams, method: str = 'expm') -> CycleOutcome:
    """
    Cycle outcome from the master equation

    Args:
        params: cycle parameters (same guards as the trajectory mixture)
        method: 'expm' or 'ode'

    Raises:
        RegimeError: t < 10τ without allow_short_time
        IntegratorError: ODE integration failed or lost the population
    """
    if method not in LINDBLAD_METHODS:
        raise DecoherenceError(f"method: expected one of {', '.join(LINDBLAD_METHODS)}, got '{method}'")
    check_regime(params.t, params.tau, params.allow_short_time)

    system = prepare_cycle(params)
    hamiltonian, jump, rho0 = cycle_operators(system)
    generator = liouvillian(hamiltonian, jump, 1.0 / params.tau)

    evolve = _evolve_expm if method == 'expm' else _evolve_ode
    dim = hamiltonian.shape[0]
    rho = evolve(generator, rho0, params.t).reshape(dim, dim, order='F')

    ground = rho[EXCITED_DIM:, EXCITED_DIM:]
    emitted = float(np.real(np.trace(ground)))
    if params.t > 0 and not emitted > 0:
        raise IntegratorError(f"lindblad: ground population {emitted:.3g} is not positive at t={params.t:.3g} s")
    if params.t == 0:
        psi = system.isometry @ system.chi
        ground = np.outer(psi, psi.conj())

    outcome = outcome_from_ground(ground, system, f"lindblad-{method}")
    outcome.metadata['emitted_population'] = emitted
    return outcome


def trace_distance(rho_a: np.ndarray, rho_b: np.ndarray) -> float:
    """½‖ρ_a − ρ_b‖₁"""
    diff = np.asarray(rho_a) - np.asarray(rho_b)
    return float(0.5 * np.sum(np.abs(np.linalg.eigvalsh(0.5 * (diff + diff.conj().T)))))
