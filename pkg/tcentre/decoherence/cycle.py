"""
Optical Cycle Trajectories
==========================
Nuclear memory through one excitation-emission cycle.

The electron is excited at t=0 from branch |e⟩ to the hole state |h⟩, the hydrogen precesses
under the excited nuclear Hamiltonian until emission at T, then evolves under the ground
Hamiltonian until t:

    |ψ_T⟩ = U_e(t−T) E U_h(T) χ,      E = |e⟩⊗1,  χ = E†ψ₀ / |E†ψ₀|

The mixed state weights the trajectories by the emission density e^{−T/τ}/τ, conditioned on
emission by t. Every integral is done in the eigenbases of H_e and H_h, where each matrix
element reduces to (1 − e^{−t/τ}e^{iΩt}) / (1 − iΩτ).
"""
import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Dict, Optional, Sequence, Union

import numpy as np

from tcentre.config import NUMERICS_CONFIG
from tcentre.spectra import branch_eigensystem, max_abs_hyperfine
from tcentre.spin_core import (
    PhysicalConstants,
    Eigensystem,
    get_constants,
    build_ground_hamiltonian,
    build_excited_nuclear_hamiltonian,
    eigensystem,
    propagator,
    field_vector,
    SPIN_HALF,
    RAD_S_TO_MHZ,
)
from .errors import DecoherenceError, RegimeError, ZeroProjectionError
from .geometry import branch_isometry, branch_nuclear_hamiltonian, branch_sign, reduced_branch_basis

logger = logging.getLogger(__name__)

INITIAL_SELECTORS = ('lower', 'upper', 'plus')
ZERO_NORM = 1e-12

_warned_resolved: set = set()
_warned_lock = threading.Lock()


# ==================== PARAMETERS ====================

@dataclass(frozen=True)
class CycleParams:
    """One optical cycle of the T centre memory"""
    tau: float                                   # excited-state lifetime (s)
    t: float                                     # total evolution time (s)
    field: Any                                   # MagneticField or 3-vector (tesla)
    tensor: Any                                  # HyperfineTensor or crystal-frame array (rad/s)
    electron_branch: str = 'up'
    hole_branch: str = 'up'                      # label only: TX0 carries no hole hyperfine
    initial_state: Union[str, Sequence[complex]] = 'lower'
    allow_short_time: bool = False
    constants: Optional[PhysicalConstants] = None

    def __post_init__(self):
        if not self.tau > 0:
            raise DecoherenceError(f"tau: must be > 0 s, got {self.tau}")
        if not self.t >= 0:
            raise DecoherenceError(f"t: must be ≥ 0 s, got {self.t}")
        branch_sign(self.electron_branch)
        if self.hole_branch not in ('up', 'down'):
            raise DecoherenceError(f"hole_branch must be 'up' or 'down', got '{self.hole_branch}'")
        if isinstance(self.initial_state, str):
            if self.initial_state not in INITIAL_SELECTORS:
                raise DecoherenceError(
                    f"initial_state: unknown selector '{self.initial_state}' (use {', '.join(INITIAL_SELECTORS)})"
                )
        else:
            state = np.asarray(self.initial_state, dtype=complex).reshape(-1)
            if state.size not in (2, 4):
                raise DecoherenceError(f"initial_state: expected 2 or 4 amplitudes, got {state.size}")
            if np.linalg.norm(state) < ZERO_NORM:
                raise DecoherenceError("initial_state: zero vector")

    @property
    def hyperfine_unresolved(self) -> bool:
        """Lifetime short against the hyperfine period: 2πτ < 0.1/max|A|"""
        a_hz = max_abs_hyperfine(self.tensor) / (2.0 * np.pi)
        return a_hz == 0.0 or 2.0 * np.pi * self.tau < 0.1 / a_hz

    def to_dict(self) -> Dict[str, Any]:
        state = self.initial_state
        if not isinstance(state, str):
            state = [[float(np.real(z)), float(np.imag(z))] for z in np.asarray(state).reshape(-1)]
        return {
            'tau_s': self.tau,
            't_s': self.t,
            'B_T': field_vector(self.field).tolist(),
            'electron_branch': self.electron_branch,
            'hole_branch': self.hole_branch,
            'initial_state': state,
            'allow_short_time': self.allow_short_time,
        }


@dataclass
class CycleOutcome:
    """Nuclear state after the cycle and the metrics derived from it"""
    rho: np.ndarray               # 2x2 nuclear density matrix, conditioned on the electron branch
    rho_ground: np.ndarray        # 4x4 ground-state density matrix
    p_flip: float
    fidelity: float
    purity: float
    mean_phase: float             # rad, coherence phase relative to the ideal evolution
    method: str = 'trajectory'
    metadata: Dict[str, Any] = field(default_factory=dict)

    @property
    def infidelity(self) -> float:
        return 1.0 - self.fidelity

    @property
    def flip_population(self) -> float:
        """Population moved out of the initial branch eigenstates"""
        return 0.5 * self.p_flip

    @property
    def cyclicity(self) -> float:
        floor = NUMERICS_CONFIG.get("CYCLICITY_FLOOR", 1e-15)
        return float('inf') if self.p_flip < floor else 1.0 / self.p_flip

    def to_dict(self) -> Dict[str, Any]:
        return {
            'method': self.method,
            'p_flip': self.p_flip,
            'flip_population': self.flip_population,
            'cyclicity': self.cyclicity,
            'fidelity': self.fidelity,
            'infidelity': self.infidelity,
            'purity': self.purity,
            'mean_phase_rad': self.mean_phase,
            **self.metadata,
        }


# ==================== PREPARED SYSTEM ====================

@dataclass(frozen=True)
class CycleSystem:
    """Hamiltonians, eigenbases and initial state of a cycle"""
    params: CycleParams
    direction: np.ndarray
    ground: Eigensystem           # H_e, 4x4
    excited: Eigensystem          # H_h, 2x2
    isometry: np.ndarray          # E = |e⟩⊗1, 4x2
    psi0: np.ndarray              # initial ground state, 4
    chi: np.ndarray               # normalised nuclear state after excitation, 2
    branch_vectors: np.ndarray    # exact branch eigenstates, 4x2
    nuclear_basis: np.ndarray     # branch eigenstates reduced onto |e⟩, 2x2
    h_branch: np.ndarray          # 2x2 nuclear Hamiltonian of the branch

    @property
    def ideal_state(self) -> np.ndarray:
        """U_e(t)ψ₀"""
        return propagator(None, self.params.t, self.ground) @ self.psi0


def _initial_ground_state(params: CycleParams, vectors: np.ndarray, isometry: np.ndarray) -> np.ndarray:
    state = params.initial_state
    if isinstance(state, str):
        if state == 'lower':
            return vectors[:, 0]
        if state == 'upper':
            return vectors[:, 1]
        return (vectors[:, 0] + vectors[:, 1]) / np.sqrt(2.0)

    amplitudes = np.asarray(state, dtype=complex).reshape(-1)
    amplitudes = amplitudes / np.linalg.norm(amplitudes)
    if amplitudes.size == 2:
        return isometry @ amplitudes
    return amplitudes


def prepare_cycle(params: CycleParams) -> CycleSystem:
    """
    Diagonalise both Hamiltonians and project the initial state

    Raises:
        SecularRegimeError: electron branches cannot be identified
        ZeroProjectionError: initial state orthogonal to the coupled branch
    """
    c = get_constants() if params.constants is None else params.constants
    bvec = field_vector(params.field)
    branches = branch_eigensystem(bvec, params.tensor, c)
    direction = branches.direction
    branch = params.electron_branch

    h_ground = build_ground_hamiltonian(bvec, params.tensor, c)
    isometry = branch_isometry(direction, branch)
    vectors = branches.vectors[branch]

    psi0 = _initial_ground_state(params, vectors, isometry)
    projected = isometry.conj().T @ psi0
    norm = np.linalg.norm(projected)
    if norm < ZERO_NORM:
        raise ZeroProjectionError(
            f"initial_state: no weight in electron branch '{branch}' (|E†ψ₀| = {norm:.3g})"
        )

    return CycleSystem(
        params=params,
        direction=direction,
        ground=eigensystem(h_ground),
        excited=eigensystem(build_excited_nuclear_hamiltonian(bvec, c)),
        isometry=isometry,
        psi0=psi0,
        chi=projected / norm,
        branch_vectors=vectors,
        nuclear_basis=reduced_branch_basis(vectors, isometry),
        h_branch=branch_nuclear_hamiltonian(h_ground, direction, branch),
    )


def check_regime(t: float, tau: float, allow_short_time: bool = False) -> None:
    """
    Enforce t ≥ REGIME_MIN_T_OVER_TAU·τ

    Raises:
        RegimeError: guard violated without override
    """
    ratio = NUMERICS_CONFIG.get("REGIME_MIN_T_OVER_TAU", 10.0)
    # relative slack so t = 10τ written in decimal passes
    if t >= ratio * tau * (1.0 - 1e-12):
        return
    message = f"t: {t:.4g} s is below {ratio:g}·tau = {ratio * tau:.4g} s"
    if not allow_short_time:
        raise RegimeError(message)
    logger.warning(f"⚠️ Regime override: {message}")


def _warn_resolved(params: CycleParams) -> None:
    if params.hyperfine_unresolved:
        return
    with _warned_lock:
        if params.tau in _warned_resolved:
            return
        _warned_resolved.add(params.tau)
    logger.warning(f"⚠️ tau={params.tau:.3g} s resolves the hyperfine splitting (2πτ ≥ 0.1/max|A|); "
                   "the unresolved-emission picture is approximate")


# ==================== CLOSED FORMS ====================

def lifetime_average(omega: np.ndarray, t: float, tau: float) -> np.ndarray:
    """(1/τ)∫₀ᵗ e^{−T/τ} e^{iΩT} dT = (1 − e^{−t/τ}e^{iΩt}) / (1 − iΩτ)"""
    omega = np.asarray(omega, dtype=float)
    return (1.0 - np.exp(-t / tau) * np.exp(1j * omega * t)) / (1.0 - 1j * omega * tau)


def emission_weight(t: float, tau: float) -> float:
    """Probability of emission by t"""
    return float(-np.expm1(-t / tau))


def trajectory_state(params: CycleParams, emission_time: float, system: CycleSystem = None) -> np.ndarray:
    """
    Ground state at t for emission at T

    Returns:
        normalised 4-vector U_e(t−T) E U_h(T) χ

    Raises:
        DecoherenceError: T outside [0, t]
        ZeroProjectionError: initial state orthogonal to the coupled branch
    """
    if not 0.0 <= emission_time <= params.t:
        raise DecoherenceError(f"T: emission time {emission_time} outside [0, {params.t}]")
    system = prepare_cycle(params) if system is None else system
    u_h = propagator(None, emission_time, system.excited)
    u_e = propagator(None, params.t - emission_time, system.ground)
    psi = u_e @ system.isometry @ u_h @ system.chi
    return psi / np.linalg.norm(psi)


def trajectory_mixture(system: CycleSystem) -> np.ndarray:
    """Emission-conditioned 4x4 ground density matrix in closed form"""
    t, tau = system.params.t, system.params.tau
    weight = emission_weight(t, tau)
    if weight == 0.0:
        psi = system.isometry @ system.chi
        return np.outer(psi, psi.conj())

    lam, v = system.ground.eigenvalues, system.ground.eigenvectors
    mu, w = system.excited.eigenvalues, system.excited.eigenvectors

    coupling = v.conj().T @ system.isometry @ w                 # (k, j)
    amps = coupling * (w.conj().T @ system.chi)[None, :]        # c_kj
    rate = lam[:, None] - mu[None, :]                           # λ_k − μ_j
    omega = rate[:, :, None, None] - rate[None, None, :, :]     # (k, j, l, m)
    kernel = lifetime_average(omega, t, tau)

    rho_v = np.einsum('kj,lm,kjlm->kl', amps, amps.conj(), kernel)
    rho_v *= np.exp(-1j * (lam[:, None] - lam[None, :]) * t)
    rho = v @ rho_v @ v.conj().T / weight
    return 0.5 * (rho + rho.conj().T)


# ==================== METRICS ====================

def _normalise(rho: np.ndarray) -> np.ndarray:
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.real(np.trace(rho))


def condition_on_branch(rho_ground: np.ndarray, isometry: np.ndarray) -> np.ndarray:
    """Nuclear state given the electron is found in the coupled branch"""
    return _normalise(isometry.conj().T @ rho_ground @ isometry)


def nuclear_metrics(rho: np.ndarray, ideal: np.ndarray, reference: np.ndarray,
                    basis: np.ndarray) -> Dict[str, float]:
    """
    Outcome metrics of a 2x2 nuclear state

    Args:
        rho: nuclear density matrix
        ideal: normalised ideal nuclear state at t
        reference: normalised initial nuclear state (populations are compared against it)
        basis: branch nuclear eigenbasis, columns
    """
    fidelity = float(np.real(ideal.conj() @ rho @ ideal))
    purity = float(np.real(np.trace(rho @ rho)))

    populations = np.real(np.einsum('ik,ij,jk->k', basis.conj(), rho, basis))
    initial = np.abs(basis.conj().T @ reference) ** 2
    p_flip = float(np.sum(np.abs(populations - initial)))

    coherence = basis[:, 0].conj() @ rho @ basis[:, 1]
    ideal_amps = basis.conj().T @ ideal
    ideal_coherence = ideal_amps[0] * np.conj(ideal_amps[1])
    if abs(coherence) > ZERO_NORM and abs(ideal_coherence) > ZERO_NORM:
        mean_phase = float(np.angle(coherence * np.conj(ideal_coherence)))
    else:
        mean_phase = 0.0

    return {
        'fidelity': float(np.clip(fidelity, 0.0, 1.0)),
        'purity': float(np.clip(purity, 0.0, 1.0)),
        'p_flip': float(np.clip(p_flip, 0.0, 1.0)),
        'mean_phase': mean_phase,
    }


def ideal_nuclear_state(system: CycleSystem) -> np.ndarray:
    ideal = system.isometry.conj().T @ system.ideal_state
    return ideal / np.linalg.norm(ideal)


def outcome_from_ground(rho_ground: np.ndarray, system: CycleSystem, method: str) -> CycleOutcome:
    """Condition a ground density matrix on the branch and derive the cycle metrics"""
    rho_ground = _normalise(rho_ground)
    rho = condition_on_branch(rho_ground, system.isometry)
    metrics = nuclear_metrics(rho, ideal_nuclear_state(system), system.chi, system.nuclear_basis)
    return CycleOutcome(rho=rho, rho_ground=rho_ground, method=method, **metrics)


def cycle_density_matrix(params: CycleParams, system: CycleSystem = None) -> CycleOutcome:
    """
    Emission-weighted mixture of trajectories and its metrics

    Raises:
        RegimeError: t < 10τ without allow_short_time
        ZeroProjectionError: initial state orthogonal to the coupled branch
        SecularRegimeError: below the secular guard
    """
    check_regime(params.t, params.tau, params.allow_short_time)
    _warn_resolved(params)
    system = prepare_cycle(params) if system is None else system
    return outcome_from_ground(trajectory_mixture(system), system, 'trajectory')


def cyclicity(params: CycleParams) -> float:
    """C = 1/P_flip, or +∞ when P_flip is below CYCLICITY_FLOOR"""
    return cycle_density_matrix(params).cyclicity


def flip_population(params: CycleParams) -> float:
    return cycle_density_matrix(params).flip_population


def flip_probability_curve(params: CycleParams, times: Sequence[float]) -> np.ndarray:
    """
    Cumulative flip probability with unnormalised lifetime weights

    2·(1/τ)∫₀ᵗ e^{−T/τ} (p₀ − q(T)) dT, where q(T) is the population of the dominant initial
    branch eigenstate after emission at T and p₀ its initial value. Non-decreasing for
    eigenstate starts; tends to (1 − e^{−t/τ})·P_flip.
    """
    system = prepare_cycle(params)
    tau = params.tau
    mu, w = system.excited.eigenvalues, system.excited.eigenvectors

    start = system.isometry @ system.chi
    initial = np.abs(system.branch_vectors.conj().T @ start) ** 2
    k = int(np.argmax(initial))

    d = (system.branch_vectors[:, k].conj() @ system.isometry @ w) * (w.conj().T @ system.chi)
    omega = mu[None, :] - mu[:, None]                       # μ_m − μ_j
    curve = []
    for t in np.asarray(times, dtype=float).reshape(-1):
        if t < 0:
            raise DecoherenceError(f"times: must be ≥ 0 s, got {t}")
        kept = np.real(np.sum(np.outer(d, d.conj()) * lifetime_average(omega, t, tau)))
        curve.append(2.0 * (initial[k] * emission_weight(t, tau) - kept))
    return np.clip(np.array(curve), 0.0, None)


def excited_state_moment(params: CycleParams) -> np.ndarray:
    """
    Emission-averaged nuclear moment ⟨I⟩ in the excited state (3-vector)

    Its long-lifetime magnitude is ½|2a−1|.
    """
    system = prepare_cycle(params)
    t, tau = params.t, params.tau
    mu, w = system.excited.eigenvalues, system.excited.eigenvectors
    x = w.conj().T @ system.chi

    weight = emission_weight(t, tau)
    if weight == 0.0:
        sigma = np.outer(system.chi, system.chi.conj())
    else:
        sigma_w = np.outer(x, x.conj()) * lifetime_average(mu[None, :] - mu[:, None], t, tau) / weight
        sigma = w @ sigma_w @ w.conj().T
    return np.real(np.einsum('ij,kji->k', sigma, SPIN_HALF))


def projection_mixing(params: CycleParams) -> float:
    """Weight of ψ₀ lost to the partial projection onto |e⟩, 1 − |E†ψ₀|²"""
    system = prepare_cycle(params)
    overlap = np.linalg.norm(system.isometry.conj().T @ system.psi0)
    return float(max(0.0, 1.0 - overlap ** 2))


def short_lifetime_infidelity(delta_h_hz: float, tau: float, corrected: bool = False) -> float:
    """
    Dephasing infidelity for τ·δ_h ≪ 1

    ½(2πδ_hτ)² uncorrected, ¼(2πδ_hτ)² after the average-unitary correction.
    """
    x = 2.0 * np.pi * delta_h_hz * tau
    return (0.25 if corrected else 0.5) * x * x


def delta_h_hz(system: CycleSystem) -> float:
    """Branch nuclear splitting minus the bare Larmor splitting, Hz"""
    c = get_constants() if system.params.constants is None else system.params.constants
    levels = np.linalg.eigvalsh(system.h_branch)
    b = np.linalg.norm(field_vector(system.params.field))
    return float((levels[1] - levels[0] - c.gamma_n * b) * RAD_S_TO_MHZ * 1e6)
