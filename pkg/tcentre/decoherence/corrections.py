"""
Memory Corrections
==================
Unitary corrections applied to the nuclear memory after an optical cycle.

- average_unitary: U_avg = (1/τ)∫₀ᵗ e^{−T/τ} U_e(t−T) U_h(T) dT, generally not unitary
- correction_unitary: U_e(t)·W†, with W the unitary factor of the polar decomposition
  U_avg = W·P (nearest unitary to U_avg)
- detection_correction: exact inverse of one trajectory when its emission time is known
- detection_feedback_outcome: ensemble where a fraction of emissions is time-resolved
"""
import logging

import numpy as np
from scipy.integrate import quad_vec
from scipy.linalg import polar

from tcentre.spin_core import eigensystem, propagator
from .cycle import (
    CycleOutcome,
    CycleParams,
    check_regime,
    cycle_density_matrix,
    ideal_nuclear_state,
    lifetime_average,
    nuclear_metrics,
    prepare_cycle,
    trajectory_state,
)
from .errors import DecoherenceError, SingularAverageError

logger = logging.getLogger(__name__)

# Smallest singular value of U_avg relative to the largest
SINGULAR_RTOL = 1e-12


def average_unitary(t: float, tau: float, h_e, h_h, allow_short_time: bool = False) -> np.ndarray:
    """
    Emission-averaged evolution operator in closed form

    Args:
        t: total time (s)
        tau: excited-state lifetime (s)
        h_e: ground Hamiltonian acting after emission (rad/s)
        h_h: excited Hamiltonian acting before emission (rad/s), same dimension

    Raises:
        RegimeError: t < 10τ without allow_short_time
    """
    check_regime(t, tau, allow_short_time)
    ground, excited = eigensystem(h_e), eigensystem(h_h)
    v, lam = ground.eigenvectors, ground.eigenvalues
    w, mu = excited.eigenvectors, excited.eigenvalues
    if v.shape != w.shape:
        raise DecoherenceError(f"h_e and h_h dimensions differ: {v.shape} vs {w.shape}")

    kernel = lifetime_average(lam[:, None] - mu[None, :], t, tau)
    middle = np.exp(-1j * lam * t)[:, None] * kernel * (v.conj().T @ w)
    return v @ middle @ w.conj().T


def correction_unitary(t: float, tau: float, h_e, h_h, allow_short_time: bool = False) -> np.ndarray:
    """
    Unitary undoing the average excursion: U_corr = U_e(t)·W†

    Raises:
        SingularAverageError: U_avg is singular (complete dephasing)
    """
    u_avg = average_unitary(t, tau, h_e, h_h, allow_short_time)
    singular = np.linalg.svd(u_avg, compute_uv=False)
    if singular[-1] <= SINGULAR_RTOL * singular[0]:
        raise SingularAverageError(
            f"average evolution is singular (σ_min/σ_max = {singular[-1] / singular[0]:.3g}); "
            "the memory has dephased completely"
        )
    unitary, _ = polar(u_avg)
    return propagator(h_e, t) @ unitary.conj().T


def detection_correction(t: float, emission_time: float, h_e, h_h) -> np.ndarray:
    """
    Exact inverse of one trajectory, U_h†(T)·U_e†(t−T)

    Raises:
        DecoherenceError: T outside [0, t]
    """
    if not 0.0 <= emission_time <= t:
        raise DecoherenceError(f"T: emission time {emission_time} outside [0, {t}]")
    u_h = propagator(h_h, emission_time)
    u_e = propagator(h_e, t - emission_time)
    return u_h.conj().T @ u_e.conj().T


def corrected_outcome(params: CycleParams) -> CycleOutcome:
    """Cycle outcome after the average-unitary correction on the branch nuclear space"""
    system = prepare_cycle(params)
    outcome = cycle_density_matrix(params, system)

    h_excited = (system.excited.eigenvectors * system.excited.eigenvalues) @ system.excited.eigenvectors.conj().T
    correction = correction_unitary(params.t, params.tau, system.h_branch, h_excited, params.allow_short_time)

    rho = correction @ outcome.rho @ correction.conj().T
    rho = 0.5 * (rho + rho.conj().T)
    metrics = nuclear_metrics(rho, ideal_nuclear_state(system), system.chi, system.nuclear_basis)
    logger.debug(f"🔧 Average correction: F {outcome.fidelity:.9f} → {metrics['fidelity']:.9f}")
    return CycleOutcome(rho=rho, rho_ground=outcome.rho_ground, method='average-correction', **metrics)


def detected_ensemble(params: CycleParams, system=None) -> np.ndarray:
    """
    Nuclear state of the time-resolved emissions after per-trajectory correction

    Each trajectory is reduced onto the coupled branch, undone with
    detection_correction(t, T) and evolved by the ideal branch propagator U_branch(t).
    The result is averaged over T with the emission weight e^{−T/τ}/τ.
    """
    system = prepare_cycle(params) if system is None else system
    t, tau = params.t, params.tau
    h_excited = (system.excited.eigenvectors * system.excited.eigenvalues) @ system.excited.eigenvectors.conj().T
    u_branch = propagator(system.h_branch, t)

    def integrand(emission_time):
        nuclear = system.isometry.conj().T @ trajectory_state(params, emission_time, system)
        restored = u_branch @ detection_correction(t, emission_time, system.h_branch, h_excited) @ nuclear
        block = np.exp(-emission_time / tau) / tau * np.outer(restored, restored.conj())
        return np.concatenate([block.real.ravel(), block.imag.ravel()])

    values, error = quad_vec(integrand, 0.0, t, epsabs=1e-9, epsrel=1e-8, norm='max')
    logger.debug(f"Detected ensemble integrated (error estimate {error:.2e})")
    rho = (values[:4] + 1j * values[4:]).reshape(2, 2)
    rho = 0.5 * (rho + rho.conj().T)
    return rho / np.real(np.trace(rho))


def detection_feedback_outcome(params: CycleParams, fraction: float) -> CycleOutcome:
    """
    Ensemble in which a fraction of emissions is time-resolved and corrected exactly

    Detected trajectories come from detected_ensemble; undetected ones keep the
    uncorrected mixture.

    Raises:
        DecoherenceError: fraction outside [0, 1]
    """
    if not 0.0 <= fraction <= 1.0:
        raise DecoherenceError(f"fraction: detection fraction must lie in [0, 1], got {fraction}")

    system = prepare_cycle(params)
    outcome = cycle_density_matrix(params, system)
    ideal = ideal_nuclear_state(system)

    rho = outcome.rho
    if fraction > 0.0:
        rho = (1.0 - fraction) * rho + fraction * detected_ensemble(params, system)
    metrics = nuclear_metrics(rho, ideal, system.chi, system.nuclear_basis)
    return CycleOutcome(rho=rho, rho_ground=outcome.rho_ground, method='detection-feedback',
                        metadata={'detection_fraction': fraction}, **metrics)
