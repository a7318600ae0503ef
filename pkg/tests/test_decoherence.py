from concurrent.futures import ThreadPoolExecutor
from threading import Barrier

import numpy as np
import pytest
from scipy.integrate import quad_vec
from scipy.linalg import expm

from conftest import random_unit
from tcentre.decoherence import (
    CycleOutcome,
    CycleParams,
    DecoherenceError,
    EffectiveFieldGeometry,
    RegimeError,
    ZeroProjectionError,
    corrected_flip_limit,
    cycle_density_matrix,
    cyclicity,
    effective_field_geometry,
    excited_state_moment,
    flip_probability_curve,
    flip_probability_limit,
    flip_population_limit,
    moment_limit,
    prepare_cycle,
    projection_mixing,
    short_lifetime_infidelity,
    trajectory_state,
)
from tcentre.decoherence import cycle
from tcentre.spectra import SecularRegimeError
from tcentre.spin_core import build_excited_nuclear_hamiltonian, build_ground_hamiltonian

# Long lifetime at 1 T: τ·γ_n|B|/2π ≈ 425
LONG_TAU = 1e-5


def _geometry(theta_q):
    zero = np.zeros(3)
    return EffectiveFieldGeometry(field=np.array([0, 0, 1.0]), electron_field=zero,
                                  effective_field=zero, theta_q=theta_q)


def _long_cycle(b, tensor, **kwargs):
    return CycleParams(tau=LONG_TAU, t=20 * LONG_TAU, field=b, tensor=tensor, **kwargs)


# ==================== GEOMETRY ====================

@pytest.mark.parametrize("index", [0, 1, 2])
def test_theta_q_vanishes_on_hyperfine_axes(measured, index):
    geometry = effective_field_geometry(measured.principal_axis(index), measured)
    assert geometry.theta_q < 1e-12
    assert abs(geometry.a - 1.0) < 1e-15
    assert flip_probability_limit(geometry) < 1e-15


def test_theta_q_vanishes_without_hyperfine(zero_tensor, rng):
    geometry = effective_field_geometry(random_unit(rng), zero_tensor)
    assert geometry.theta_q == 0.0
    assert np.allclose(geometry.effective_field, geometry.field)


def test_theta_q_along_001_from_vector_arithmetic(measured, constants):
    a = measured.crystal_matrix()
    f = -(0.5 * np.array([0.0, 0.0, 1.0]) @ a) / constants.gamma_n
    b_eff = np.array([0.0, 0.0, 1.0]) + f
    expected = np.arccos(b_eff[2] / np.linalg.norm(b_eff))

    geometry = effective_field_geometry([0, 0, 1.0], measured)
    assert abs(geometry.theta_q - expected) < 1e-12
    assert 0.01 < geometry.theta_q < 0.1

    outcome = cycle_density_matrix(_long_cycle([0, 0, 1.0], measured))
    limit = flip_probability_limit(geometry)
    assert abs(outcome.p_flip - limit) < 1e-3
    assert abs(outcome.p_flip / limit - 1.0) < 0.02


def test_down_branch_field_points_the_other_way(measured):
    up = effective_field_geometry([0, 0, 1.0], measured, 'up')
    down = effective_field_geometry([0, 0, 1.0], measured, 'down')
    assert np.allclose(up.electron_field, -down.electron_field)


def test_geometry_below_secular_guard(measured):
    with pytest.raises(SecularRegimeError):
        effective_field_geometry([0, 0, 1e-3], measured)


def test_geometry_rejects_unknown_branch(measured):
    with pytest.raises(DecoherenceError):
        effective_field_geometry([0, 0, 1.0], measured, 'sideways')


def test_flip_limits_at_extremes():
    assert flip_probability_limit(_geometry(0.0)) == 0.0
    assert abs(flip_probability_limit(_geometry(np.pi / 2)) - 1.0) < 1e-15
    assert abs(flip_population_limit(_geometry(np.pi / 2)) - 0.5) < 1e-15
    assert abs(moment_limit(_geometry(np.pi / 2))) < 1e-15


def test_flip_limit_is_sin_squared(rng):
    for theta in rng.uniform(0, np.pi, size=200):
        geometry = _geometry(theta)
        assert abs(flip_probability_limit(geometry) - np.sin(theta) ** 2) < 1e-15
        assert 0.0 <= geometry.a <= 1.0


def test_corrected_limit_small_angle():
    for theta in (1e-3, 1e-2, 5e-2):
        assert abs(corrected_flip_limit(_geometry(theta)) / (2 * np.sin(theta / 2) ** 2) - 1.0) < 2 * theta ** 2


# ==================== PARAMETERS ====================

@pytest.mark.parametrize("kwargs", [
    {'tau': 0.0},
    {'t': -1e-9},
    {'initial_state': 'sideways'},
    {'initial_state': [1.0, 0.0, 0.0]},
    {'initial_state': [0.0, 0.0]},
    {'electron_branch': 'left'},
])
def test_cycle_params_validation(measured, kwargs):
    settings = dict(tau=1e-8, t=2e-7, field=[0, 0, 1.0], tensor=measured)
    settings.update(kwargs)
    with pytest.raises(DecoherenceError):
        CycleParams(**settings)


def test_unresolved_flag(measured):
    assert CycleParams(tau=1e-9, t=1e-7, field=[0, 0, 1.0], tensor=measured).hyperfine_unresolved
    assert not CycleParams(tau=1e-7, t=1e-6, field=[0, 0, 1.0], tensor=measured).hyperfine_unresolved


def test_resolved_lifetime_warns_once_across_threads(measured, monkeypatch, caplog):
    monkeypatch.setattr(cycle, '_warned_resolved', set())
    params = CycleParams(tau=1e-7, t=1e-6, field=[0, 0, 1.0], tensor=measured)
    barrier = Barrier(8)

    def warn(_):
        barrier.wait()
        cycle._warn_resolved(params)

    with caplog.at_level('WARNING', logger='tcentre.decoherence.cycle'):
        with ThreadPoolExecutor(max_workers=8) as pool:
            list(pool.map(warn, range(8)))
    resolved = [r for r in caplog.records if 'resolves the hyperfine splitting' in r.getMessage()]
    assert len(resolved) == 1


def test_regime_guard(measured):
    params = CycleParams(tau=1e-8, t=5e-8, field=[0, 0, 1.0], tensor=measured)
    with pytest.raises(RegimeError):
        cycle_density_matrix(params)
    relaxed = CycleParams(tau=1e-8, t=5e-8, field=[0, 0, 1.0], tensor=measured, allow_short_time=True)
    assert 0.0 <= cycle_density_matrix(relaxed).p_flip <= 1.0


def test_zero_projection_is_an_error(measured):
    params = CycleParams(tau=1e-8, t=2e-7, field=[0, 0, 1.0], tensor=measured, initial_state=[0, 0, 1, 0])
    with pytest.raises(ZeroProjectionError):
        prepare_cycle(params)


def test_cyclicity_sentinel():
    outcome = CycleOutcome(rho=np.eye(2) / 2, rho_ground=np.eye(4) / 4, p_flip=0.0,
                           fidelity=1.0, purity=1.0, mean_phase=0.0)
    assert outcome.cyclicity == float('inf')
    outcome.p_flip = 0.25
    assert outcome.cyclicity == 4.0


# ==================== TRAJECTORIES ====================

def test_trajectory_matches_matrix_products(measured, constants):
    b = [0.0, 0.0, 1.0]
    params = CycleParams(tau=1e-8, t=1e-7, field=b, tensor=measured, initial_state='plus')
    system = prepare_cycle(params)
    h_e = build_ground_hamiltonian(b, measured, constants).matrix
    h_h = build_excited_nuclear_hamiltonian(b, constants).matrix

    for emission in (0.0, 3e-9, 1e-8, 4.2e-8, 1e-7):
        expected = expm(-1j * h_e * (params.t - emission)) @ system.isometry @ expm(-1j * h_h * emission) @ system.chi
        expected /= np.linalg.norm(expected)
        assert np.allclose(trajectory_state(params, emission, system), expected, atol=1e-9)


def test_trajectory_at_time_zero_keeps_nuclear_state(measured):
    params = CycleParams(tau=1e-8, t=0.0, field=[0.2, 0.1, 0.9], tensor=measured, initial_state='plus')
    system = prepare_cycle(params)
    psi = trajectory_state(params, 0.0, system)
    assert np.allclose(system.isometry.conj().T @ psi, system.chi, atol=1e-12)


def test_trajectory_without_hyperfine_is_free_precession(zero_tensor):
    params = CycleParams(tau=1e-8, t=1e-7, field=[0.3, 0.1, 0.5], tensor=zero_tensor, initial_state='plus')
    system = prepare_cycle(params)
    for emission in (0.0, 2e-8, 1e-7):
        overlap = np.vdot(system.ideal_state, trajectory_state(params, emission, system))
        assert abs(abs(overlap) - 1.0) < 1e-10


def test_trajectory_rejects_emission_outside_window(measured):
    params = CycleParams(tau=1e-8, t=1e-7, field=[0, 0, 1.0], tensor=measured)
    with pytest.raises(DecoherenceError):
        trajectory_state(params, 2e-7)


def test_closed_form_mixture_matches_quadrature(measured):
    params = CycleParams(tau=1e-8, t=1.2e-7, field=5e-3 * np.array([0.48, -0.36, 0.8]),
                         tensor=measured, initial_state='plus')
    system = prepare_cycle(params)

    def integrand(emission):
        psi = trajectory_state(params, emission, system)
        rho = np.exp(-emission / params.tau) / params.tau * np.outer(psi, psi.conj())
        return np.concatenate([rho.real.ravel(), rho.imag.ravel()])

    values, _ = quad_vec(integrand, 0.0, params.t, epsabs=1e-12, epsrel=1e-10, norm='max')
    weight = -np.expm1(-params.t / params.tau)
    expected = (values[:16] + 1j * values[16:]).reshape(4, 4) / weight

    outcome = cycle_density_matrix(params, system)
    assert np.allclose(outcome.rho_ground, expected, atol=1e-8)


# ==================== OUTCOMES ====================

def test_outcome_invariants(measured, rng):
    for b_magnitude in (0.05, 1.0):
        for tau in (1e-9, 1e-7):
            for selector in ('lower', 'upper', 'plus'):
                params = CycleParams(tau=tau, t=20 * tau, field=b_magnitude * random_unit(rng),
                                     tensor=measured, initial_state=selector)
                outcome = cycle_density_matrix(params)
                rho = outcome.rho
                assert np.allclose(rho, rho.conj().T, atol=1e-12)
                assert abs(np.trace(rho) - 1.0) < 1e-10
                values = np.linalg.eigvalsh(rho)
                assert values.min() > -1e-10 and values.max() < 1 + 1e-10
                assert 0.0 <= outcome.p_flip <= 1.0
                assert 0.0 <= outcome.fidelity <= 1.0
                assert 0.0 <= outcome.purity <= 1.0


def test_no_hyperfine_keeps_memory(zero_tensor):
    params = CycleParams(tau=1e-8, t=2e-7, field=[0, 0, 1.0], tensor=zero_tensor, initial_state='plus')
    outcome = cycle_density_matrix(params)
    assert abs(outcome.fidelity - 1.0) < 1e-10
    assert abs(outcome.purity - 1.0) < 1e-10
    assert outcome.p_flip < 1e-12


def test_cyclicity_peaks_on_hyperfine_axis(measured, rng):
    on_axis = cyclicity(CycleParams(tau=1e-8, t=1e-7, field=measured.principal_axis(0), tensor=measured))
    assert on_axis > 1e8
    for _ in range(5):
        off_axis = cyclicity(CycleParams(tau=1e-8, t=1e-7, field=random_unit(rng), tensor=measured))
        assert off_axis < on_axis


def test_long_lifetime_flip_probability(measured, rng):
    for _ in range(20):
        b = random_unit(rng)
        geometry = effective_field_geometry(b, measured)
        limit = flip_probability_limit(geometry)
        outcome = cycle_density_matrix(_long_cycle(b, measured))
        assert abs(outcome.p_flip - limit) < 1e-3
        if limit > 2e-4:
            assert abs(outcome.p_flip / limit - 1.0) < 0.05
        assert np.isclose(outcome.flip_population, 0.5 * outcome.p_flip)


def test_short_lifetime_infidelity_benchmark():
    assert 0.5e-4 <= short_lifetime_infidelity(300e3, 10e-9) <= 5e-4
    assert 0.5e-4 <= short_lifetime_infidelity(3e6, 1e-9) <= 5e-4
    assert np.isclose(short_lifetime_infidelity(300e3, 10e-9, corrected=True),
                      0.5 * short_lifetime_infidelity(300e3, 10e-9))


def test_flip_curve_is_monotone(measured, rng):
    tau = 1e-7
    params = CycleParams(tau=tau, t=20 * tau, field=0.2 * random_unit(rng), tensor=measured)
    times = np.linspace(0.0, 20 * tau, 41)
    curve = flip_probability_curve(params, times)
    assert curve[0] == 0.0
    assert np.all(np.diff(curve) >= -1e-14)

    final = cycle_density_matrix(params).p_flip * -np.expm1(-20.0)
    assert np.isclose(curve[-1], final, rtol=1e-3)


def test_flip_curve_rejects_negative_time(measured):
    params = CycleParams(tau=1e-8, t=2e-7, field=[0, 0, 1.0], tensor=measured)
    with pytest.raises(DecoherenceError):
        flip_probability_curve(params, [0.0, -1e-9])


def test_excited_moment_contracts(measured, rng):
    for _ in range(5):
        b = random_unit(rng)
        moment = excited_state_moment(_long_cycle(b, measured))
        expected = moment_limit(effective_field_geometry(b, measured))
        assert abs(np.linalg.norm(moment) - expected) < 1e-3
        assert abs(abs(moment @ b) - np.linalg.norm(moment)) < 1e-3


def test_projection_mixing_is_small_at_high_field(measured):
    params = CycleParams(tau=1e-8, t=2e-7, field=[0, 0, 1.0], tensor=measured)
    assert 0.0 <= projection_mixing(params) < 1e-6
