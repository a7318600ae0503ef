import io

import numpy as np
import pytest

from tcentre.spectra import ensemble_transitions, transition_frequencies
from tcentre.spin_core import HyperfineTensor
from tcentre.tensor_fit import (
    DatasetParseError,
    DatasetValidationError,
    DatasetValidator,
    FitOptions,
    ResonanceDataset,
    TensorFitError,
    TensorFitService,
    UnderdeterminedFitError,
    assign_peaks,
    canonical_gamma,
    field_grid_sweep,
    mirror_gamma,
    read_dataset,
    synthesize_dataset,
    zero_field_candidates,
)

MEASURED = (4.037, -4.499, -2.927)
SWAPPED = (-4.499, 4.037, -2.927)


def _principal_error(principal):
    """Distance to the measured values in either X/Y order (the two orders are the γ mirror pair)"""
    p = np.asarray(principal)
    return min(np.max(np.abs(p - MEASURED)), np.max(np.abs(p - SWAPPED)))


@pytest.fixture
def service(constants):
    return TensorFitService(constants)


@pytest.fixture
def noiseless(measured):
    return synthesize_dataset(measured, field_grid_sweep(), sigma=0.003)


# ==================== DATASET ====================

def test_field_grid_sweep_layout():
    grid = field_grid_sweep()
    assert grid.shape == (25, 3)
    assert np.allclose(grid[0], 0.0)
    assert np.isclose(np.max(np.linalg.norm(grid, axis=1)), 2e-3)
    with pytest.raises(TensorFitError):
        field_grid_sweep(steps=1)


def test_synthesize_requires_sigma_without_noise(measured):
    with pytest.raises(TensorFitError):
        synthesize_dataset(measured, field_grid_sweep(3))


def test_synthesize_is_seeded(measured):
    a = synthesize_dataset(measured, field_grid_sweep(3), noise_rms=0.003, seed=5)
    b = synthesize_dataset(measured, field_grid_sweep(3), noise_rms=0.003, seed=5)
    assert a.to_csv() == b.to_csv()
    assert a.has_subsets
    assert set(a.subsets[:3]) == {'s0'}


def test_read_dataset_skips_comments(tmp_path):
    path = tmp_path / 'data.csv'
    path.write_text(
        "# sweep along 001\n"
        "Bx_T,By_T,Bz_T,freq_MHz,sigma_MHz,subset,pair\n"
        "0,0,0,3.482,0.003,s0,0-1\n"
        "# mid-file note\n"
        "0,0,0.001,3.9,0.003,s1,\n",
        encoding='utf-8',
    )
    dataset = read_dataset(path)
    assert len(dataset) == 2
    assert dataset.pairs == [(0, 1), None]
    assert dataset.subsets == ['s0', 's1']


def test_dataset_csv_written_and_read_back(noiseless):
    again = read_dataset(io.StringIO(noiseless.to_csv()))
    assert len(again) == len(noiseless)
    assert np.allclose(again.frequencies, noiseless.frequencies, atol=1e-9)
    assert again.subsets == noiseless.subsets


@pytest.mark.parametrize("text", [
    "Bx_T,By_T,Bz_T,freq_MHz\n0,0,0,3.4\n",
    "Bx_T,By_T,Bz_T,freq_MHz,sigma_MHz\n0,0,zero,3.4,0.003\n",
    "Bx_T,By_T,Bz_T,freq_MHz,sigma_MHz,pair\n0,0,0,3.4,0.003,0to1\n",
    "Bx_T,By_T,Bz_T,freq_MHz,sigma_MHz,colour\n0,0,0,3.4,0.003,red\n",
])
def test_read_dataset_rejects_malformed(text):
    with pytest.raises(DatasetParseError):
        read_dataset(io.StringIO(text))


def test_field_groups_and_directions(noiseless):
    groups = noiseless.field_groups()
    assert len(groups) == 25
    assert sum(len(members) for _, members in groups) == len(noiseless)
    assert len(noiseless.directions()) == 3


# ==================== VALIDATOR ====================

def _records(n, field=(0.0, 0.0, 1e-3), sigma=0.003, **extra):
    return [dict({'Bx_T': field[0], 'By_T': field[1], 'Bz_T': field[2],
                  'freq_MHz': 3.0 + 0.1 * i, 'sigma_MHz': sigma}, **extra) for i in range(n)]


def test_validator_accepts_sweep(noiseless):
    assert DatasetValidator().validate_dataset(noiseless) == []


def test_validator_needs_records_and_directions():
    errors = DatasetValidator().validate_dataset(ResonanceDataset.from_records(_records(4)))
    assert any(e.startswith('records') for e in errors)
    assert any(e.startswith('field direction') for e in errors)


def test_validator_record_checks():
    records = _records(8) + _records(1, field=(1e-3, 0, 0), sigma=-1.0, pair=(2, 1))
    errors = DatasetValidator().validate_records(ResonanceDataset.from_records(records))
    assert any(e.startswith('sigma_MHz (row 8)') for e in errors)
    assert any(e.startswith('pair (row 8)') for e in errors)


def test_validator_fit_options():
    validator = DatasetValidator()
    assert validator.validate_fit_mode('gamma') == (True, "")
    assert not validator.validate_fit_mode('alpha')[0]
    assert not validator.validate_max_iter(0)[0]


def test_fit_rejects_invalid_dataset(service):
    with pytest.raises(DatasetValidationError) as info:
        service.fit(ResonanceDataset.from_records(_records(4)))
    assert len(info.value.errors) == 2


# ==================== ASSIGNMENT ====================

def test_assign_peaks_minimises_total_offset():
    assignment = assign_peaks([1.0, 2.0, 3.0], [2.9, 1.1])
    assert assignment.predicted_index.tolist() == [2, 0]
    assert abs(assignment.cost - 0.2) < 1e-9
    assert assignment.unmatched_predictions == [1]
    assert assignment.complete


def test_assign_peaks_breaks_ties_low():
    assert assign_peaks([1.0, 3.0], [2.0]).predicted_index.tolist() == [0]


def test_assign_peaks_flags_surplus_observations():
    assignment = assign_peaks([1.0], [1.0, 5.0])
    assert assignment.predicted_index.tolist() == [0, -1]
    assert assignment.unmatched_observations == [1]
    assert not assignment.complete


def test_assign_peaks_respects_allowed_mask():
    assignment = assign_peaks([1.0, 3.0], [1.0], allowed=np.array([[False, True]]))
    assert assignment.predicted_index.tolist() == [1]
    assert abs(assignment.cost - 2.0) < 1e-12


# ==================== GAUGE ====================

@pytest.mark.parametrize("gamma, expected", [
    (-45.0, -45.0), (135.0, -45.0), (45.0, -45.0), (-135.0, -45.0), (10.0, -10.0), (0.0, 0.0),
])
def test_canonical_gamma(gamma, expected):
    assert abs(canonical_gamma(gamma) - expected) < 1e-12


def test_mirror_gamma():
    assert abs(mirror_gamma(-45.0) + 135.0) < 1e-12
    assert abs(mirror_gamma(0.0) + 180.0) < 1e-12


@pytest.mark.parametrize("gamma", [-45.0, -20.0, -70.0, 30.0])
def test_mirror_gamma_gives_identical_ensemble_spectra(measured, gamma):
    mirror = mirror_gamma(gamma)
    assert -180.0 <= mirror <= -90.0
    assert abs(mirror - (-180.0 - canonical_gamma(gamma))) < 1e-12
    for field in ([0.3e-3, -0.5e-3, 1.1e-3], [1.5e-3, 0.2e-3, -0.4e-3]):
        base = np.sort(ensemble_transitions(field, measured.with_gamma(gamma)).frequencies)
        other = np.sort(ensemble_transitions(field, measured.with_gamma(mirror)).frequencies)
        assert np.allclose(base, other, atol=1e-9)


def test_quarter_turn_is_not_a_mirror_away_from_minus_45(measured):
    field = [0.3e-3, -0.5e-3, 1.1e-3]
    base = np.sort(ensemble_transitions(field, measured.with_gamma(-20.0)).frequencies)
    quarter = np.sort(ensemble_transitions(field, measured.with_gamma(-110.0)).frequencies)
    assert np.max(np.abs(base - quarter)) > 1e-3


def test_zero_field_candidates_contain_measured(measured):
    top = transition_frequencies([0, 0, 0], measured).top(3)
    candidates = zero_field_candidates(top)
    assert 0 < len(candidates) <= 24
    assert any(np.allclose(c, MEASURED, atol=1e-9) for c in candidates)
    assert zero_field_candidates(top[:2]) == []


# ==================== FIT ====================

def test_noiseless_fit_recovers_tensor(service, noiseless):
    result = service.fit(noiseless)
    assert _principal_error(result.principal) < 1e-6
    assert abs(result.gamma_deg + 45.0) < 1e-4
    assert np.allclose(result.euler[:2], (135.0, 90.0))
    assert result.rms_mhz < 1e-6
    assert len(result.assignments) == len(noiseless)
    assert set(result.subset_rms) >= {'s0', 's1'}

    mirror = result.degenerate_solutions[0]
    assert abs(mirror['gamma_deg'] + 135.0) < 1e-4
    assert abs(mirror['delta_chi2']) < 1e-10


def test_isotropic_data_leaves_gamma_unconstrained(service, isotropic):
    dataset = synthesize_dataset(isotropic, field_grid_sweep(5), sigma=0.003)
    with pytest.raises(UnderdeterminedFitError) as info:
        service.fit(dataset, init=isotropic)
    assert 'gamma_deg' in info.value.parameters


def test_rank_check_names_unconstrained_parameter(service):
    jac = np.column_stack([np.ones(10), np.arange(10.0), np.arange(10.0) ** 2, np.zeros(10)])
    with pytest.raises(UnderdeterminedFitError) as info:
        service.rank_check(jac, ['A_X_MHz', 'A_Y_MHz', 'A_Z_MHz', 'gamma_deg'])
    assert info.value.parameters == ['gamma_deg']


def test_absolute_sigma_errors_scale_with_sigma(service, measured):
    dataset = synthesize_dataset(measured, field_grid_sweep(5), noise_rms=0.003, seed=11)
    options = FitOptions(absolute_sigma=True)
    base = service.fit(dataset, init=measured, options=options)
    doubled = service.fit(dataset.with_sigma_scale(2.0), init=measured, options=options)
    ratio = np.sort(doubled.principal_err) / np.sort(base.principal_err)
    assert np.allclose(ratio, 2.0, rtol=1e-3)
    assert np.isclose(doubled.gamma_err / base.gamma_err, 2.0, rtol=1e-3)


def test_relative_sigma_errors_ignore_sigma_scale(service, measured):
    dataset = synthesize_dataset(measured, field_grid_sweep(5), noise_rms=0.003, seed=11)
    base = service.fit(dataset, init=measured)
    doubled = service.fit(dataset.with_sigma_scale(2.0), init=measured)
    assert np.allclose(np.sort(doubled.principal_err), np.sort(base.principal_err), rtol=1e-3)


def test_cost_is_invariant_under_record_permutation(service, noiseless, rng):
    trial = HyperfineTensor((4.0, -4.4, -3.0), (135.0, 90.0, -40.0))
    order = rng.permutation(len(noiseless))
    assert np.isclose(service.cost(noiseless.permuted(order), trial), service.cost(noiseless, trial), rtol=1e-12)
    assert service.cost(noiseless, HyperfineTensor(MEASURED, (135.0, 90.0, -45.0))) < 1e-12


def test_full_mode_fits_all_angles(service, noiseless, measured):
    result = service.fit(noiseless, init=measured, options=FitOptions(mode='full'))
    assert result.parameter_names[-3:] == ['alpha_deg', 'beta_deg', 'gamma_deg']
    assert result.rms_mhz < 1e-5


@pytest.mark.slow
def test_noisy_fits_stay_within_reported_errors(service, measured):
    """3 kHz noise: errors of a few kHz, truth inside 3σ for nearly every seed"""
    grid = field_grid_sweep()
    inside = 0
    for seed in range(20):
        dataset = synthesize_dataset(measured, grid, noise_rms=0.003, seed=seed)
        result = service.fit(dataset, init=measured)
        errors = np.asarray(result.principal_err)
        assert np.all((errors > 1e-4) & (errors < 0.06))
        p = np.asarray(result.principal)
        target = MEASURED if np.max(np.abs(p - MEASURED)) <= np.max(np.abs(p - SWAPPED)) else SWAPPED
        if np.all(np.abs(p - target) <= 3 * errors):
            inside += 1
    assert inside >= 18
