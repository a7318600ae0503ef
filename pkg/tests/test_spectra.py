import numpy as np
import pytest

from conftest import random_unit
from tcentre.spectra import (
    SecularRegimeError,
    SpectraError,
    branch_eigensystem,
    delta_h,
    distinct_frequencies,
    effective_hyperfine,
    ensemble_transitions,
    extract_peaks,
    line_shape,
    match_peaks,
    nuclear_splittings,
    require_secular_regime,
    secular_splittings,
    split_bands,
    synthesize_spectrum,
    transition_frequencies,
)
from tcentre.spectra import errors
from tcentre.spin_core import (
    CRYSTAL_AXES,
    HyperfineTensor,
    RAD_S_TO_MHZ,
    build_ground_hamiltonian,
    unit,
)


# ==================== TRANSITIONS ====================

def test_zero_field_top_lines(measured):
    lines = transition_frequencies([0, 0, 0], measured)
    assert len(lines) == 6
    top = lines.top(3)
    assert np.allclose(top, [3.482, 3.713, 4.268], atol=1e-2)
    assert abs(top.mean() - 3.821) < 5e-3


def test_zero_field_intra_triplet_lines(measured):
    low = transition_frequencies([0, 0, 0], measured).frequencies[:3]
    assert np.allclose(low, [0.231, 0.555, 0.786], atol=1e-9)
    assert np.all((low > 0.2) & (low < 0.8))


def test_isotropic_zero_field_is_single_line(isotropic):
    freqs = transition_frequencies([0, 0, 0], isotropic).frequencies
    assert np.allclose(freqs[3:], 2.0, atol=1e-9)
    assert np.allclose(freqs[:3], 0.0, atol=1e-9)
    assert len(distinct_frequencies(transition_frequencies([0, 0, 0], isotropic))) == 2


def test_lines_are_sorted_and_non_negative(measured, rng):
    for _ in range(5):
        freqs = transition_frequencies(0.01 * random_unit(rng), measured).frequencies
        assert np.all(freqs >= 0)
        assert np.all(np.diff(freqs) >= 0)


def test_zero_tensor_nmr_band_is_larmor(zero_tensor, constants):
    lines = ensemble_transitions([0, 0, 1.0], zero_tensor)
    nmr, epr = split_bands(lines)
    assert len(nmr) == 2 * 12
    assert np.allclose(nmr.frequencies, constants.larmor_mhz(1.0), atol=1e-6)
    assert np.all(epr.frequencies >= 100.0)


def test_ensemble_lines_are_labelled(measured):
    lines = ensemble_transitions([0, 0, 1e-3], measured)
    assert len(lines) == 72
    assert len(lines.for_orientation('z3')) == 6
    frame = lines.to_dataframe()
    assert list(frame.columns) == ['freq_MHz', 'lower', 'upper', 'orientation']


def test_ensemble_line_families_along_110(measured):
    """One set of six lines per spectrally distinct subset"""
    lines = ensemble_transitions(1e-3 * unit(CRYSTAL_AXES["110"]), measured)
    families = {tuple(np.round(lines.for_orientation(f"z{i}").frequencies, 4)) for i in range(12)}
    assert len(families) == 4


# ==================== EFFECTIVE HYPERFINE ====================

@pytest.mark.parametrize("index, expected", [(0, 4.037), (2, -2.927)])
def test_effective_hyperfine_along_principal_axes(measured, index, expected):
    b = 1.0 * measured.principal_axis(index)
    a_eff, _ = effective_hyperfine(b, measured)
    assert abs(a_eff - expected) < 1e-9


def test_delta_e_matches_brute_force(measured, rng):
    for _ in range(10):
        b = random_unit(rng)
        _, delta_e = effective_hyperfine(b, measured)
        levels = np.linalg.eigvalsh(build_ground_hamiltonian(b, measured).matrix) * RAD_S_TO_MHZ
        # γ_e < 0: the ↑e branch is the upper pair
        brute = (levels[1] - levels[0]) - (levels[3] - levels[2])
        assert abs(delta_e - brute) < 1e-3


def test_branch_grouping_uses_electron_character(measured):
    branches = branch_eigensystem([0, 0, 1.0], measured)
    assert np.all(branches.levels['up'] > branches.levels['down'].max())
    assert branches.vectors['up'].shape == (4, 2)


def test_delta_h_vanishes_without_hyperfine(zero_tensor, rng):
    for _ in range(5):
        assert abs(delta_h(0.5 * random_unit(rng), zero_tensor)) < 1e-9


def test_delta_h_along_hyperfine_z(measured):
    b = measured.principal_axis(2)
    assert abs(delta_h(b, measured, 'up') - 2.927 / 2) < 1e-2
    assert abs(delta_h(b, measured, 'down') + 2.927 / 2) < 1e-2


def test_delta_h_signs_about_hyperfine_x(measured):
    assert delta_h(measured.principal_axis(0), measured, 'up') < 0
    assert delta_h(measured.principal_axis(1), measured, 'up') > 0


def test_delta_h_rejects_unknown_branch(measured):
    with pytest.raises(SpectraError):
        delta_h([0, 0, 1.0], measured, 'sideways')


@pytest.mark.parametrize("field", [[0, 0, 0], [0, 0, 1e-3]])
def test_secular_guard(measured, field):
    with pytest.raises(SecularRegimeError):
        effective_hyperfine(field, measured)


def test_secular_error_is_a_spectra_error(measured):
    assert SecularRegimeError is errors.SecularRegimeError
    assert issubclass(errors.SecularRegimeError, errors.SpectraError)
    with pytest.raises(errors.SpectraError):
        require_secular_regime([0, 0, 1e-3], measured)


def test_secular_model_converges_with_field(measured, rng, constants):
    for magnitude in (0.1, 1.0):
        bound = 10.0 * measured.max_abs_mhz / (abs(constants.gamma_e) * magnitude * RAD_S_TO_MHZ) * measured.max_abs_mhz
        for _ in range(10):
            b = magnitude * random_unit(rng)
            exact_up, exact_down = nuclear_splittings(b, measured)
            approx_up, approx_down = secular_splittings(b, measured)
            assert abs((exact_down - exact_up) - (approx_down - approx_up)) < bound
            assert abs(exact_up - approx_up) < bound


# ==================== PROFILES ====================

def test_single_line_peak_location():
    profile = synthesize_spectrum([3.5], linewidth=0.05)
    peaks = extract_peaks(profile)
    assert len(peaks) == 1
    assert abs(peaks[0] - 3.5) <= profile.step


def test_zero_field_peaks_recovered(measured):
    lines = transition_frequencies([0, 0, 0], measured)
    profile = synthesize_spectrum(lines, linewidth=0.05)
    peaks = extract_peaks(profile)
    assert np.allclose(peaks[-3:], lines.top(3), atol=5e-3)
    assert all(m.resolved for m in match_peaks(lines, peaks))


def test_close_lines_merge_and_are_flagged():
    profile = synthesize_spectrum([3.0, 3.01], linewidth=0.05)
    peaks = extract_peaks(profile)
    assert len(peaks) == 1
    matches = match_peaks([3.0, 3.01], peaks)
    assert not any(m.resolved for m in matches)


def test_profile_area_follows_weights():
    profile = synthesize_spectrum([1.0, 3.0], linewidth=0.05, weights=[1.0, 2.0], shape='gaussian')
    assert np.all(profile.amplitude >= 0)
    first, second = profile.area(0.5, 1.5), profile.area(2.5, 3.5)
    assert abs(first - 1.0) < 0.01
    assert abs(second / first - 2.0) < 0.02


def test_profile_noise_is_seeded():
    a = synthesize_spectrum([3.0], linewidth=0.05, noise_rms=0.1, seed=3)
    b = synthesize_spectrum([3.0], linewidth=0.05, noise_rms=0.1, seed=3)
    assert np.array_equal(a.amplitude, b.amplitude)
    assert np.all(a.amplitude >= 0)


def test_profile_rejects_bad_inputs():
    with pytest.raises(SpectraError):
        synthesize_spectrum([3.0], linewidth=0.0)
    with pytest.raises(SpectraError):
        synthesize_spectrum([3.0, 4.0], linewidth=0.1, weights=[1.0])
    with pytest.raises(SpectraError):
        line_shape(np.zeros(3), 0.0, 1.0, 'voigt')


def test_delta_e_tracks_effective_hyperfine_at_high_field():
    tensor = HyperfineTensor((1.0, 2.0, 3.0), (0.0, 0.0, 0.0))
    a_eff, delta_e = effective_hyperfine([0, 0, 1.0], tensor)
    assert abs(a_eff - 3.0) < 1e-12
    assert abs(delta_e - a_eff) < 1e-2
