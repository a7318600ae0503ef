import numpy as np
import pytest

from tcentre.decoherence import (
    MAP_COLUMNS,
    DecoherenceError,
    MapConfig,
    MapEngine,
    MapMetric,
    direction_grid,
    map_over_directions,
)
from tcentre.spectra import delta_h, effective_hyperfine
from tcentre.spin_core import spherical_to_unit


def test_direction_grid_nodes():
    theta, phi = direction_grid(37, 72)
    assert theta[0] == 0.0 and np.isclose(theta[-1], np.pi)
    assert phi[0] == 0.0 and phi[-1] < 2 * np.pi
    assert np.allclose(np.degrees(np.diff(theta)), 5.0)
    assert np.allclose(np.degrees(np.diff(phi)), 5.0)


def test_direction_grid_window():
    theta, phi = direction_grid(3, 4, theta_window=(0.5, 1.5), phi_window=(0.0, 1.0))
    assert np.allclose(theta, [0.5, 1.0, 1.5])
    assert np.allclose(phi, [0.0, 0.25, 0.5, 0.75])


def test_direction_grid_rejects_single_node():
    with pytest.raises(DecoherenceError):
        direction_grid(1, 10)


def test_delta_h_map_without_hyperfine(zero_tensor):
    result = map_over_directions('delta_h', 0.5, zero_tensor, n_theta=7, n_phi=8)
    assert result.values.shape == (7, 8)
    assert np.all(np.abs(result.values) < 1e-9)


def test_delta_h_map_changes_sign_about_hyperfine_x(measured):
    result = map_over_directions(MapMetric.DELTA_H, 1.0, measured)
    theta, phi = np.degrees(result.theta), np.degrees(result.phi)
    i_x, i_y, j = np.argmin(np.abs(theta - 135.0)), np.argmin(np.abs(theta - 45.0)), np.argmin(np.abs(phi - 45.0))
    assert result.values[i_x, j] < 0
    assert result.values[i_y, j] > 0
    # grid nodes sit exactly on ±X and Y
    assert np.isclose(result.values[i_x, j], delta_h(measured.principal_axis(0), measured, 'up'))


def test_delta_e_map_matches_node_values(measured):
    result = map_over_directions('delta_e', 1.0, measured, n_theta=5, n_phi=6)
    for i, th in enumerate(result.theta):
        for j, ph in enumerate(result.phi):
            expected = effective_hyperfine(1.0 * spherical_to_unit(th, ph), measured)[1]
            assert result.values[i, j] == pytest.approx(expected, abs=1e-12)


def test_threaded_map_matches_serial(measured):
    serial = map_over_directions('delta_e', 1.0, measured, n_theta=6, n_phi=6, workers=1)
    threaded = map_over_directions('delta_e', 1.0, measured, n_theta=6, n_phi=6, workers=4)
    assert np.array_equal(serial.values, threaded.values)


def test_corrected_fidelity_map_is_bounded(measured):
    result = map_over_directions('corrected_fidelity', 1.0, measured, n_theta=3, n_phi=4,
                                 theta_window=(0.3, 1.2), initial_state='plus')
    assert np.all((result.values > 0.0) & (result.values <= 1.0))


@pytest.mark.slow
def test_cyclicity_peaks_on_a_principal_axis(measured):
    result = map_over_directions('cyclicity', 1.0, measured, n_theta=21, n_phi=72,
                                 theta_window=(np.radians(40.0), np.radians(140.0)))
    best = spherical_to_unit(*result.argmax())
    overlaps = [abs(best @ measured.principal_axis(k)) for k in range(3)]
    assert max(overlaps) > 1.0 - 1e-9
    assert np.max(result.values) > 1e8


def test_map_dataframe_order(measured):
    result = map_over_directions('delta_h', 1.0, measured, n_theta=3, n_phi=4)
    frame = result.to_dataframe()
    assert list(frame.columns) == MAP_COLUMNS
    assert len(frame) == 12
    assert frame['theta_deg'].tolist()[:4] == [0.0] * 4
    assert np.allclose(frame['value'], result.values.ravel())


def test_unknown_metric_is_rejected(measured):
    with pytest.raises(DecoherenceError):
        map_over_directions('entropy', 1.0, measured)


def test_engine_metric_info():
    engine = MapEngine()
    assert engine.get_metric_info(MapMetric.DELTA_H)['unit'] == 'MHz'
    assert set(engine.get_all_metrics()) == set(MapMetric)


def test_config_builds_cycle_params(measured):
    config = MapConfig(metric=MapMetric.CYCLICITY, b_magnitude=0.5, tensor=measured)
    params = config.cycle_params(np.array([0.0, 0.0, 1.0]))
    assert np.allclose(params.field, [0.0, 0.0, 0.5])
    assert params.tau == 10e-9 and params.t == 100e-9


def test_config_passes_short_time_flag(measured):
    config = MapConfig(metric=MapMetric.CYCLICITY, b_magnitude=1.0, tensor=measured, t=50e-9,
                       allow_short_time=True)
    assert config.cycle_params(np.array([0.0, 0.0, 1.0])).allow_short_time
    result = map_over_directions('cyclicity', 1.0, measured, n_theta=2, n_phi=2, tau=10e-9, t=50e-9,
                                 allow_short_time=True)
    assert np.all(result.values > 0.0)
