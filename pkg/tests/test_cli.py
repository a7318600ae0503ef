import io
import json

import numpy as np
import pandas as pd
import pytest

from tcentre.cli import InputParseError, cli, field_magnitude, main, parse_field_spec, parse_quantity
from tcentre.cli.formatters import format_khz, format_number, format_probability
from tcentre.cli.output import OutputWriter


# ==================== UNITS ====================

@pytest.mark.parametrize("text, kind, expected", [
    ("1T", 'field', 1.0),
    ("2mT", 'field', 2e-3),
    ("10ns", 'time', 1e-8),
    ("3kHz", 'frequency', 3e-3),
    ("1.5e2 Hz", 'frequency', 1.5e-4),
])
def test_parse_quantity(text, kind, expected):
    assert np.isclose(parse_quantity(text, kind), expected)


@pytest.mark.parametrize("text, kind", [("1", "field"), ("1 Tesla", "field"), ("abc", "time"), ("10 fs", "time")])
def test_parse_quantity_rejects(text, kind):
    with pytest.raises(InputParseError):
        parse_quantity(text, kind)


def test_parse_field_spec_forms():
    assert np.allclose(parse_field_spec("0"), [[0, 0, 0]])
    assert np.allclose(parse_field_spec("1T@001"), [[0, 0, 1.0]])
    sweep = parse_field_spec("0mT:2mT:5@110")
    assert sweep.shape == (5, 3)
    assert np.allclose(sweep[-1], 2e-3 * np.array([1, 1, 0]) / np.sqrt(2))
    assert np.allclose(parse_field_spec("1T@0,3,4"), [[0, 0.6, 0.8]])


@pytest.mark.parametrize("spec", ["1T", "1T@011x", "0:1T@001", "1T:2T:x@001"])
def test_parse_field_spec_rejects(spec):
    with pytest.raises(InputParseError):
        parse_field_spec(spec)


def test_field_magnitude_rejects_direction():
    assert field_magnitude("0.5T") == 0.5
    with pytest.raises(InputParseError):
        field_magnitude("1T@001")
    with pytest.raises(InputParseError):
        field_magnitude("0T")


def test_formatters():
    assert format_number(float('inf')) == "∞"
    assert format_number(None) == "-"
    assert format_khz(0.1066) == "106.600 kHz"
    assert format_probability(2.5e-4) == "2.500e-04"


# ==================== EXIT CODES ====================

def test_usage_error_exit_code(runner):
    result = runner.invoke(cli, ['map', '--metric', 'entropy', '--B', '1T'])
    assert result.exit_code == 2


def test_cycle_metric_needs_times(runner):
    result = runner.invoke(cli, ['map', '--metric', 'cyclicity', '--B', '1T'])
    assert result.exit_code == 2


@pytest.mark.parametrize("args", [
    ['predict', '--tensor', 'measured', '--B', '1'],
    ['predict', '--tensor', 'measured', '--B', '1T'],
    ['predict', '--tensor', '1,2', '--B', '0'],
    ['predict', '--tensor', 'measured', '--B', '0', '--orientation', 'z12'],
])
def test_parse_errors_exit_code(runner, args):
    result = runner.invoke(cli, args)
    assert result.exit_code == 3


def test_regime_error_exit_code(runner):
    result = runner.invoke(cli, ['map', '--metric', 'cyclicity', '--B', '1T', '--tau', '10ns', '--t', '50ns',
                                 '--n-theta', '2', '--n-phi', '2'])
    assert result.exit_code == 4


def test_secular_error_exit_code(runner):
    result = runner.invoke(cli, ['dpm', '--B', '0.1mT', '--resolution', '8'])
    assert result.exit_code == 4


def test_underdetermined_fit_exit_code(runner, tmp_path):
    data = tmp_path / 'iso.csv'
    result = runner.invoke(cli, ['synth', '--tensor', '2,2,2', '--steps', '5', '--sigma', '3kHz',
                                 '--out', str(data)])
    assert result.exit_code == 0
    result = runner.invoke(cli, ['fit', str(data), '--init', '2,2,2'])
    assert result.exit_code == 5
    assert 'gamma_deg' in result.output


def test_main_returns_exit_code():
    assert main(['predict', '--tensor', 'measured', '--B', '1']) == 3


# ==================== COMMANDS ====================

def test_predict_to_stdout(runner):
    result = runner.invoke(cli, ['predict', '--tensor', 'measured', '--B', '0', '--orientation', 'z0'])
    assert result.exit_code == 0
    lines = result.output.strip().splitlines()
    assert lines[0] == 'Bx_T,By_T,Bz_T,freq_MHz,lower,upper,orientation,subset'
    assert len(lines) == 7


def test_predict_writes_csv_and_envelope(runner, tmp_path):
    out = tmp_path / 'lines.csv'
    result = runner.invoke(cli, ['predict', '--tensor', 'measured', '--B', '1mT@001', '--out', str(out)])
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert len(frame) == 72
    envelope = json.loads((tmp_path / 'lines.json').read_text())
    assert envelope['command'] == 'predict'
    assert envelope['summary']['n_lines'] == 72
    assert 'timestamp' not in envelope


def test_predict_epr_band(runner):
    result = runner.invoke(cli, ['predict', '--tensor', 'measured', '--B', '1T@001', '--band', 'epr',
                                 '--orientation', 'z0'])
    assert result.exit_code == 0
    frame = pd.read_csv(io.StringIO(result.output))
    assert (frame['freq_MHz'] > 100.0).all()


def test_synth_is_reproducible(runner, tmp_path):
    args = ['synth', '--steps', '3', '--noise', '3kHz', '--seed', '4']
    first, second = tmp_path / 'a.csv', tmp_path / 'b.csv'
    assert runner.invoke(cli, args + ['--out', str(first)]).exit_code == 0
    assert runner.invoke(cli, args + ['--out', str(second)]).exit_code == 0
    assert first.read_bytes() == second.read_bytes()


def test_synth_then_fit_recovers_tensor(runner, tmp_path):
    data = tmp_path / 'sweep.csv'
    assert runner.invoke(cli, ['synth', '--steps', '5', '--sigma', '3kHz', '--out', str(data)]).exit_code == 0

    result = runner.invoke(cli, ['fit', str(data), '--init', 'measured', '--out', str(tmp_path / 'fit.csv')])
    assert result.exit_code == 0
    assert 'degenerate solution' in result.output

    fitted = json.loads((tmp_path / 'fit.json').read_text())['summary']['result']
    principal = np.array(fitted['principal_mhz'])
    measured = np.array([4.037, -4.499, -2.927])
    swapped = np.array([-4.499, 4.037, -2.927])
    assert min(np.max(np.abs(principal - measured)), np.max(np.abs(principal - swapped))) < 1e-5
    assignments = pd.read_csv(tmp_path / 'fit.csv')
    assert np.all(np.abs(assignments['residual_MHz']) < 1e-5)


def test_orientations_json(runner, tmp_path):
    result = runner.invoke(cli, ['orientations'])
    assert result.exit_code == 0
    listing = json.loads(result.output)
    assert [o['label'] for o in listing] == [f"z{i}" for i in range(12)]
    assert np.allclose(np.array(listing[0]['rotation']).reshape(3, 3), np.eye(3))

    out = tmp_path / 'orient'
    assert runner.invoke(cli, ['orientations', '--out', str(out)]).exit_code == 0
    assert json.loads((tmp_path / 'orient.json').read_text()) == listing


def test_dpm_command(runner, tmp_path):
    out = tmp_path / 'dpm.csv'
    result = runner.invoke(cli, ['dpm', '--B', '1T', '--resolution', '12', '--out', str(out)])
    assert result.exit_code == 0
    assert 'max |delta_e|' in result.output
    frame = pd.read_csv(out)
    # closed contour: first point repeated
    assert len(frame) == 13
    assert np.allclose(frame.iloc[0], frame.iloc[-1])
    summary = json.loads((tmp_path / 'dpm.json').read_text())['summary']
    assert summary['found'] and summary['n_points'] == 12
    assert abs(abs(summary['max_delta_e_MHz']) - 0.1066) < 5e-3


def test_dpm_without_sign_change(runner):
    result = runner.invoke(cli, ['dpm', '--tensor', '2,2,2', '--B', '1T', '--resolution', '8'])
    assert result.exit_code == 0
    assert result.output.strip() == 'theta_deg,phi_deg'


def test_small_cyclicity_map(runner, tmp_path):
    out = tmp_path / 'map.csv'
    result = runner.invoke(cli, ['map', '--metric', 'cyclicity', '--B', '1T', '--tau', '10ns', '--t', '100ns',
                                 '--n-theta', '2', '--n-phi', '2', '--theta-range', '30', '60',
                                 '--out', str(out), '--gnuplot'])
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert list(frame.columns) == ['theta_deg', 'phi_deg', 'value']
    assert frame['theta_deg'].tolist() == [30.0, 30.0, 60.0, 60.0]
    assert (frame['value'] > 1.0).all()
    script = (tmp_path / 'map.gp').read_text()
    assert "'map.csv'" in script and 'log10' in script


def test_gnuplot_needs_out(runner):
    result = runner.invoke(cli, ['map', '--metric', 'delta_h', '--B', '1T', '--gnuplot'])
    assert result.exit_code == 2


def test_constant_overrides_shift_lines(runner):
    base = runner.invoke(cli, ['predict', '--tensor', 'zero', '--B', '1T@001', '--band', 'nmr',
                               '--orientation', 'z0'])
    shifted = runner.invoke(cli, ['--g-n', '2.7925', 'predict', '--tensor', 'zero', '--B', '1T@001',
                                  '--band', 'nmr', '--orientation', 'z0'])
    f_base = pd.read_csv(io.StringIO(base.output))['freq_MHz']
    f_shift = pd.read_csv(io.StringIO(shifted.output))['freq_MHz']
    assert np.allclose(f_shift / f_base, 0.5, rtol=1e-9)


def test_paper_tensor_zero_field_lines(runner):
    result = runner.invoke(cli, ['predict', '--tensor', 'paper', '--B', '0', '--orientation', 'z0'])
    assert result.exit_code == 0
    frequencies = np.sort(pd.read_csv(io.StringIO(result.output))['freq_MHz'].unique())
    assert np.allclose(frequencies[-3:], [3.482, 3.713, 4.268], atol=1e-2)


def test_paper_is_the_default_tensor(runner, tmp_path):
    out = tmp_path / 'sweep.csv'
    assert runner.invoke(cli, ['synth', '--steps', '2', '--out', str(out)]).exit_code == 0
    envelope = json.loads((tmp_path / 'sweep.json').read_text())
    assert envelope['summary']['tensor']['name'] == 'paper'


def test_short_time_map_when_allowed(runner, tmp_path):
    out = tmp_path / 'map.csv'
    result = runner.invoke(cli, ['map', '--metric', 'cyclicity', '--B', '1T', '--tau', '10ns', '--t', '50ns',
                                 '--allow-short-time', '--n-theta', '2', '--n-phi', '2', '--out', str(out)])
    assert result.exit_code == 0
    frame = pd.read_csv(out)
    assert len(frame) == 4
    assert (frame['value'] > 0.0).all()


def test_synth_envelope_failure_exit_code(runner, tmp_path, monkeypatch):
    monkeypatch.setattr(OutputWriter, 'write_envelope', lambda self, *args, **kwargs: (False, "disk full"))
    result = runner.invoke(cli, ['synth', '--steps', '2', '--out', str(tmp_path / 'sweep.csv')])
    assert result.exit_code == 1
    assert 'disk full' in result.output
