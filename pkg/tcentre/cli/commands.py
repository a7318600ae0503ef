"""
Command-Line Front End
======================
click group `tcentre` with commands predict, fit, map, dpm, synth and orientations.

Domain errors are mapped to exit codes:
    2 usage (click), 3 input parse, 4 numerical or regime, 5 underdetermined fit
"""
import functools
import logging
from typing import Any, Dict, List, Optional

import click
import numpy as np
import pandas as pd

from tcentre import __version__
from tcentre.config import APP_CONFIG
from tcentre.decoherence import (
    DecoherenceError,
    MapConfig,
    MapEngine,
    MapMetric,
    dpm_contour,
    dpm_max_delta_e,
)
from tcentre.orientations import OrientationError, get_orientation, orientation_set, orientations_to_json
from tcentre.orientations import partition_by_field
from tcentre.spectra import SpectraError, ensemble_transitions, split_bands, distinct_frequencies
from tcentre.spin_core import (
    InvalidFieldError,
    InvalidTensorError,
    SpinCoreError,
    get_constants,
    parse_tensor,
)
from tcentre.tensor_fit import (
    DatasetParseError,
    DatasetValidationError,
    FitOptions,
    GAUGE_GUIDANCE,
    TensorFitError,
    TensorFitService,
    UnderdeterminedFitError,
    field_grid_sweep,
    read_dataset,
    synthesize_dataset,
)
from .formatters import format_fit_summary, format_khz, format_lines_table
from .help_texts import COMMAND_HELP, EXIT_CODE_HELP, GROUP_HELP, OPTION_HELP
from .output import OutputWriter
from .units import InputParseError, field_magnitude, parse_fields_list, parse_quantity

logger = logging.getLogger(__name__)

LOG_FORMAT = '%(asctime)s - %(name)s - %(levelname)s - %(message)s'
LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']

EXIT_PARSE = 3
EXIT_NUMERICAL = 4
EXIT_UNDERDETERMINED = 5

# Checked in order: subclasses before their bases
EXIT_CODES = [
    (UnderdeterminedFitError, EXIT_UNDERDETERMINED),
    ((InputParseError, DatasetParseError, DatasetValidationError,
      InvalidTensorError, InvalidFieldError, OrientationError), EXIT_PARSE),
    ((SpectraError, DecoherenceError, TensorFitError, SpinCoreError), EXIT_NUMERICAL),
]


# ==================== ERROR HANDLING ====================

class CommandError(click.ClickException):
    """Domain failure carried out of a command with its exit code"""

    def __init__(self, message: str, exit_code: int):
        super().__init__(message)
        self.exit_code = exit_code


def exit_code_for(error: Exception) -> Optional[int]:
    for types, code in EXIT_CODES:
        if isinstance(error, types):
            return code
    return None


def handle_errors(func):
    """Translate domain exceptions into CommandError with the mapped exit code"""
    @functools.wraps(func)
    def wrapper(*args, **kwargs):
        try:
            return func(*args, **kwargs)
        except click.ClickException:
            raise
        except Exception as e:
            code = exit_code_for(e)
            if code is None:
                raise
            message = str(e)
            logger.error(f"❌ {type(e).__name__}: {message}")
            raise CommandError(message, code)
    return wrapper


def setup_logging(level: str) -> None:
    logging.basicConfig(level=getattr(logging, level.upper(), logging.WARNING),
                        format=LOG_FORMAT, force=True)


def _constants(ctx: click.Context):
    return ctx.obj['constants']


def _emit(writer: Optional[OutputWriter], frame: pd.DataFrame, command: str,
          arguments: Dict[str, Any], summary: Dict[str, Any]) -> None:
    """Write CSV + envelope, or print the CSV to stdout"""
    if writer is None:
        float_format = APP_CONFIG.get("OUTPUT_FLOAT_FORMAT", "%.9f")
        click.echo(frame.to_csv(index=False, float_format=float_format, lineterminator='\n'), nl=False)
        return
    ok, message = writer.write_table(frame)
    if not ok:
        raise CommandError(f"out: {message}", 1)
    ok, message = writer.write_envelope(command, arguments, summary)
    if not ok:
        raise CommandError(f"out: {message}", 1)


def _arguments(ctx: click.Context) -> Dict[str, Any]:
    """Resolved arguments of the group and the command, for provenance"""
    group = dict(ctx.parent.params) if ctx.parent is not None else {}
    return {'group': group, 'command': dict(ctx.params)}


# ==================== GROUP ====================

@click.group(help=GROUP_HELP, epilog=EXIT_CODE_HELP)
@click.option('--g-e', type=click.FloatRange(min=0, min_open=True), default=None, help=OPTION_HELP['g_e'])
@click.option('--g-n', type=click.FloatRange(min=0, min_open=True), default=None, help=OPTION_HELP['g_n'])
@click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
              help=OPTION_HELP['log_level'])
@click.version_option(__version__, prog_name='tcentre')
@click.pass_context
def cli(ctx: click.Context, g_e: Optional[float], g_n: Optional[float], log_level: Optional[str]):
    setup_logging(log_level or APP_CONFIG.get("LOG_LEVEL", "WARNING"))
    ctx.ensure_object(dict)
    ctx.obj['constants'] = get_constants().with_overrides(g_e=g_e, g_n=g_n)


# ==================== PREDICT ====================

@cli.command(help=COMMAND_HELP['predict'])
@click.option('--tensor', 'tensor_spec', required=True, help=OPTION_HELP['tensor'])
@click.option('--B', 'field_specs', multiple=True, required=True, help=OPTION_HELP['field'])
@click.option('--orientation', 'labels', multiple=True, help="Restrict to orientation labels (z0..z11).")
@click.option('--band', type=click.Choice(['all', 'nmr', 'epr']), default='all', show_default=True,
              help="Keep only the NMR or EPR band.")
@click.option('--distinct', is_flag=True, help="Merge lines equal within the equivalence tolerance.")
@click.option('--out', default=None, help=OPTION_HELP['out'])
@click.pass_context
@handle_errors
def predict(ctx, tensor_spec, field_specs, labels, band, distinct, out):
    constants = _constants(ctx)
    tensor = parse_tensor(tensor_spec)
    fields = parse_fields_list(list(field_specs), 'B')
    orientations = [get_orientation(label) for label in labels] if labels else orientation_set()

    rows: List[Dict[str, Any]] = []
    for b in fields:
        lines = ensemble_transitions(b, tensor, orientations, constants)
        if band != 'all':
            nmr, epr = split_bands(lines)
            lines = nmr if band == 'nmr' else epr

        magnitude = float(np.linalg.norm(b))
        classes = {}
        if magnitude > 0:
            partition = partition_by_field(b / magnitude, tensor, magnitude,
                                           orientations=orientations, constants=constants)
            classes = {oid.label: f"s{partition.class_of(oid.label)}" for oid in orientations}

        if distinct:
            kept = distinct_frequencies(lines)
            for freq in kept:
                rows.append({'Bx_T': b[0], 'By_T': b[1], 'Bz_T': b[2], 'freq_MHz': freq,
                             'lower': -1, 'upper': -1, 'orientation': '', 'subset': ''})
            continue

        for ln in lines:
            rows.append({'Bx_T': b[0], 'By_T': b[1], 'Bz_T': b[2], 'freq_MHz': ln.freq_mhz,
                         'lower': ln.lower, 'upper': ln.upper, 'orientation': ln.orientation,
                         'subset': classes.get(ln.orientation, 's0')})

    frame = pd.DataFrame(rows, columns=['Bx_T', 'By_T', 'Bz_T', 'freq_MHz', 'lower', 'upper',
                                        'orientation', 'subset'])
    writer = OutputWriter(out) if out else None
    _emit(writer, frame, 'predict', _arguments(ctx),
          {'tensor': tensor.to_dict(), 'n_fields': len(fields), 'n_lines': len(frame)})
    if writer is not None:
        click.echo(f"{len(frame)} lines over {len(fields)} field(s) → {writer.csv_path}")
        if not distinct:
            for line in format_lines_table(frame, limit=10):
                click.echo(line)


# ==================== FIT ====================

@cli.command(help=COMMAND_HELP['fit'])
@click.argument('dataset_path', type=click.Path(exists=True, dir_okay=False))
@click.option('--init', 'init_spec', default=None, help="Starting tensor (same forms as --tensor).")
@click.option('--mode', type=click.Choice(['gamma', 'full']), default='gamma', show_default=True,
              help="'gamma' fits A_X, A_Y, A_Z and gamma; 'full' also alpha and beta.")
@click.option('--alpha-deg', type=float, default=None, help="Fixed alpha (deg); defaults to the init frame.")
@click.option('--beta-deg', type=float, default=None, help="Fixed beta (deg); defaults to the init frame.")
@click.option('--max-iter', type=click.IntRange(min=1), default=None, help="Function evaluation budget.")
@click.option('--starts', type=click.IntRange(min=1), default=3, show_default=True,
              help="Best-ranked starting points to optimise.")
@click.option('--absolute-sigma', is_flag=True, help="Use sigma_MHz as absolute uncertainties.")
@click.option('--out', default=None, help="Output '<stem>.csv' (assignments) plus '<stem>.json' (result).")
@click.pass_context
@handle_errors
def fit(ctx, dataset_path, init_spec, mode, alpha_deg, beta_deg, max_iter, starts, absolute_sigma, out):
    dataset = read_dataset(dataset_path)
    init = parse_tensor(init_spec) if init_spec else None
    options = FitOptions(mode=mode, alpha_deg=alpha_deg, beta_deg=beta_deg, max_iter=max_iter,
                         absolute_sigma=absolute_sigma, n_starts=starts)

    result = TensorFitService(constants=_constants(ctx)).fit(dataset, init, options)

    for line in format_fit_summary(result):
        click.echo(line)
    click.echo(GAUGE_GUIDANCE)

    if out:
        writer = OutputWriter(out)
        frame = pd.DataFrame(result.assignments)
        if not frame.empty:
            frame['residual_MHz'] = frame['freq_MHz'] - frame['predicted_MHz']
        _emit(writer, frame, 'fit', _arguments(ctx), {'result': result.to_dict()})
        click.echo(f"Result written to {writer.json_path}")


# ==================== MAP ====================

@cli.command('map', help=COMMAND_HELP['map'])
@click.option('--metric', type=click.Choice([m.value for m in MapMetric]), required=True,
              help="Metric evaluated at each direction.")
@click.option('--tensor', 'tensor_spec', default='paper', show_default=True, help=OPTION_HELP['tensor'])
@click.option('--B', 'field_spec', required=True, help="Field magnitude, e.g. 1T.")
@click.option('--tau', 'tau_spec', default=None, help=OPTION_HELP['tau'])
@click.option('--t', 't_spec', default=None, help=OPTION_HELP['t'])
@click.option('--allow-short-time', is_flag=True,
              help="Accept t < 10·tau; the lifetime average is then not converged.")
@click.option('--n-theta', type=click.IntRange(min=2), default=37, show_default=True)
@click.option('--n-phi', type=click.IntRange(min=2), default=72, show_default=True)
@click.option('--theta-range', type=(float, float), default=(0.0, 180.0), show_default=True,
              help="Polar window in degrees.")
@click.option('--phi-range', type=(float, float), default=(0.0, 360.0), show_default=True,
              help="Azimuth window in degrees (upper end excluded).")
@click.option('--branch', type=click.Choice(['up', 'down']), default='up', show_default=True)
@click.option('--initial-state', type=click.Choice(['lower', 'upper', 'plus']), default='lower',
              show_default=True, help="Initial branch nuclear state.")
@click.option('--workers', type=click.IntRange(min=1), default=None, help="Thread count (default MAP_WORKERS).")
@click.option('--out', default=None, help=OPTION_HELP['out'])
@click.option('--gnuplot', is_flag=True, help="Also write '<stem>.gp' (needs --out).")
@click.pass_context
@handle_errors
def map_command(ctx, metric, tensor_spec, field_spec, tau_spec, t_spec, allow_short_time, n_theta, n_phi,
                theta_range, phi_range, branch, initial_state, workers, out, gnuplot):
    metric = MapMetric(metric)
    needs_cycle = metric in (MapMetric.CYCLICITY, MapMetric.CORRECTED_FIDELITY)
    if needs_cycle and (tau_spec is None or t_spec is None):
        raise click.UsageError(f"--tau and --t are required for metric '{metric.value}'")
    if gnuplot and not out:
        raise click.UsageError("--gnuplot needs --out")

    tensor = parse_tensor(tensor_spec)
    config = MapConfig(
        metric=metric,
        b_magnitude=field_magnitude(field_spec, 'B'),
        tensor=tensor,
        electron_branch=branch,
        initial_state=initial_state,
        allow_short_time=allow_short_time,
        n_theta=n_theta,
        n_phi=n_phi,
        theta_window=tuple(np.radians(theta_range)),
        phi_window=tuple(np.radians(phi_range)),
        workers=workers,
        constants=_constants(ctx),
    )
    if needs_cycle:
        config.tau = parse_quantity(tau_spec, 'time', 'tau')
        config.t = parse_quantity(t_spec, 'time', 't')

    engine = MapEngine()
    result = engine.compute(config)
    frame = result.to_dataframe()

    info = engine.get_metric_info(metric)
    writer = OutputWriter(out) if out else None
    _emit(writer, frame, 'map', _arguments(ctx),
          {'metric': metric.value, 'unit': info.get('unit', ''), 'tensor': tensor.to_dict(),
           'warnings': result.warnings})
    if writer is not None:
        if gnuplot:
            writer.write_gnuplot(f"{info.get('name', metric.value)} at |B| = {config.b_magnitude:g} T",
                                 f"{info.get('name', metric.value)} {info.get('unit', '')}".strip(),
                                 frame['theta_deg'].to_numpy(), frame['phi_deg'].to_numpy(),
                                 log_scale=metric == MapMetric.CYCLICITY)
        theta, phi = result.argmax()
        click.echo(f"{len(frame)} nodes → {writer.csv_path}; max at theta={np.degrees(theta):.2f} deg, "
                   f"phi={np.degrees(phi):.2f} deg")


# ==================== DPM ====================

@cli.command(help=COMMAND_HELP['dpm'])
@click.option('--tensor', 'tensor_spec', default='paper', show_default=True, help=OPTION_HELP['tensor'])
@click.option('--B', 'field_spec', required=True, help="Field magnitude, e.g. 1T.")
@click.option('--resolution', type=click.IntRange(min=3), default=72, show_default=True,
              help="Number of meridians.")
@click.option('--branch', type=click.Choice(['up', 'down']), default='up', show_default=True)
@click.option('--max-delta-e/--no-max-delta-e', default=True, show_default=True,
              help="Refine the largest delta_e along the contour.")
@click.option('--out', default=None, help=OPTION_HELP['out'])
@click.pass_context
@handle_errors
def dpm(ctx, tensor_spec, field_spec, resolution, branch, max_delta_e, out):
    constants = _constants(ctx)
    tensor = parse_tensor(tensor_spec)
    magnitude = field_magnitude(field_spec, 'B')

    contour = dpm_contour(tensor, magnitude, resolution, branch, constants)
    frame = contour.to_dataframe()
    if contour.found:
        frame = pd.concat([frame, frame.iloc[[0]]], ignore_index=True)

    summary: Dict[str, Any] = {'found': contour.found, 'n_points': len(contour.directions),
                               'axis_index': contour.axis_index}
    extremum = None
    if contour.found and max_delta_e:
        extremum = dpm_max_delta_e(tensor, magnitude, resolution, branch, constants)
        summary['max_delta_e_MHz'] = extremum.delta_e_mhz

    writer = OutputWriter(out) if out else None
    _emit(writer, frame, 'dpm', _arguments(ctx), summary)
    if writer is not None:
        if not contour.found:
            click.echo("No DPM: the principal values share one sign")
        else:
            click.echo(f"DPM: {len(contour.directions)} points → {writer.csv_path}")
        if extremum is not None:
            click.echo(f"max |delta_e| along the DPM: {format_khz(abs(extremum.delta_e_mhz))}")


# ==================== SYNTH ====================

@cli.command(help=COMMAND_HELP['synth'])
@click.option('--tensor', 'tensor_spec', default='paper', show_default=True, help=OPTION_HELP['tensor'])
@click.option('--B', 'field_specs', multiple=True, help="Field specs; default is the 0-2 mT three-axis sweep.")
@click.option('--steps', type=click.IntRange(min=2), default=9, show_default=True,
              help="Points per axis for the default sweep.")
@click.option('--noise', 'noise_spec', default='0MHz', show_default=True, help="Gaussian noise RMS, e.g. 2kHz.")
@click.option('--sigma', 'sigma_spec', default=None, help="Reported uncertainty (defaults to --noise).")
@click.option('--seed', type=int, default=0, show_default=True, help=OPTION_HELP['seed'])
@click.option('--no-subsets', is_flag=True, help="Omit the subset column.")
@click.option('--out', default=None, help=OPTION_HELP['out'])
@click.pass_context
@handle_errors
def synth(ctx, tensor_spec, field_specs, steps, noise_spec, sigma_spec, seed, no_subsets, out):
    tensor = parse_tensor(tensor_spec)
    fields = parse_fields_list(list(field_specs), 'B') if field_specs else field_grid_sweep(steps)
    noise = parse_quantity(noise_spec, 'frequency', 'noise', allow_bare_zero=True)
    sigma = parse_quantity(sigma_spec, 'frequency', 'sigma') if sigma_spec else None

    dataset = synthesize_dataset(tensor, fields, noise_rms=noise, sigma=sigma, seed=seed,
                                 constants=_constants(ctx), label_subsets=not no_subsets)

    float_format = APP_CONFIG.get("OUTPUT_FLOAT_FORMAT", "%.9f")
    if out is None:
        click.echo(dataset.to_csv(float_format), nl=False)
        return

    writer = OutputWriter(out)
    ok, message = writer.write_csv_text(dataset.to_csv(float_format))
    if not ok:
        raise CommandError(f"out: {message}", 1)
    ok, message = writer.write_envelope('synth', _arguments(ctx),
                                        {'tensor': tensor.to_dict(), 'n_records': len(dataset)})
    if not ok:
        raise CommandError(f"out: {message}", 1)
    click.echo(f"{len(dataset)} records → {writer.csv_path}")


# ==================== ORIENTATIONS ====================

@cli.command(help=COMMAND_HELP['orientations'])
@click.option('--out', default=None, help="Output JSON path.")
@handle_errors
def orientations(out):
    text = orientations_to_json() + "\n"
    if out is None:
        click.echo(text, nl=False)
        return
    writer = OutputWriter(out)
    ok, message = writer.write_text(text, writer.stem.with_suffix('.json'))
    if not ok:
        raise CommandError(f"out: {message}", 1)
    click.echo(f"{len(orientation_set())} orientations → {message}")


def main(argv: Optional[List[str]] = None) -> int:
    """Console entry point; returns the process exit code"""
    try:
        cli.main(args=argv, prog_name='tcentre', standalone_mode=False)
        return 0
    except click.exceptions.Abort:
        click.echo("Aborted!", err=True)
        return 1
    except click.ClickException as e:
        e.show()
        return e.exit_code
    except click.exceptions.Exit as e:
        return e.exit_code
