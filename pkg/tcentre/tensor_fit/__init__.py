"""
Tensor Fit Module
=================
Hyperfine tensor extraction from multi-field, multi-axis resonance data.

Components:
- dataset: ResonanceDataset, read_dataset (CSV with '#' comments)
- validators: DatasetValidator (well-posedness rules)
- assignment: assign_peaks (optimal one-to-one matching)
- initialization: zero-field seeded starting tensors
- synthetic: field_grid_sweep, synthesize_dataset
- fit_service: TensorFitService, fit_tensor, fit_uncertainties, gauge helpers
"""

from .errors import (
    TensorFitError,
    DatasetParseError,
    DatasetValidationError,
    UnderdeterminedFitError,
    FitConvergenceError,
)
from .dataset import ResonanceDataset, read_dataset, parse_pair, format_pair, REQUIRED_COLUMNS
from .validators import DatasetValidator
from .assignment import Assignment, assign_peaks, pair_mask
from .initialization import initial_guesses, zero_field_candidates, zero_field_lines
from .synthetic import field_grid_sweep, synthesize_dataset
from .fit_service import (
    FitOptions,
    FitResult,
    TensorFitService,
    fit_tensor,
    fit_uncertainties,
    canonical_gamma,
    mirror_gamma,
    GAUGE_GUIDANCE,
)

__version__ = '1.0.0'

__all__ = [
    # Errors
    'TensorFitError',
    'DatasetParseError',
    'DatasetValidationError',
    'UnderdeterminedFitError',
    'FitConvergenceError',

    # Data
    'ResonanceDataset',
    'read_dataset',
    'parse_pair',
    'format_pair',
    'REQUIRED_COLUMNS',
    'DatasetValidator',
    'field_grid_sweep',
    'synthesize_dataset',

    # Assignment and starts
    'Assignment',
    'assign_peaks',
    'pair_mask',
    'initial_guesses',
    'zero_field_candidates',
    'zero_field_lines',

    # Fitting
    'FitOptions',
    'FitResult',
    'TensorFitService',
    'fit_tensor',
    'fit_uncertainties',
    'canonical_gamma',
    'mirror_gamma',
    'GAUGE_GUIDANCE',
]
