"""
Spectra Module
==============
Ground-state transition lines, effective hyperfine quantities and synthetic ODMR spectra.

Components:
- transitions: TransitionList, transition_frequencies, ensemble_transitions, split_bands
- effective: effective_hyperfine, delta_h, branch_eigensystem, secular guard
- profile: SpectrumProfile, synthesize_spectrum, extract_peaks, match_peaks
- errors: SpectraError, SecularRegimeError
"""

from .transitions import (
    TransitionLine,
    TransitionList,
    transition_frequencies,
    ensemble_transitions,
    split_bands,
    distinct_frequencies,
    LINE_COLUMNS,
)
from .errors import SpectraError, SecularRegimeError
from .effective import (
    BranchEigensystem,
    BRANCHES,
    branch_eigensystem,
    check_secular_regime,
    require_secular_regime,
    max_abs_hyperfine,
    nuclear_splittings,
    secular_splittings,
    effective_hyperfine,
    delta_h,
)
from .profile import (
    SpectrumProfile,
    PeakMatch,
    line_shape,
    synthesize_spectrum,
    extract_peaks,
    match_peaks,
)

__version__ = '1.0.0'

__all__ = [
    # Errors
    'SpectraError',
    'SecularRegimeError',

    # Transitions
    'TransitionLine',
    'TransitionList',
    'transition_frequencies',
    'ensemble_transitions',
    'split_bands',
    'distinct_frequencies',
    'LINE_COLUMNS',

    # Effective hyperfine
    'BranchEigensystem',
    'BRANCHES',
    'branch_eigensystem',
    'check_secular_regime',
    'require_secular_regime',
    'max_abs_hyperfine',
    'nuclear_splittings',
    'secular_splittings',
    'effective_hyperfine',
    'delta_h',

    # Profiles
    'SpectrumProfile',
    'PeakMatch',
    'line_shape',
    'synthesize_spectrum',
    'extract_peaks',
    'match_peaks',
]
