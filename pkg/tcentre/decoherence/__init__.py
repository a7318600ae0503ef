"""
Decoherence Module
==================
Nuclear memory decoherence over an optical excitation-emission cycle.

Components:
- geometry: effective field, θ_q, long-lifetime limits, branch nuclear Hamiltonian
- cycle: CycleParams, trajectory mixture, flip probability, cyclicity
- lindblad: master-equation oracle (expm / DOP853)
- corrections: average and detection-conditioned correction unitaries
- dpm: dephasing protection manifold and its δ_e / P_flip scaling
- maps: MapEngine over field directions
"""

from .errors import (
    DecoherenceError,
    ZeroProjectionError,
    RegimeError,
    SingularAverageError,
    IntegratorError,
)
from .geometry import (
    EffectiveFieldGeometry,
    effective_field_geometry,
    flip_probability_limit,
    flip_population_limit,
    corrected_flip_limit,
    moment_limit,
    branch_nuclear_hamiltonian,
)
from .cycle import (
    CycleParams,
    CycleOutcome,
    CycleSystem,
    INITIAL_SELECTORS,
    prepare_cycle,
    trajectory_state,
    cycle_density_matrix,
    cyclicity,
    flip_population,
    flip_probability_curve,
    excited_state_moment,
    projection_mixing,
    short_lifetime_infidelity,
    lifetime_average,
)
from .lindblad import lindblad_oracle, trace_distance, LINDBLAD_METHODS
from .corrections import (
    average_unitary,
    correction_unitary,
    detection_correction,
    corrected_outcome,
    detected_ensemble,
    detection_feedback_outcome,
)
from .dpm import DPMContour, DPMExtremum, FlipScaling, dpm_contour, dpm_max_delta_e, dpm_flip_scaling
from .maps import MapMetric, MapConfig, MapResult, MapEngine, map_over_directions, direction_grid, MAP_COLUMNS

__version__ = '1.0.0'

__all__ = [
    # Errors
    'DecoherenceError',
    'ZeroProjectionError',
    'RegimeError',
    'SingularAverageError',
    'IntegratorError',

    # Geometry
    'EffectiveFieldGeometry',
    'effective_field_geometry',
    'flip_probability_limit',
    'flip_population_limit',
    'corrected_flip_limit',
    'moment_limit',
    'branch_nuclear_hamiltonian',

    # Cycle
    'CycleParams',
    'CycleOutcome',
    'CycleSystem',
    'INITIAL_SELECTORS',
    'prepare_cycle',
    'trajectory_state',
    'cycle_density_matrix',
    'cyclicity',
    'flip_population',
    'flip_probability_curve',
    'excited_state_moment',
    'projection_mixing',
    'short_lifetime_infidelity',
    'lifetime_average',
    'lindblad_oracle',
    'trace_distance',
    'LINDBLAD_METHODS',

    # Corrections
    'average_unitary',
    'correction_unitary',
    'detection_correction',
    'corrected_outcome',
    'detected_ensemble',
    'detection_feedback_outcome',

    # DPM and maps
    'DPMContour',
    'DPMExtremum',
    'FlipScaling',
    'dpm_contour',
    'dpm_max_delta_e',
    'dpm_flip_scaling',
    'MapMetric',
    'MapConfig',
    'MapResult',
    'MapEngine',
    'map_over_directions',
    'direction_grid',
    'MAP_COLUMNS',
]
