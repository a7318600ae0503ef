"""
Synthetic Resonance Data
========================
Noiseless or noisy resonance datasets generated from a known tensor, for fitter tests and
the synth command.
"""
import logging
from typing import List, Optional, Sequence

import numpy as np

from tcentre.config import NUMERICS_CONFIG
from tcentre.orientations import OrientationId, orientation_set, partition_by_field
from tcentre.spectra import ensemble_transitions
from tcentre.spin_core import HyperfineTensor, MagneticField, PhysicalConstants
from .dataset import ResonanceDataset
from .errors import TensorFitError

logger = logging.getLogger(__name__)

SWEEP_AXES = ('001', '110', '111')
SWEEP_MAX_T = 2e-3
SWEEP_STEPS = 9


def field_grid_sweep(steps: int = SWEEP_STEPS, max_field: float = SWEEP_MAX_T,
                    axes: Sequence[str] = SWEEP_AXES) -> np.ndarray:
    """
    Low-field sweep grid along the three principal cubic directions

    Each axis gets `steps` equally spaced magnitudes from 0 to max_field; the shared
    zero-field point is listed once, first.

    Returns:
        (n_fields, 3) array in tesla
    """
    if steps < 2:
        raise TensorFitError(f"steps: need at least 2 points per axis, got {steps}")
    grid: List[np.ndarray] = [np.zeros(3)]
    for axis in axes:
        for magnitude in np.linspace(0.0, max_field, steps)[1:]:
            grid.append(MagneticField.along(float(magnitude), axis).array)
    return np.array(grid)


def _subset_labels(b: np.ndarray, tensor: HyperfineTensor, labels: List[str],
                   orientations: List[OrientationId], constants: Optional[PhysicalConstants]) -> List[str]:
    magnitude = float(np.linalg.norm(b))
    if magnitude == 0.0:
        return ["s0"] * len(labels)
    partition = partition_by_field(b / magnitude, tensor, magnitude,
                                   orientations=orientations, constants=constants)
    return [f"s{partition.class_of(label)}" for label in labels]


def synthesize_dataset(tensor: HyperfineTensor,
                       fields: np.ndarray,
                       noise_rms: float = 0.0,
                       sigma: Optional[float] = None,
                       seed: int = 0,
                       orientations: Optional[List[OrientationId]] = None,
                       constants: PhysicalConstants = None,
                       label_subsets: bool = True) -> ResonanceDataset:
    """
    Distinct ensemble lines at each field, optionally with Gaussian noise

    Args:
        tensor: z0 tensor generating the data
        fields: (n, 3) field vectors in tesla
        noise_rms: Gaussian noise added to each frequency (MHz)
        sigma: reported uncertainty; defaults to noise_rms and is required when noise_rms is 0
        seed: noise seed
        label_subsets: attach the orientation-subset class of each line

    Returns:
        ResonanceDataset, one record per distinct line per field
    """
    if noise_rms < 0:
        raise TensorFitError(f"noise: must be ≥ 0 MHz, got {noise_rms}")
    if sigma is None:
        if noise_rms == 0:
            raise TensorFitError("sigma: required when noise is zero")
        sigma = noise_rms
    if sigma <= 0:
        raise TensorFitError(f"sigma: must be > 0 MHz, got {sigma}")

    orientations = orientation_set() if orientations is None else orientations
    tol = NUMERICS_CONFIG.get("EQUIVALENCE_TOL_MHZ", 1e-3)
    rng = np.random.default_rng(seed)
    records = []

    for b in np.asarray(fields, dtype=float).reshape(-1, 3):
        lines = ensemble_transitions(b, tensor, orientations, constants).lines
        kept = []
        for line in lines:
            if not kept or line.freq_mhz - kept[-1].freq_mhz > tol:
                kept.append(line)

        subsets = _subset_labels(b, tensor, [ln.orientation for ln in kept], orientations, constants) \
            if label_subsets else None
        for k, line in enumerate(kept):
            rec = {
                'Bx_T': b[0], 'By_T': b[1], 'Bz_T': b[2],
                'freq_MHz': line.freq_mhz + (rng.normal(0.0, noise_rms) if noise_rms > 0 else 0.0),
                'sigma_MHz': sigma,
            }
            if subsets is not None:
                rec['subset'] = subsets[k]
            records.append(rec)

    logger.info(f"✅ Synthesized {len(records)} resonances over {len(fields)} fields (noise {noise_rms} MHz, seed {seed})")
    return ResonanceDataset.from_records(records)
