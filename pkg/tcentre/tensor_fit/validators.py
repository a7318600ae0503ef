"""
Tensor Fit Validator
====================
Well-posedness rules for resonance datasets and fit options.
Each check returns a list of error messages naming the offending field.
"""
import logging
from typing import List, Tuple

import numpy as np

from .dataset import ResonanceDataset

logger = logging.getLogger(__name__)


class DatasetValidator:
    """Validator for resonance datasets and fit settings"""

    def __init__(self):
        # Configuration constants
        self.MIN_RECORDS = 8
        self.MIN_DIRECTIONS = 2
        self.MAX_LEVEL_INDEX = 3
        self.MAX_FIELD_T = 20.0
        self.MIN_FIT_ITER = 1

        # Valid values
        self.VALID_FIT_MODES = ['gamma', 'full']

    # ==================== Record Checks ====================

    def validate_records(self, dataset: ResonanceDataset) -> List[str]:
        """Per-record checks: finite values, positive σ, non-negative frequency, pair hints"""
        errors = []

        fields = dataset.fields
        freqs = dataset.frequencies
        sigmas = dataset.sigmas

        for row in np.nonzero(~np.all(np.isfinite(fields), axis=1))[0]:
            errors.append(f"Bx_T/By_T/Bz_T (row {row}): field must be finite")
        for row in np.nonzero(np.linalg.norm(np.nan_to_num(fields), axis=1) > self.MAX_FIELD_T)[0]:
            errors.append(f"Bx_T/By_T/Bz_T (row {row}): |B| exceeds {self.MAX_FIELD_T} T")
        for row in np.nonzero(~np.isfinite(freqs) | (freqs < 0))[0]:
            errors.append(f"freq_MHz (row {row}): frequency must be finite and ≥ 0, got {freqs[row]}")
        for row in np.nonzero(~np.isfinite(sigmas) | (sigmas <= 0))[0]:
            errors.append(f"sigma_MHz (row {row}): uncertainty must be > 0, got {sigmas[row]}")

        for row, pair in enumerate(dataset.pairs):
            if pair is None:
                continue
            lower, upper = pair
            if not (0 <= lower < upper <= self.MAX_LEVEL_INDEX):
                errors.append(f"pair (row {row}): need 0 ≤ lower < upper ≤ {self.MAX_LEVEL_INDEX}, got {lower}-{upper}")

        return errors

    # ==================== Well-posedness ====================

    def validate_coverage(self, dataset: ResonanceDataset) -> List[str]:
        """Enough records along enough field directions"""
        errors = []

        if len(dataset) < self.MIN_RECORDS:
            errors.append(f"records: need at least {self.MIN_RECORDS} resonances, got {len(dataset)}")

        n_dirs = len(dataset.directions())
        if n_dirs < self.MIN_DIRECTIONS:
            errors.append(f"field direction: need at least {self.MIN_DIRECTIONS} distinct directions, got {n_dirs}")

        return errors

    def validate_dataset(self, dataset: ResonanceDataset) -> List[str]:
        """
        Validate a dataset for fitting

        Returns:
            List of error messages (empty if valid)
        """
        errors = self.validate_records(dataset)
        errors.extend(self.validate_coverage(dataset))
        if errors:
            logger.debug(f"❌ Dataset validation found {len(errors)} problem(s)")
        return errors

    # ==================== Options ====================

    def validate_fit_mode(self, mode: str) -> Tuple[bool, str]:
        if mode not in self.VALID_FIT_MODES:
            return False, f"fit mode: must be one of {', '.join(self.VALID_FIT_MODES)}, got '{mode}'"
        return True, ""

    def validate_max_iter(self, max_iter: int) -> Tuple[bool, str]:
        if max_iter < self.MIN_FIT_ITER:
            return False, f"max_iter: must be ≥ {self.MIN_FIT_ITER}, got {max_iter}"
        return True, ""
