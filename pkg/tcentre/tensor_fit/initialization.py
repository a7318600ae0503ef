"""
Fit Initialization
==================
Starting points for the tensor fit.

Zero-field records pin the principal values: every level is ¼(s·A) for one of four sign
triples, so the three highest zero-field lines fix A once we choose which triple is the
lowest level (4 ways) and which observed line goes to which upper triple (6 ways).
Each of the 24 candidates is crossed with a grid of γ values.
"""
import itertools
import logging
from typing import List, Tuple

import numpy as np

from tcentre.spin_core import HyperfineTensor, BUILTIN_TENSORS
from tcentre.spin_core.hamiltonian import ZERO_FIELD_SIGNS
from .dataset import ResonanceDataset

logger = logging.getLogger(__name__)

GAMMA_OFFSETS_DEG = (0.0, -30.0, 30.0, -60.0, 60.0, 90.0)
ZERO_FIELD_TOL_T = 1e-12


def zero_field_lines(dataset: ResonanceDataset) -> np.ndarray:
    """Observed zero-field frequencies, ascending"""
    mask = np.linalg.norm(dataset.fields, axis=1) <= ZERO_FIELD_TOL_T
    return np.sort(dataset.frequencies[mask])


def zero_field_candidates(top_lines: np.ndarray) -> List[Tuple[float, float, float]]:
    """
    Principal values consistent with three zero-field lines out of the lowest level

    Returns:
        Up to 24 (A_X, A_Y, A_Z) triples in MHz (duplicates removed)
    """
    lines = np.asarray(top_lines, dtype=float).reshape(-1)
    if lines.size != 3:
        return []

    candidates: List[Tuple[float, float, float]] = []
    for ground in range(4):
        uppers = [k for k in range(4) if k != ground]
        design = 0.25 * (ZERO_FIELD_SIGNS[uppers] - ZERO_FIELD_SIGNS[ground])
        for perm in itertools.permutations(range(3)):
            a, *_ = np.linalg.lstsq(design, lines[list(perm)], rcond=None)
            triple = tuple(float(v) for v in a)
            if not any(np.allclose(triple, c, atol=1e-9) for c in candidates):
                candidates.append(triple)
    return candidates


def gamma_grid(gamma0_deg: float) -> List[float]:
    return [gamma0_deg + off for off in GAMMA_OFFSETS_DEG]


def initial_guesses(dataset: ResonanceDataset, init: HyperfineTensor = None) -> List[HyperfineTensor]:
    """
    Candidate starting tensors

    Zero-field candidates when the dataset has at least three zero-field lines; otherwise the
    given initial tensor (or the built-in 'measured' tensor) with all permutations of its
    principal values. Each is crossed with the γ grid.
    """
    base = BUILTIN_TENSORS['measured'] if init is None else init
    alpha, beta, gamma0 = base.euler

    zf = zero_field_lines(dataset)
    principals = zero_field_candidates(zf[-3:]) if zf.size >= 3 else []
    if principals:
        logger.debug(f"🔧 {len(principals)} zero-field principal candidates from lines {np.round(zf[-3:], 6).tolist()}")
    else:
        principals = list(dict.fromkeys(itertools.permutations(base.principal)))
        logger.debug("🔧 No zero-field lines; seeding from the initial tensor")

    if init is not None and tuple(init.principal) not in principals:
        principals.insert(0, tuple(init.principal))

    return [HyperfineTensor(p, (alpha, beta, g), name='initial')
            for p in principals for g in gamma_grid(gamma0)]
