"""
Dephasing Protection Manifold
=============================
Field directions where the ground-branch nuclear splitting equals the bare Larmor splitting
(δ_h = 0), so the memory accumulates no phase while the electron sits in the excited state.

The contour is traced on meridians about the principal axis whose principal value has the
minority sign (hyperfine X for the T centre): along that axis δ_h has one sign, in the plane
of the other two axes it has the other, and brentq locates the crossing on each meridian.
"""
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from scipy.optimize import brentq, minimize_scalar

from tcentre.config import NUMERICS_CONFIG
from tcentre.spectra import delta_h, effective_hyperfine, require_secular_regime
from tcentre.spin_core import PhysicalConstants, crystal_tensor, unit_to_spherical
from .cycle import CycleParams, cycle_density_matrix
from .errors import DecoherenceError
from .geometry import effective_field_geometry, flip_probability_limit

logger = logging.getLogger(__name__)

CONTOUR_COLUMNS = ['theta_deg', 'phi_deg']
BRACKET_SAMPLES = 16
ROOT_XTOL = 1e-14


@dataclass
class DPMContour:
    """Ordered δ_h = 0 points around the protected axis"""
    b_magnitude: float
    branch: str
    axis_index: Optional[int]           # principal axis the contour encircles, None if no DPM
    axis: Optional[np.ndarray]
    azimuths: np.ndarray = field(default_factory=lambda: np.zeros(0))   # rad, about the axis
    polar_offsets: np.ndarray = field(default_factory=lambda: np.zeros(0))  # rad, from the axis
    directions: np.ndarray = field(default_factory=lambda: np.zeros((0, 3)))

    @property
    def found(self) -> bool:
        return len(self.directions) > 0

    @property
    def angles(self) -> np.ndarray:
        """(n, 2) crystal-frame (θ, φ) in rad"""
        return np.array([unit_to_spherical(d) for d in self.directions]).reshape(-1, 2)

    def to_dataframe(self) -> pd.DataFrame:
        angles = np.degrees(self.angles)
        return pd.DataFrame(angles, columns=CONTOUR_COLUMNS)


@dataclass(frozen=True)
class DPMExtremum:
    """Largest |δ_e| along the contour"""
    delta_e_mhz: float
    direction: np.ndarray
    azimuth: float


@dataclass
class FlipScaling:
    """Long-lifetime P_flip along the contour as a function of |B|"""
    table: pd.DataFrame
    exponent: float


# ==================== HELPERS ====================

def protected_axis(a) -> Tuple[Optional[int], np.ndarray, np.ndarray]:
    """
    Principal frame and the index of the minority-sign principal value

    Returns:
        (index or None, principal values rad/s, axes as columns)
    """
    values, axes = np.linalg.eigh(crystal_tensor(a))
    signs = np.sign(values)
    if np.any(signs == 0):
        return None, values, axes
    positive = int(np.sum(signs > 0))
    if positive == 1:
        return int(np.argmax(signs > 0)), values, axes
    if positive == 2:
        return int(np.argmax(signs < 0)), values, axes
    return None, values, axes


def meridian_direction(axes: np.ndarray, index: int, offset: float, azimuth: float) -> np.ndarray:
    """Unit vector at polar offset from principal axis `index`, azimuth about it"""
    others = [k for k in range(3) if k != index]
    u, v1, v2 = axes[:, index], axes[:, others[0]], axes[:, others[1]]
    return np.cos(offset) * u + np.sin(offset) * (np.cos(azimuth) * v1 + np.sin(azimuth) * v2)


def _tolerance_mhz() -> float:
    return NUMERICS_CONFIG.get("DPM_TOL_HZ", 1.0) * 1e-6


def _meridian_root(objective, tol_mhz: float) -> Optional[float]:
    grid = np.linspace(0.0, 0.5 * np.pi, BRACKET_SAMPLES + 1)
    values = [objective(x) for x in grid]
    for lo, hi, f_lo, f_hi in zip(grid[:-1], grid[1:], values[:-1], values[1:]):
        if f_lo == 0.0:
            return float(lo)
        if f_lo * f_hi < 0:
            root = brentq(objective, lo, hi, xtol=ROOT_XTOL, maxiter=200)
            if abs(objective(root)) < tol_mhz:
                return float(root)
            logger.warning(f"⚠️ DPM root at offset {root:.6f} rad misses |δ_h| < {tol_mhz * 1e6:g} Hz")
            return None
    return None


# ==================== OPERATIONS ====================

def dpm_contour(a, b_magnitude: float, resolution: int = 72, branch: str = 'up',
                constants: PhysicalConstants = None) -> DPMContour:
    """
    Trace δ_h = 0 for one field magnitude

    Args:
        a: HyperfineTensor or crystal-frame array (rad/s)
        b_magnitude: |B| in tesla (secular regime)
        resolution: number of meridians
        branch: electron branch whose nuclear splitting is compared with γ_n|B|

    Returns:
        DPMContour; `found` is False when the tensor has no sign change

    Raises:
        SecularRegimeError: |B| below the secular guard
    """
    if resolution < 3:
        raise DecoherenceError(f"resolution: need at least 3 meridians, got {resolution}")
    index, _, axes = protected_axis(a)
    if index is None:
        logger.info("✅ No DPM: principal values share one sign")
        return DPMContour(b_magnitude=b_magnitude, branch=branch, axis_index=None, axis=None)

    require_secular_regime(b_magnitude * axes[:, index], a, constants)
    tol = _tolerance_mhz()

    azimuths, offsets, directions = [], [], []
    for psi in 2.0 * np.pi * np.arange(resolution) / resolution:
        def objective(offset, psi=psi):
            return delta_h(b_magnitude * meridian_direction(axes, index, offset, psi), a, branch, constants)

        root = _meridian_root(objective, tol)
        if root is None:
            continue
        azimuths.append(psi)
        offsets.append(root)
        directions.append(meridian_direction(axes, index, root, psi))

    contour = DPMContour(
        b_magnitude=b_magnitude,
        branch=branch,
        axis_index=index,
        axis=axes[:, index],
        azimuths=np.array(azimuths),
        polar_offsets=np.array(offsets),
        directions=np.array(directions).reshape(-1, 3),
    )
    logger.info(f"✅ DPM at |B|={b_magnitude:g} T: {len(directions)}/{resolution} meridians crossed")
    return contour


def dpm_point(a, b_magnitude: float, azimuth: float, branch: str = 'up',
              constants: PhysicalConstants = None) -> Optional[np.ndarray]:
    """Contour direction on one meridian, or None"""
    index, _, axes = protected_axis(a)
    if index is None:
        return None

    def objective(offset):
        return delta_h(b_magnitude * meridian_direction(axes, index, offset, azimuth), a, branch, constants)

    root = _meridian_root(objective, _tolerance_mhz())
    return None if root is None else meridian_direction(axes, index, root, azimuth)


def dpm_max_delta_e(a, b_magnitude: float, resolution: int = 72, branch: str = 'up',
                    constants: PhysicalConstants = None) -> Optional[DPMExtremum]:
    """
    Largest |δ_e| along the contour, refined by a bounded 1-D search over the azimuth

    Returns:
        DPMExtremum, or None when there is no DPM
    """
    contour = dpm_contour(a, b_magnitude, resolution, branch, constants)
    if not contour.found:
        return None

    def delta_e_at(direction: np.ndarray) -> float:
        return effective_hyperfine(b_magnitude * direction, a, constants)[1]

    coarse = np.array([abs(delta_e_at(d)) for d in contour.directions])
    k = int(np.argmax(coarse))
    step = 2.0 * np.pi / resolution

    def negative(psi: float) -> float:
        direction = dpm_point(a, b_magnitude, psi, branch, constants)
        return 0.0 if direction is None else -abs(delta_e_at(direction))

    psi0 = contour.azimuths[k]
    best = minimize_scalar(negative, bounds=(psi0 - step, psi0 + step), method='bounded',
                           options={'xatol': 1e-10})
    psi = float(best.x) if -best.fun >= coarse[k] else float(psi0)
    direction = dpm_point(a, b_magnitude, psi, branch, constants)
    value = delta_e_at(direction)
    logger.info(f"✅ Max |δ_e| on the DPM at |B|={b_magnitude:g} T: {abs(value) * 1e3:.3f} kHz")
    return DPMExtremum(delta_e_mhz=value, direction=direction, azimuth=psi)


def dpm_flip_scaling(a, fields: Sequence[float], tau: float, azimuth_deg: float = 45.0,
                     t_over_tau: float = 20.0, branch: str = 'up',
                     constants: PhysicalConstants = None) -> FlipScaling:
    """
    Long-lifetime P_flip along the contour versus |B|

    Simulates one cycle at the contour point of a fixed meridian for each field and fits the
    log-log slope.

    Raises:
        DecoherenceError: no DPM, or fewer than two usable fields
    """
    rows: List[dict] = []
    for b in np.asarray(fields, dtype=float).reshape(-1):
        direction = dpm_point(a, b, np.radians(azimuth_deg), branch, constants)
        if direction is None:
            raise DecoherenceError(f"fields: no DPM crossing at |B|={b:g} T, azimuth {azimuth_deg:g} deg")
        bvec = b * direction
        outcome = cycle_density_matrix(CycleParams(tau=tau, t=t_over_tau * tau, field=bvec, tensor=a,
                                                   electron_branch=branch, constants=constants))
        geometry = effective_field_geometry(bvec, a, branch, constants)
        theta, phi = unit_to_spherical(direction)
        rows.append({
            'B_T': b,
            'theta_deg': np.degrees(theta),
            'phi_deg': np.degrees(phi),
            'theta_q_rad': geometry.theta_q,
            'p_flip': outcome.p_flip,
            'p_flip_limit': flip_probability_limit(geometry),
        })

    table = pd.DataFrame(rows)
    if len(table) < 2:
        raise DecoherenceError("fields: need at least two field magnitudes for a slope")
    exponent = float(np.polyfit(np.log(table['B_T']), np.log(table['p_flip']), 1)[0])
    logger.info(f"✅ P_flip along the DPM scales as |B|^{exponent:.3f}")
    return FlipScaling(table=table, exponent=exponent)
