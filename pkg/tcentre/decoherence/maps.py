"""
Direction Map Engine
====================
Evaluates a decoherence metric on a (θ, φ) grid of field directions at fixed |B|.

Metrics:
- CYCLICITY: C = 1/P_flip from the trajectory mixture (+∞ sentinel on the hyperfine axes)
- DELTA_H: δ_h in MHz (signed)
- DELTA_E: δ_e = Δ↓ − Δ↑ in MHz
- CORRECTED_FIDELITY: fidelity after the average-unitary correction

Grid nodes are independent; with more than one worker they are evaluated on a thread pool
and gathered back in grid order.
"""
import logging
from abc import ABC, abstractmethod
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd

from tcentre.config import APP_CONFIG
from tcentre.spectra import delta_h, effective_hyperfine
from tcentre.spin_core import PhysicalConstants, spherical_to_unit
from .corrections import corrected_outcome
from .cycle import CycleParams, cycle_density_matrix
from .errors import DecoherenceError

logger = logging.getLogger(__name__)

MAP_COLUMNS = ['theta_deg', 'phi_deg', 'value']


class MapMetric(Enum):
    """Available direction-map metrics"""
    CYCLICITY = "cyclicity"
    DELTA_H = "delta_h"
    DELTA_E = "delta_e"
    CORRECTED_FIDELITY = "corrected_fidelity"


@dataclass
class MapConfig:
    """Configuration for a direction map"""
    metric: MapMetric
    b_magnitude: float                  # tesla
    tensor: Any                         # HyperfineTensor or crystal-frame array (rad/s)

    # Cycle settings (cyclicity / corrected fidelity)
    tau: float = 10e-9
    t: float = 100e-9
    electron_branch: str = 'up'
    initial_state: str = 'lower'
    allow_short_time: bool = False

    # Grid
    n_theta: int = 37
    n_phi: int = 72
    theta_window: Tuple[float, float] = (0.0, np.pi)
    phi_window: Tuple[float, float] = (0.0, 2.0 * np.pi)

    workers: Optional[int] = None       # defaults to MAP_WORKERS
    constants: Optional[PhysicalConstants] = None

    def cycle_params(self, direction: np.ndarray) -> CycleParams:
        return CycleParams(tau=self.tau, t=self.t, field=self.b_magnitude * direction, tensor=self.tensor,
                           electron_branch=self.electron_branch, initial_state=self.initial_state,
                           allow_short_time=self.allow_short_time, constants=self.constants)


@dataclass
class MapResult:
    """Metric values on the grid, values[i, j] at (theta[i], phi[j])"""
    metric: MapMetric
    theta: np.ndarray
    phi: np.ndarray
    values: np.ndarray
    config: MapConfig
    warnings: List[str] = field(default_factory=list)

    def to_dataframe(self) -> pd.DataFrame:
        """Rows in grid order: θ outer, φ inner"""
        tt, pp = np.meshgrid(self.theta, self.phi, indexing='ij')
        return pd.DataFrame({
            'theta_deg': np.degrees(tt.ravel()),
            'phi_deg': np.degrees(pp.ravel()),
            'value': self.values.ravel(),
        }, columns=MAP_COLUMNS)

    def argmax(self) -> Tuple[float, float]:
        """(θ, φ) of the largest value; +∞ counts as largest"""
        i, j = np.unravel_index(int(np.argmax(self.values)), self.values.shape)
        return float(self.theta[i]), float(self.phi[j])


# ==================== GRID ====================

def direction_grid(n_theta: int, n_phi: int,
                   theta_window: Tuple[float, float] = (0.0, np.pi),
                   phi_window: Tuple[float, float] = (0.0, 2.0 * np.pi)) -> Tuple[np.ndarray, np.ndarray]:
    """
    θ nodes include both ends of the window; φ nodes exclude the upper end (periodic)
    """
    if n_theta < 2 or n_phi < 2:
        raise DecoherenceError(f"resolution: need at least 2x2 nodes, got {n_theta}x{n_phi}")
    t0, t1 = theta_window
    p0, p1 = phi_window
    theta = t0 + (t1 - t0) * np.arange(n_theta) / (n_theta - 1)
    phi = p0 + (p1 - p0) * np.arange(n_phi) / n_phi
    return theta, phi


# ==================== METRICS ====================

class DirectionMetric(ABC):
    """Abstract base class for direction-map metrics"""

    @abstractmethod
    def evaluate(self, direction: np.ndarray, config: MapConfig) -> float:
        """
        Metric value for one field direction

        Args:
            direction: unit vector
            config: map configuration

        Returns:
            Metric value (float, may be +∞ for cyclicity)
        """
        pass


class CyclicityMetric(DirectionMetric):
    """C = 1/P_flip over one optical cycle"""

    def evaluate(self, direction: np.ndarray, config: MapConfig) -> float:
        return cycle_density_matrix(config.cycle_params(direction)).cyclicity


class DeltaHMetric(DirectionMetric):
    """Ground-branch splitting minus the bare Larmor splitting"""

    def evaluate(self, direction: np.ndarray, config: MapConfig) -> float:
        return delta_h(config.b_magnitude * direction, config.tensor, config.electron_branch, config.constants)


class DeltaEMetric(DirectionMetric):
    """Electron-dependent splitting difference Δ↓ − Δ↑"""

    def evaluate(self, direction: np.ndarray, config: MapConfig) -> float:
        return effective_hyperfine(config.b_magnitude * direction, config.tensor, config.constants)[1]


class CorrectedFidelityMetric(DirectionMetric):
    """Fidelity after the average-unitary correction"""

    def evaluate(self, direction: np.ndarray, config: MapConfig) -> float:
        return corrected_outcome(config.cycle_params(direction)).fidelity


# ==================== ENGINE ====================

class MapEngine:
    """
    Main engine for direction maps
    """

    METRIC_INFO = {
        MapMetric.CYCLICITY: {
            'name': 'Nuclear cyclicity',
            'unit': 'cycles',
            'description': '1/P_flip after one excitation-emission cycle',
        },
        MapMetric.DELTA_H: {
            'name': 'Hole-branch splitting offset',
            'unit': 'MHz',
            'description': 'Ground nuclear splitting minus γ_n|B|/2π',
        },
        MapMetric.DELTA_E: {
            'name': 'Electron splitting difference',
            'unit': 'MHz',
            'description': 'Δ↓e − Δ↑e',
        },
        MapMetric.CORRECTED_FIDELITY: {
            'name': 'Corrected fidelity',
            'unit': '',
            'description': 'Memory fidelity after the average-unitary correction',
        },
    }

    def __init__(self):
        self.metrics = {
            MapMetric.CYCLICITY: CyclicityMetric(),
            MapMetric.DELTA_H: DeltaHMetric(),
            MapMetric.DELTA_E: DeltaEMetric(),
            MapMetric.CORRECTED_FIDELITY: CorrectedFidelityMetric(),
        }

    def compute(self, config: MapConfig) -> MapResult:
        """
        Evaluate the metric on every grid node

        Args:
            config: map configuration

        Returns:
            MapResult with values in grid order
        """
        metric = self.metrics.get(config.metric)
        if metric is None:
            raise DecoherenceError(f"metric: unknown map metric {config.metric}")

        theta, phi = direction_grid(config.n_theta, config.n_phi, config.theta_window, config.phi_window)
        nodes = [spherical_to_unit(th, ph) for th in theta for ph in phi]
        workers = config.workers or APP_CONFIG.get("MAP_WORKERS", 1)

        logger.info(f"🔧 {config.metric.value} map: {len(theta)}x{len(phi)} nodes at "
                    f"|B|={config.b_magnitude:g} T on {workers} worker(s)")

        if workers > 1:
            with ThreadPoolExecutor(max_workers=workers) as pool:
                values = list(pool.map(lambda d: metric.evaluate(d, config), nodes))
        else:
            values = [metric.evaluate(d, config) for d in nodes]

        result = MapResult(
            metric=config.metric,
            theta=theta,
            phi=phi,
            values=np.array(values, dtype=float).reshape(len(theta), len(phi)),
            config=config,
        )
        if np.all(np.isinf(result.values)):
            result.warnings.append("every node hit the cyclicity sentinel")
        logger.info(f"✅ {config.metric.value} map complete")
        return result

    def get_metric_info(self, metric: MapMetric) -> Dict[str, Any]:
        """Get information about a metric"""
        return self.METRIC_INFO.get(metric, {})

    def get_all_metrics(self) -> Dict[MapMetric, Dict[str, Any]]:
        """Get information about all available metrics"""
        return self.METRIC_INFO


def map_over_directions(metric, b_magnitude: float, tensor, tau: float = 10e-9, t: float = 100e-9,
                        n_theta: int = 37, n_phi: int = 72, **options) -> MapResult:
    """
    Convenience wrapper around MapEngine.compute

    Args:
        metric: MapMetric or its value string
        options: any further MapConfig field
    """
    try:
        metric = metric if isinstance(metric, MapMetric) else MapMetric(metric)
    except ValueError:
        choices = ', '.join(m.value for m in MapMetric)
        raise DecoherenceError(f"metric: '{metric}' is not one of {choices}")
    config = MapConfig(metric=metric, b_magnitude=b_magnitude, tensor=tensor, tau=tau, t=t,
                       n_theta=n_theta, n_phi=n_phi, **options)
    return MapEngine().compute(config)
