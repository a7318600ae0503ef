"""
Physical Constants
==================
CODATA magnetons and Planck constant from scipy.constants, with the electron and
hydrogen g-factors taken from configuration.

Gyromagnetic ratios are returned in rad/s/T. Hyperfine values are converted
between MHz (user-facing) and rad/s (internal) here and nowhere else.
"""
import logging
import threading
from dataclasses import dataclass, replace
from typing import Optional

import numpy as np
from scipy import constants as sc

from tcentre.config import PHYSICS_CONFIG

logger = logging.getLogger(__name__)

MHZ_TO_RAD_S = 2.0 * np.pi * 1e6
RAD_S_TO_MHZ = 1.0 / MHZ_TO_RAD_S


@dataclass(frozen=True)
class PhysicalConstants:
    """Constants entering the spin Hamiltonians"""
    g_e: float = 2.005
    g_n: float = 5.585
    mu_B: float = sc.physical_constants['Bohr magneton'][0]
    mu_N: float = sc.physical_constants['nuclear magneton'][0]
    hbar: float = sc.hbar

    def __post_init__(self):
        if self.g_e <= 0 or self.g_n <= 0:
            raise ValueError(f"g-factors must be positive, got g_e={self.g_e}, g_n={self.g_n}")

    @property
    def gamma_e(self) -> float:
        """Electron gyromagnetic ratio (rad/s/T), negative"""
        return -self.g_e * self.mu_B / self.hbar

    @property
    def gamma_n(self) -> float:
        """Hydrogen gyromagnetic ratio (rad/s/T), positive"""
        return self.g_n * self.mu_N / self.hbar

    def larmor_mhz(self, field_tesla: float) -> float:
        """Bare hydrogen Larmor frequency in MHz"""
        return self.gamma_n * abs(field_tesla) * RAD_S_TO_MHZ

    def with_overrides(self, g_e: Optional[float] = None, g_n: Optional[float] = None) -> 'PhysicalConstants':
        """Copy with g-factor overrides (None keeps the current value)"""
        return replace(
            self,
            g_e=self.g_e if g_e is None else float(g_e),
            g_n=self.g_n if g_n is None else float(g_n),
        )

    def to_dict(self) -> dict:
        return {
            'g_e': self.g_e,
            'g_n': self.g_n,
            'mu_B': self.mu_B,
            'mu_N': self.mu_N,
            'hbar': self.hbar,
        }


# Singleton default instance
_constants = None
_constants_lock = threading.Lock()


def get_constants() -> PhysicalConstants:
    """
    Return the configured default constants (singleton pattern)

    Built once from PHYSICS_CONFIG so every module shares the same g-factors.
    """
    global _constants

    if _constants is None:
        with _constants_lock:
            if _constants is None:
                _constants = PhysicalConstants(
                    g_e=PHYSICS_CONFIG.get("G_E", 2.005),
                    g_n=PHYSICS_CONFIG.get("G_N", 5.585),
                )
                logger.debug(
                    f"✅ Constants ready: g_e={_constants.g_e}, g_n={_constants.g_n}, "
                    f"gamma_n/2pi={_constants.gamma_n / (2 * np.pi) / 1e6:.6f} MHz/T"
                )

    return _constants


def mhz_to_rad_s(value):
    """MHz -> rad/s (scalars or arrays)"""
    return np.asarray(value, dtype=float) * MHZ_TO_RAD_S


def rad_s_to_mhz(value):
    """rad/s -> MHz (scalars or arrays)"""
    return np.asarray(value, dtype=float) * RAD_S_TO_MHZ
