# tcentre/config.py

import os
import logging
from dotenv import load_dotenv
from typing import Dict, Any

# Initialize logger
logger = logging.getLogger(__name__)
logging.basicConfig(level=logging.WARNING)

ENV_PREFIX = "TCENTRE_"


def _env(key: str, default: str) -> str:
    """Read a prefixed environment variable"""
    return os.getenv(f"{ENV_PREFIX}{key}", default)


def _env_flag(key: str, default: str = "true") -> bool:
    return _env(key, default).lower() == "true"


class Config:
    """Centralized configuration management for the T centre toolkit"""

    def __init__(self):
        self._load_config()

    def _load_config(self):
        """Load configuration from the local environment (.env supported)"""
        load_dotenv()

        self._load_physics_config()
        self._load_numerics_config()
        self._load_app_config()

        logger.debug("💻 Configuration loaded from environment")
        self._log_config_status()

    def _load_physics_config(self):
        """Physical constants that may be overridden per installation"""
        self.physics_config = {
            "G_E": float(_env("G_E", "2.005")),
            "G_N": float(_env("G_N", "5.585")),
        }

    def _load_numerics_config(self):
        """Tolerances and regime guards used by the numerical modules"""
        self.numerics_config = {
            # Linear algebra
            "HERMITIAN_RTOL": float(_env("HERMITIAN_RTOL", "1e-12")),
            "UNITARY_ATOL": float(_env("UNITARY_ATOL", "1e-10")),
            "DEGENERACY_ATOL": float(_env("DEGENERACY_ATOL", "1e-9")),

            # Spectra
            "SECULAR_FACTOR": float(_env("SECULAR_FACTOR", "10")),
            "EQUIVALENCE_TOL_MHZ": float(_env("EQUIVALENCE_TOL_MHZ", "1e-3")),
            "BAND_SPLIT_MHZ": float(_env("BAND_SPLIT_MHZ", "100")),

            # Decoherence
            "REGIME_MIN_T_OVER_TAU": float(_env("REGIME_MIN_T_OVER_TAU", "10")),
            "CYCLICITY_FLOOR": float(_env("CYCLICITY_FLOOR", "1e-15")),
            "DPM_TOL_HZ": float(_env("DPM_TOL_HZ", "1")),
            "LINDBLAD_RTOL": float(_env("LINDBLAD_RTOL", "1e-10")),
            "LINDBLAD_ATOL": float(_env("LINDBLAD_ATOL", "1e-12")),

            # Fitting
            "FIT_MAX_ITER": int(_env("FIT_MAX_ITER", "200")),
            "FIT_TOL": float(_env("FIT_TOL", "1e-12")),
            "FIT_RANK_RTOL": float(_env("FIT_RANK_RTOL", "1e-7")),
        }

    def _load_app_config(self):
        """Load application-specific configuration"""
        self.app_config = {
            # Output
            "OUTPUT_FLOAT_FORMAT": _env("OUTPUT_FLOAT_FORMAT", "%.9f"),

            # Performance
            "MAP_WORKERS": int(_env("MAP_WORKERS", "1")),

            # Logging
            "LOG_LEVEL": _env("LOG_LEVEL", "WARNING").upper(),

            # Features
            "ENABLE_GNUPLOT_SCRIPT": _env_flag("ENABLE_GNUPLOT_SCRIPT"),
            "ENABLE_PROVENANCE": _env_flag("ENABLE_PROVENANCE"),
        }

    def _log_config_status(self):
        """Log configuration status with basic validation"""

        issues = []

        # ═══════════════════════════════════════════════════════════════
        # PHYSICS
        # ═══════════════════════════════════════════════════════════════
        logger.debug("─" * 55)
        logger.debug("🧲 PHYSICAL CONSTANTS")

        for key, value in self.physics_config.items():
            if value <= 0:
                logger.error(f"   ❌ {key}: {value} (must be positive)")
                issues.append(f"Physics: {key} must be positive")
            else:
                logger.debug(f"   ✅ {key}: {value}")

        # ═══════════════════════════════════════════════════════════════
        # NUMERICS
        # ═══════════════════════════════════════════════════════════════
        logger.debug("─" * 55)
        logger.debug("🔧 NUMERICAL SETTINGS")

        for key, value in self.numerics_config.items():
            if value <= 0:
                logger.error(f"   ❌ {key}: {value} (must be positive)")
                issues.append(f"Numerics: {key} must be positive")
            else:
                logger.debug(f"   ✅ {key}: {value}")

        # ═══════════════════════════════════════════════════════════════
        # APPLICATION
        # ═══════════════════════════════════════════════════════════════
        logger.debug("─" * 55)
        logger.debug("📂 APPLICATION SETTINGS")

        workers = self.app_config.get("MAP_WORKERS", 1)
        if workers < 1:
            logger.warning(f"   ⚠️  MAP_WORKERS: {workers}, falling back to 1")
            self.app_config["MAP_WORKERS"] = 1
        else:
            logger.debug(f"   ✅ MAP_WORKERS: {workers}")

        logger.debug(f"   ✅ Gnuplot script: {'enabled' if self.app_config['ENABLE_GNUPLOT_SCRIPT'] else 'disabled'}")
        logger.debug(f"   ✅ Provenance: {'enabled' if self.app_config['ENABLE_PROVENANCE'] else 'disabled'}")

        # ═══════════════════════════════════════════════════════════════
        # SUMMARY
        # ═══════════════════════════════════════════════════════════════
        logger.debug("─" * 55)
        if issues:
            logger.warning(f"⚠️  CONFIGURATION ISSUES FOUND ({len(issues)}):")
            for issue in issues:
                logger.warning(f"   • {issue}")
        else:
            logger.debug("✅ ALL CONFIGURATIONS LOADED SUCCESSFULLY")
        logger.debug("─" * 55)

    def get_physics_setting(self, key: str, default: Any = None) -> Any:
        """Get physical constant setting"""
        return self.physics_config.get(key, default)

    def get_numeric_setting(self, key: str, default: Any = None) -> Any:
        """Get numerical tolerance or guard"""
        return self.numerics_config.get(key, default)

    def get_app_setting(self, key: str, default: Any = None) -> Any:
        """Get application setting"""
        return self.app_config.get(key, default)

    def is_feature_enabled(self, feature: str) -> bool:
        """Check if a feature is enabled"""
        return self.app_config.get(f"ENABLE_{feature.upper()}", True)

    def snapshot(self) -> Dict[str, Any]:
        """Resolved settings, for provenance envelopes"""
        return {
            "physics": dict(self.physics_config),
            "numerics": dict(self.numerics_config),
        }


# Create singleton instance
config = Config()

# Export commonly used values
PHYSICS_CONFIG = config.physics_config
NUMERICS_CONFIG = config.numerics_config
APP_CONFIG = config.app_config


# Export all
__all__ = [
    'config',
    'Config',
    'PHYSICS_CONFIG',
    'NUMERICS_CONFIG',
    'APP_CONFIG',
]
