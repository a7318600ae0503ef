# tcentre/cli/output.py

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import pandas as pd
from jinja2 import Template

from tcentre import __version__
from tcentre.config import APP_CONFIG, config

# Setup logger
logger = logging.getLogger(__name__)

GNUPLOT_TEMPLATE = Template("""\
# {{ title }}
set datafile separator ','
set xlabel 'phi (deg)'
set ylabel 'theta (deg)'
set cblabel '{{ label }}'
set view map
set pm3d map
set palette rgbformulae 33,13,10
set xrange [{{ phi_min }}:{{ phi_max }}]
set yrange [{{ theta_max }}:{{ theta_min }}]
splot '{{ csv_name }}' every ::1 using 2:1:{{ value_expr }} with pm3d notitle
""")


def _json_default(value: Any):
    if isinstance(value, np.ndarray):
        return value.tolist()
    if isinstance(value, (np.floating, np.integer)):
        return value.item()
    if isinstance(value, complex):
        return [value.real, value.imag]
    raise TypeError(f"not JSON serialisable: {type(value).__name__}")


def to_json(data: Dict[str, Any]) -> str:
    """Stable JSON text (sorted keys, non-finite floats as strings)"""
    def clean(obj):
        if isinstance(obj, dict):
            return {str(k): clean(v) for k, v in obj.items()}
        if isinstance(obj, (list, tuple)):
            return [clean(v) for v in obj]
        if isinstance(obj, (float, np.floating)) and not np.isfinite(obj):
            return str(float(obj))
        return obj
    return json.dumps(clean(data), indent=2, sort_keys=True, default=_json_default) + "\n"


class OutputWriter:
    """Writes a command's primary CSV and its companions next to a common stem"""

    def __init__(self, out: str):
        """
        Args:
            out: '<stem>.csv' or '<stem>'; companions are '<stem>.json' and '<stem>.gp'
        """
        path = Path(out)
        self.stem = path.with_suffix('') if path.suffix.lower() == '.csv' else path
        self.float_format = APP_CONFIG.get("OUTPUT_FLOAT_FORMAT", "%.9f")
        self.written: List[str] = []

    @property
    def csv_path(self) -> Path:
        return self.stem.with_suffix('.csv')

    @property
    def json_path(self) -> Path:
        return self.stem.with_suffix('.json')

    @property
    def gnuplot_path(self) -> Path:
        return self.stem.with_suffix('.gp')

    # ==================== Basic Operations ====================

    def write_text(self, content: str, path: Path) -> Tuple[bool, str]:
        """
        Write a file atomically (temp file in the target directory, then rename)

        Returns:
            Tuple of (success: bool, path or error message: str)
        """
        directory = path.parent if str(path.parent) else Path('.')
        tmp_name: Optional[str] = None
        try:
            directory.mkdir(parents=True, exist_ok=True)
            with tempfile.NamedTemporaryFile('w', encoding='utf-8', newline='', dir=directory,
                                             prefix=f".{path.name}.", delete=False) as tmp:
                tmp.write(content)
                tmp_name = tmp.name
            os.replace(tmp_name, path)
            self.written.append(str(path))
            logger.info(f"📂 Wrote {path}")
            return True, str(path)
        except OSError as e:
            if tmp_name and os.path.exists(tmp_name):
                os.unlink(tmp_name)
            logger.error(f"❌ Failed to write {path}: {e}")
            return False, str(e)

    def write_table(self, frame: pd.DataFrame) -> Tuple[bool, str]:
        """Primary CSV output"""
        text = frame.to_csv(index=False, float_format=self.float_format, lineterminator='\n')
        return self.write_text(text, self.csv_path)

    def write_csv_text(self, text: str) -> Tuple[bool, str]:
        return self.write_text(text, self.csv_path)

    # ==================== Companions ====================

    def write_envelope(self, command: str, arguments: Dict[str, Any],
                       summary: Optional[Dict[str, Any]] = None) -> Tuple[bool, str]:
        """
        JSON provenance envelope: enough to re-run the command, no timestamps
        """
        if not config.is_feature_enabled('PROVENANCE'):
            logger.debug("Provenance disabled; skipping envelope")
            return True, ""
        envelope = {
            'tool': 'tcentre',
            'version': __version__,
            'command': command,
            'arguments': arguments,
            'settings': config.snapshot(),
            'outputs': [p.name for p in (self.csv_path,)],
            'summary': summary or {},
        }
        return self.write_text(to_json(envelope), self.json_path)

    def write_gnuplot(self, title: str, label: str, theta_deg: np.ndarray, phi_deg: np.ndarray,
                      log_scale: bool = False) -> Tuple[bool, str]:
        """Plot-ready gnuplot script for a direction-map CSV"""
        if not config.is_feature_enabled('GNUPLOT_SCRIPT'):
            logger.debug("Gnuplot scripts disabled")
            return True, ""
        script = GNUPLOT_TEMPLATE.render(
            title=title,
            label=label,
            csv_name=self.csv_path.name,
            theta_min=float(np.min(theta_deg)),
            theta_max=float(np.max(theta_deg)),
            phi_min=float(np.min(phi_deg)),
            phi_max=float(np.max(phi_deg)),
            value_expr='(log10($3))' if log_scale else '3',
        )
        return self.write_text(script, self.gnuplot_path)
