"""
Formatting utilities for command-line summaries
Human-readable text for stdout; files carry the full-precision values
"""
import logging
from typing import List, Optional, Union

import numpy as np

logger = logging.getLogger(__name__)


def format_number(value: Union[int, float, None], decimals: int = 6) -> str:
    """
    Format a number for display

    Args:
        value: Number to format
        decimals: Number of decimal places

    Returns:
        Formatted string ('-' for missing values, '∞' for infinity)
    """
    try:
        if value is None or np.isnan(value):
            return "-"
        if np.isinf(value):
            return "∞" if value > 0 else "-∞"
        return f"{float(value):.{decimals}f}"
    except (ValueError, TypeError):
        return "-"


def format_khz(value_mhz: Optional[float], decimals: int = 3) -> str:
    """MHz value shown in kHz"""
    if value_mhz is None:
        return "-"
    return f"{format_number(value_mhz * 1e3, decimals)} kHz"


def format_with_error(value: float, error: float, unit: str = "", decimals: int = 4) -> str:
    """'value ± error unit'"""
    text = f"{format_number(value, decimals)} ± {format_number(error, decimals)}"
    return f"{text} {unit}".rstrip()


def format_probability(value: Optional[float]) -> str:
    if value is None:
        return "-"
    if value != 0 and abs(value) < 1e-3:
        return f"{value:.3e}"
    return format_number(value, 6)


def format_fit_summary(result) -> List[str]:
    """
    Summary lines for a FitResult

    Args:
        result: tensor_fit.FitResult

    Returns:
        List of lines (no trailing newline)
    """
    lines = ["Fitted hyperfine tensor (fixed-frame gauge)"]
    for name, value, error in zip(('A_X', 'A_Y', 'A_Z'), result.principal, result.principal_err):
        lines.append(f"  {name:<6} {format_with_error(value, error, 'MHz')}")
    for name, value, error in zip(('alpha', 'beta', 'gamma'), result.euler, result.euler_err):
        if error > 0 or name == 'gamma':
            lines.append(f"  {name:<6} {format_with_error(value, error, 'deg', 2)}")
        else:
            lines.append(f"  {name:<6} {format_number(value, 2)} deg (fixed)")

    lines.append(f"  chi2 = {format_number(result.chi2, 4)}  dof = {result.dof}  "
                 f"rms = {format_khz(result.rms_mhz)}")
    for subset, rms in sorted(result.subset_rms.items()):
        lines.append(f"  subset {subset}: rms {format_khz(rms)}")
    for solution in result.degenerate_solutions:
        lines.append(f"  degenerate solution: gamma = {format_number(solution['gamma_deg'], 2)} deg "
                     f"(Δchi2 = {format_number(solution.get('delta_chi2', 0.0), 6)})")
    return lines


def format_lines_table(frame, limit: int = 20) -> List[str]:
    """First rows of a transition table"""
    rows = [f"{'freq_MHz':>14}  {'lower':>5}  {'upper':>5}  orientation"]
    for _, row in frame.head(limit).iterrows():
        rows.append(f"{row['freq_MHz']:>14.6f}  {int(row['lower']):>5}  {int(row['upper']):>5}  {row['orientation']}")
    if len(frame) > limit:
        rows.append(f"... {len(frame) - limit} more")
    return rows
