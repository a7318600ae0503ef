"""
Synthetic Spectra
=================
Line-shape synthesis for predicted transitions and the matching peak extractor.

Components:
- SpectrumProfile: frequency grid with non-negative amplitude
- synthesize_spectrum: unit-area Lorentzian/Gaussian lines plus seeded noise
- extract_peaks: scipy.signal.find_peaks with parabolic refinement
- match_peaks: nearest-peak matching with unresolved flags

Line weights are uniform unless given; contrast amplitudes are not modelled.
"""
import logging
from dataclasses import dataclass
from typing import List, Optional, Sequence, Union

import numpy as np
import pandas as pd
from scipy.integrate import trapezoid
from scipy.signal import find_peaks

from .errors import SpectraError
from .transitions import TransitionList

logger = logging.getLogger(__name__)

LINE_SHAPES = ('lorentzian', 'gaussian')
FWHM_TO_SIGMA = 1.0 / (2.0 * np.sqrt(2.0 * np.log(2.0)))

# Grid defaults relative to the linewidth
POINTS_PER_LINEWIDTH = 20
GRID_MARGIN_LINEWIDTHS = 10


@dataclass
class SpectrumProfile:
    """Sampled spectrum; linewidth is the FWHM in MHz"""
    frequency: np.ndarray
    amplitude: np.ndarray
    linewidth: float
    shape: str = 'lorentzian'

    @property
    def step(self) -> float:
        return float(self.frequency[1] - self.frequency[0]) if len(self.frequency) > 1 else 0.0

    def area(self, lo: float = -np.inf, hi: float = np.inf) -> float:
        mask = (self.frequency >= lo) & (self.frequency <= hi)
        return float(trapezoid(self.amplitude[mask], self.frequency[mask]))

    def to_dataframe(self) -> pd.DataFrame:
        return pd.DataFrame({'freq_MHz': self.frequency, 'amplitude': self.amplitude})


@dataclass(frozen=True)
class PeakMatch:
    line_mhz: float
    peak_mhz: Optional[float]
    resolved: bool


def line_shape(x: np.ndarray, center: float, fwhm: float, shape: str = 'lorentzian') -> np.ndarray:
    """Unit-area line shape"""
    if shape == 'lorentzian':
        hw = 0.5 * fwhm
        return (hw / np.pi) / ((x - center) ** 2 + hw ** 2)
    if shape == 'gaussian':
        sigma = fwhm * FWHM_TO_SIGMA
        return np.exp(-0.5 * ((x - center) / sigma) ** 2) / (sigma * np.sqrt(2.0 * np.pi))
    raise SpectraError(f"unknown line shape '{shape}', expected one of {LINE_SHAPES}")


def _frequencies(lines: Union[TransitionList, Sequence[float]]) -> np.ndarray:
    if isinstance(lines, TransitionList):
        return lines.frequencies
    return np.asarray(lines, dtype=float).reshape(-1)


def default_grid(freqs: np.ndarray, linewidth: float) -> np.ndarray:
    lo = float(np.min(freqs)) - GRID_MARGIN_LINEWIDTHS * linewidth
    hi = float(np.max(freqs)) + GRID_MARGIN_LINEWIDTHS * linewidth
    step = linewidth / POINTS_PER_LINEWIDTH
    return lo + step * np.arange(int(np.ceil((hi - lo) / step)) + 1)


def synthesize_spectrum(lines: Union[TransitionList, Sequence[float]],
                        linewidth: float,
                        noise_rms: float = 0.0,
                        weights: Optional[Sequence[float]] = None,
                        grid: Optional[np.ndarray] = None,
                        shape: str = 'lorentzian',
                        seed: int = 0) -> SpectrumProfile:
    """
    Sum of unit-area lines plus optional Gaussian noise

    Args:
        lines: TransitionList or frequencies in MHz
        linewidth: FWHM in MHz, > 0
        noise_rms: noise standard deviation (amplitude units)
        weights: per-line weights (uniform by default)
        grid: frequency grid; by default spans the lines with a 10-linewidth margin
        shape: 'lorentzian' or 'gaussian'
        seed: noise seed

    Returns:
        SpectrumProfile with amplitude clipped at zero
    """
    if linewidth <= 0:
        raise SpectraError(f"linewidth must be positive, got {linewidth}")
    freqs = _frequencies(lines)
    if freqs.size == 0:
        raise SpectraError("cannot synthesize a spectrum without lines")

    w = np.ones_like(freqs) if weights is None else np.asarray(weights, dtype=float).reshape(-1)
    if w.shape != freqs.shape:
        raise SpectraError(f"weights length {w.size} does not match {freqs.size} lines")

    x = default_grid(freqs, linewidth) if grid is None else np.asarray(grid, dtype=float)
    amplitude = np.zeros_like(x)
    for f0, wk in zip(freqs, w):
        amplitude += wk * line_shape(x, f0, linewidth, shape)

    if noise_rms > 0:
        rng = np.random.default_rng(seed)
        amplitude = amplitude + rng.normal(0.0, noise_rms, size=x.shape)

    return SpectrumProfile(frequency=x, amplitude=np.clip(amplitude, 0.0, None), linewidth=linewidth, shape=shape)


def extract_peaks(profile: SpectrumProfile, prominence: Optional[float] = None) -> np.ndarray:
    """
    Peak positions in MHz, ascending

    Local maxima from find_peaks, refined by a parabola through the three samples
    around each maximum. Default prominence is 5% of the largest amplitude.
    """
    y = profile.amplitude
    if y.size < 3 or np.max(y) <= 0:
        return np.array([])
    prominence = 0.05 * float(np.max(y)) if prominence is None else prominence
    idx, _ = find_peaks(y, prominence=prominence)

    step = profile.step
    refined: List[float] = []
    for i in idx:
        y0, y1, y2 = y[i - 1], y[i], y[i + 1]
        denom = y0 - 2.0 * y1 + y2
        offset = 0.5 * (y0 - y2) / denom if denom != 0 else 0.0
        refined.append(float(profile.frequency[i] + offset * step))

    logger.debug(f"🔧 Extracted {len(refined)} peaks")
    return np.array(refined)


def match_peaks(lines: Union[TransitionList, Sequence[float]], peaks: Sequence[float]) -> List[PeakMatch]:
    """
    Attach every line to its nearest peak

    Lines that share a peak are flagged unresolved; lines with no peaks at all get None.
    """
    freqs = np.sort(_frequencies(lines))
    peaks = np.asarray(peaks, dtype=float).reshape(-1)
    if peaks.size == 0:
        return [PeakMatch(float(f), None, False) for f in freqs]

    nearest = [int(np.argmin(np.abs(peaks - f))) for f in freqs]
    counts = np.bincount(nearest, minlength=peaks.size)
    return [PeakMatch(float(f), float(peaks[k]), bool(counts[k] == 1)) for f, k in zip(freqs, nearest)]
