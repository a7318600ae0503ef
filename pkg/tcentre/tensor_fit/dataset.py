"""
Resonance Dataset
=================
Observed resonances: field vector (T), frequency and 1σ uncertainty (MHz), with optional
orientation-subset label and transition-pair hint.

CSV columns: Bx_T,By_T,Bz_T,freq_MHz,sigma_MHz[,subset][,pair]; header required, '#' comments.
The pair hint is written 'lower-upper' with ground level indices 0..3, e.g. '0-3'.
"""
import io
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .errors import DatasetParseError

logger = logging.getLogger(__name__)

FIELD_COLUMNS = ['Bx_T', 'By_T', 'Bz_T']
REQUIRED_COLUMNS = FIELD_COLUMNS + ['freq_MHz', 'sigma_MHz']
OPTIONAL_COLUMNS = ['subset', 'pair']

# Field vectors closer than this (tesla) belong to the same measurement field
FIELD_GROUP_TOL = 1e-12


def parse_pair(value: str, row: int = -1) -> Optional[Tuple[int, int]]:
    """'i-j' -> (i, j); empty -> None"""
    if value is None or (isinstance(value, float) and np.isnan(value)):
        return None
    text = str(value).strip()
    if not text:
        return None
    parts = text.split('-')
    where = f" (row {row})" if row >= 0 else ""
    if len(parts) != 2:
        raise DatasetParseError(f"pair{where}: expected 'lower-upper', got '{text}'")
    try:
        lower, upper = int(parts[0]), int(parts[1])
    except ValueError:
        raise DatasetParseError(f"pair{where}: indices must be integers, got '{text}'")
    return lower, upper


def format_pair(pair: Optional[Tuple[int, int]]) -> str:
    return "" if pair is None else f"{pair[0]}-{pair[1]}"


@dataclass
class ResonanceDataset:
    """Resonance records backed by a DataFrame"""
    frame: pd.DataFrame

    def __post_init__(self):
        self.frame = self.frame.reset_index(drop=True)

    def __len__(self) -> int:
        return len(self.frame)

    @property
    def fields(self) -> np.ndarray:
        return self.frame[FIELD_COLUMNS].to_numpy(dtype=float)

    @property
    def frequencies(self) -> np.ndarray:
        return self.frame['freq_MHz'].to_numpy(dtype=float)

    @property
    def sigmas(self) -> np.ndarray:
        return self.frame['sigma_MHz'].to_numpy(dtype=float)

    @property
    def has_subsets(self) -> bool:
        return 'subset' in self.frame.columns and self.frame['subset'].astype(str).str.len().gt(0).any()

    @property
    def subsets(self) -> List[str]:
        if 'subset' not in self.frame.columns:
            return [""] * len(self)
        return ["" if pd.isna(v) else str(v) for v in self.frame['subset']]

    @property
    def pairs(self) -> List[Optional[Tuple[int, int]]]:
        if 'pair' not in self.frame.columns:
            return [None] * len(self)
        return [parse_pair(v, i) for i, v in enumerate(self.frame['pair'])]

    def field_groups(self) -> List[Tuple[np.ndarray, np.ndarray]]:
        """
        Records grouped by identical field vector

        Returns:
            List of (field vector, record indices), in order of first appearance
        """
        groups: List[Tuple[np.ndarray, List[int]]] = []
        for i, b in enumerate(self.fields):
            for vec, members in groups:
                if np.max(np.abs(vec - b)) <= FIELD_GROUP_TOL:
                    members.append(i)
                    break
            else:
                groups.append((b, [i]))
        return [(vec, np.array(members, dtype=int)) for vec, members in groups]

    def directions(self, tol: float = 1e-6) -> List[np.ndarray]:
        """Distinct field lines (b and -b count once); zero-field records excluded"""
        found: List[np.ndarray] = []
        for b in self.fields:
            norm = np.linalg.norm(b)
            if norm == 0:
                continue
            u = b / norm
            if not any(min(np.linalg.norm(u - d), np.linalg.norm(u + d)) <= tol for d in found):
                found.append(u)
        return found

    def with_sigma_scale(self, factor: float) -> 'ResonanceDataset':
        frame = self.frame.copy()
        frame['sigma_MHz'] = frame['sigma_MHz'] * factor
        return ResonanceDataset(frame)

    def permuted(self, order: Sequence[int]) -> 'ResonanceDataset':
        return ResonanceDataset(self.frame.iloc[list(order)])

    def to_csv(self, float_format: str = "%.9f") -> str:
        """CSV text with header"""
        return self.frame.to_csv(index=False, float_format=float_format, lineterminator='\n')

    @classmethod
    def from_records(cls, records: Sequence[Dict]) -> 'ResonanceDataset':
        """Build from dicts with the CSV column names (pair may be a tuple)"""
        rows = []
        for rec in records:
            row = {col: float(rec[col]) for col in REQUIRED_COLUMNS}
            if 'subset' in rec:
                row['subset'] = str(rec['subset'])
            if 'pair' in rec:
                row['pair'] = rec['pair'] if isinstance(rec['pair'], str) else format_pair(rec['pair'])
            rows.append(row)
        frame = pd.DataFrame(rows, columns=_columns_for(rows))
        return cls(frame)


def _columns_for(rows: List[Dict]) -> List[str]:
    cols = list(REQUIRED_COLUMNS)
    for extra in OPTIONAL_COLUMNS:
        if any(extra in r for r in rows):
            cols.append(extra)
    return cols


def _coerce_numeric(frame: pd.DataFrame) -> pd.DataFrame:
    for col in REQUIRED_COLUMNS:
        converted = pd.to_numeric(frame[col], errors='coerce')
        bad = converted.isna() & frame[col].notna()
        missing = frame[col].isna()
        if bad.any() or missing.any():
            row = int(np.argmax((bad | missing).to_numpy()))
            raise DatasetParseError(f"{col} (row {row}): not a number: '{frame[col].iloc[row]}'")
        frame[col] = converted.astype(float)
    return frame


def read_dataset(source: Union[str, Path, io.TextIOBase]) -> ResonanceDataset:
    """
    Read a resonance dataset CSV

    Args:
        source: path or text stream

    Raises:
        DatasetParseError: unreadable file, missing columns, or non-numeric entries
    """
    try:
        frame = pd.read_csv(source, comment='#', skipinitialspace=True,
                            dtype={'subset': str, 'pair': str}, encoding='utf-8')
    except FileNotFoundError:
        raise DatasetParseError(f"dataset file not found: {source}")
    except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
        raise DatasetParseError(f"cannot parse dataset: {e}")

    frame.columns = [str(c).strip() for c in frame.columns]
    missing = [c for c in REQUIRED_COLUMNS if c not in frame.columns]
    if missing:
        raise DatasetParseError(f"missing column(s): {', '.join(missing)}")

    unknown = [c for c in frame.columns if c not in REQUIRED_COLUMNS + OPTIONAL_COLUMNS]
    if unknown:
        raise DatasetParseError(f"unknown column(s): {', '.join(unknown)}")

    frame = _coerce_numeric(frame)
    for col in OPTIONAL_COLUMNS:
        if col in frame.columns:
            frame[col] = frame[col].fillna("").astype(str).str.strip()

    dataset = ResonanceDataset(frame)
    _ = dataset.pairs  # surface malformed pair hints at read time
    logger.info(f"📂 Read {len(dataset)} resonance records")
    return dataset

