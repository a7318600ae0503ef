"""
Magnetic Field
==============
Field vector in tesla, silicon crystal basis. θ is measured from [001] and φ from [100].
"""
from dataclasses import dataclass
from typing import Tuple, Sequence

import numpy as np

from .errors import InvalidFieldError

# Named crystal directions
CRYSTAL_AXES = {
    '001': (0.0, 0.0, 1.0),
    '110': (1.0, 1.0, 0.0),
    '111': (1.0, 1.0, 1.0),
    '100': (1.0, 0.0, 0.0),
    '010': (0.0, 1.0, 0.0),
    '1-10': (1.0, -1.0, 0.0),
}


def unit(vector: Sequence[float]) -> np.ndarray:
    """Normalise a 3-vector; zero vectors raise InvalidFieldError"""
    v = np.asarray(vector, dtype=float).reshape(3)
    norm = np.linalg.norm(v)
    if not np.isfinite(norm) or norm == 0.0:
        raise InvalidFieldError(f"direction must be a non-zero finite 3-vector, got {v.tolist()}")
    return v / norm


def spherical_to_unit(theta: float, phi: float) -> np.ndarray:
    """Unit vector from polar θ (from [001]) and azimuth φ (from [100]), radians"""
    st = np.sin(theta)
    return np.array([st * np.cos(phi), st * np.sin(phi), np.cos(theta)])


def unit_to_spherical(direction: Sequence[float]) -> Tuple[float, float]:
    """(θ, φ) in radians with θ ∈ [0, π] and φ ∈ [0, 2π)"""
    b = unit(direction)
    theta = float(np.arccos(np.clip(b[2], -1.0, 1.0)))
    phi = float(np.arctan2(b[1], b[0]) % (2.0 * np.pi))
    return theta, phi


@dataclass(frozen=True)
class MagneticField:
    """Static magnetic field vector in tesla"""
    vector: Tuple[float, float, float]

    def __post_init__(self):
        v = np.asarray(self.vector, dtype=float).reshape(-1)
        if v.size != 3 or not np.all(np.isfinite(v)):
            raise InvalidFieldError(f"field must be a finite 3-vector in tesla, got {self.vector}")
        object.__setattr__(self, 'vector', tuple(float(x) for x in v))

    @classmethod
    def along(cls, magnitude: float, direction) -> 'MagneticField':
        """Field of given magnitude along a named axis ('001', '110', ...) or a 3-vector"""
        if isinstance(direction, str):
            key = direction.strip().strip('<>[]')
            if key not in CRYSTAL_AXES:
                raise InvalidFieldError(
                    f"unknown crystal direction '{direction}', expected one of {sorted(CRYSTAL_AXES)}"
                )
            direction = CRYSTAL_AXES[key]
        if magnitude == 0:
            return cls((0.0, 0.0, 0.0))
        return cls(tuple(magnitude * unit(direction)))

    @property
    def array(self) -> np.ndarray:
        return np.array(self.vector)

    @property
    def magnitude(self) -> float:
        return float(np.linalg.norm(self.vector))

    @property
    def direction(self) -> np.ndarray:
        """Unit direction b̂; undefined at zero field"""
        return unit(self.vector)

    @property
    def theta(self) -> float:
        return unit_to_spherical(self.vector)[0]

    @property
    def phi(self) -> float:
        return unit_to_spherical(self.vector)[1]

    def rotated(self, rotation: np.ndarray) -> 'MagneticField':
        return MagneticField(tuple(np.asarray(rotation) @ self.array))

    def to_dict(self) -> dict:
        return {'Bx_T': self.vector[0], 'By_T': self.vector[1], 'Bz_T': self.vector[2]}
