"""
Hyperfine Tensor
================
Principal values (MHz) plus a Z(γ)Y(β)Z(α) Euler frame (degrees).

Components:
- euler_rotation: Z(γ)Y(β)Z(α) body-axis rotation; columns are the X, Y, Z axes
- HyperfineTensor: immutable tensor value with crystal-frame accessors
- BUILTIN_TENSORS: 'paper' and its alias 'measured' (fitted z0), 'dft' (DFT principal values), 'zero'
- parse_tensor / load_tensor_file: inline and YAML/JSON tensor inputs
"""
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, Tuple, Union, Any

import numpy as np
import yaml
from scipy.spatial.transform import Rotation

from .constants import MHZ_TO_RAD_S
from .errors import InvalidTensorError

logger = logging.getLogger(__name__)

# Orientation of the z0 frame: hyperfine Z normal to the (1-10) defect plane
Z0_ALPHA_DEG = 135.0
Z0_BETA_DEG = 90.0
Z0_GAMMA_DEG = -45.0


def euler_rotation(alpha_deg: float, beta_deg: float, gamma_deg: float) -> np.ndarray:
    """
    Rotation Z(γ)Y(β)Z(α) about the moving (body) axes

    As a matrix R = Rz(α)·Ry(β)·Rz(γ): γ turns X and Y about the principal Z axis, then β and α
    place Z. For z0 the Z axis lies along [1-10] and X is 135° from [001].

    Args:
        alpha_deg, beta_deg, gamma_deg: Euler angles in degrees

    Returns:
        3x3 proper orthogonal matrix mapping the principal frame into the crystal frame
    """
    # intrinsic ZYZ composes as Rz(α)·Ry(β)·Rz(γ)
    return Rotation.from_euler("ZYZ", [alpha_deg, beta_deg, gamma_deg], degrees=True).as_matrix()


def symmetric_check(matrix: np.ndarray, rtol: float = 1e-12) -> bool:
    """True if matrix is symmetric within rtol·max|entry|"""
    m = np.asarray(matrix, dtype=float)
    if m.shape != (3, 3):
        return False
    scale = max(np.max(np.abs(m)), np.finfo(float).tiny)
    return bool(np.max(np.abs(m - m.T)) <= rtol * scale)


@dataclass(frozen=True)
class HyperfineTensor:
    """Hyperfine tensor as principal values (MHz) and Euler angles (degrees)"""
    principal: Tuple[float, float, float]
    euler: Tuple[float, float, float] = (Z0_ALPHA_DEG, Z0_BETA_DEG, Z0_GAMMA_DEG)
    name: str = "custom"

    def __post_init__(self):
        principal = tuple(float(v) for v in self.principal)
        euler = tuple(float(v) for v in self.euler)
        if len(principal) != 3 or len(euler) != 3:
            raise InvalidTensorError(
                f"principal values and Euler angles need 3 entries each, got {principal} / {euler}"
            )
        if not all(np.isfinite(principal + euler)):
            raise InvalidTensorError(f"non-finite tensor entries: {principal} / {euler}")
        object.__setattr__(self, 'principal', principal)
        object.__setattr__(self, 'euler', euler)

    @property
    def rotation(self) -> np.ndarray:
        return euler_rotation(*self.euler)

    @property
    def max_abs_mhz(self) -> float:
        return float(max(abs(v) for v in self.principal))

    def crystal_matrix_mhz(self) -> np.ndarray:
        """M = R·diag(A)·Rᵀ in MHz, symmetrised"""
        r = self.rotation
        m = r @ np.diag(self.principal) @ r.T
        return 0.5 * (m + m.T)

    def crystal_matrix(self) -> np.ndarray:
        """Crystal-frame tensor in rad/s"""
        return self.crystal_matrix_mhz() * MHZ_TO_RAD_S

    def principal_axis(self, index: int) -> np.ndarray:
        """Unit vector of principal axis 0=X, 1=Y, 2=Z in the crystal frame"""
        return self.rotation[:, index].copy()

    def with_gamma(self, gamma_deg: float) -> 'HyperfineTensor':
        return HyperfineTensor(self.principal, (self.euler[0], self.euler[1], gamma_deg), self.name)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'name': self.name,
            'principal_mhz': list(self.principal),
            'euler_deg': list(self.euler),
        }


BUILTIN_TENSORS: Dict[str, HyperfineTensor] = {
    'paper': HyperfineTensor((4.037, -4.499, -2.927), name='paper'),
    'measured': HyperfineTensor((4.037, -4.499, -2.927), name='measured'),
    'dft': HyperfineTensor((5.347, -4.172, -2.114), name='dft'),
    'zero': HyperfineTensor((0.0, 0.0, 0.0), name='zero'),
}


def get_builtin_tensor(name: str) -> HyperfineTensor:
    """Look up a built-in tensor by name"""
    try:
        return BUILTIN_TENSORS[name.lower()]
    except KeyError:
        raise InvalidTensorError(
            f"unknown built-in tensor '{name}', expected one of {sorted(BUILTIN_TENSORS)}"
        )


def _parse_triple(text: str, what: str) -> Tuple[float, float, float]:
    parts = [p for p in text.split(',') if p.strip()]
    if len(parts) != 3:
        raise InvalidTensorError(f"{what} needs 3 comma-separated numbers, got '{text}'")
    try:
        return tuple(float(p) for p in parts)
    except ValueError:
        raise InvalidTensorError(f"{what} is not numeric: '{text}'")


def tensor_from_mapping(data: Dict[str, Any], name: str = "file") -> HyperfineTensor:
    """Build a tensor from a mapping with principal_mhz and optional euler_deg"""
    if not isinstance(data, dict) or 'principal_mhz' not in data:
        raise InvalidTensorError("tensor mapping requires a 'principal_mhz' entry")

    principal = data['principal_mhz']
    euler = data.get('euler_deg', [Z0_ALPHA_DEG, Z0_BETA_DEG, Z0_GAMMA_DEG])
    if 'matrix_mhz' in data:
        raise InvalidTensorError("'matrix_mhz' is not supported; give principal values and Euler angles")

    try:
        return HyperfineTensor(tuple(principal), tuple(euler), str(data.get('name', name)))
    except (TypeError, ValueError) as e:
        raise InvalidTensorError(f"invalid tensor entries: {e}")


def load_tensor_file(path: Union[str, Path]) -> HyperfineTensor:
    """Load a YAML (or JSON) tensor file"""
    path = Path(path)
    try:
        with open(path, 'r', encoding='utf-8') as f:
            data = yaml.safe_load(f)
    except (OSError, yaml.YAMLError) as e:
        raise InvalidTensorError(f"cannot read tensor file {path}: {e}")

    logger.info(f"📂 Loaded tensor file {path}")
    return tensor_from_mapping(data, name=path.stem)


def parse_tensor(spec: str) -> HyperfineTensor:
    """
    Resolve a tensor argument

    Accepts a built-in name ('paper', 'measured', 'dft', 'zero'), an inline
    'AX,AY,AZ[@alpha,beta,gamma]' string, or a path to a YAML/JSON file.
    """
    spec = spec.strip()
    if spec.lower() in BUILTIN_TENSORS:
        return get_builtin_tensor(spec)

    if Path(spec).is_file():
        return load_tensor_file(spec)

    if '@' in spec:
        values, angles = spec.split('@', 1)
        return HyperfineTensor(_parse_triple(values, 'principal values'),
                               _parse_triple(angles, 'Euler angles'), 'inline')

    return HyperfineTensor(_parse_triple(spec, 'principal values'), name='inline')
