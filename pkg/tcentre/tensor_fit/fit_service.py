"""
Tensor Fit Service
==================
Simultaneous least-squares fit of the hyperfine tensor to resonances from all orientation
subsets:
- Predicted lines pooled over the 12 orientations at every field
- Observation-to-line assignment re-solved on every residual evaluation
- Levenberg-Marquardt (scipy least_squares, method='lm') from zero-field seeded starts
- Covariance from the weighted Jacobian at the optimum
- Gauge canonicalisation of γ and the mirror (degenerate) solution

Parameters are (A_X, A_Y, A_Z, γ) with (α, β) fixed by default; the 'full' mode also frees
α and β but the cubic orbit then makes the frame non-unique.
"""
import logging
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import least_squares

from tcentre.config import config
from tcentre.orientations import OrientationId, orientation_set
from tcentre.spin_core import (
    HyperfineTensor,
    PhysicalConstants,
    get_constants,
    ground_hamiltonian_stack,
    RAD_S_TO_MHZ,
)
from tcentre.spin_core.tensor import Z0_ALPHA_DEG, Z0_BETA_DEG
from .assignment import assign_peaks
from .dataset import ResonanceDataset
from .errors import (
    DatasetValidationError,
    FitConvergenceError,
    UnderdeterminedFitError,
)
from .initialization import initial_guesses
from .validators import DatasetValidator

logger = logging.getLogger(__name__)

GAMMA_PARAMETERS = ['A_X_MHz', 'A_Y_MHz', 'A_Z_MHz', 'gamma_deg']
FULL_PARAMETERS = ['A_X_MHz', 'A_Y_MHz', 'A_Z_MHz', 'alpha_deg', 'beta_deg', 'gamma_deg']

# Central-difference steps
STEP_MHZ = 1e-6
STEP_DEG = 1e-5

# Relative margin a candidate must beat the incumbent by
IMPROVEMENT_RTOL = 1e-9
# χ² per record treated as an exact fit
TINY_CHI2 = 1e-20

GAUGE_GUIDANCE = (
    "The two γ solutions, γ and -180° - γ with the same principal values, give identical spectra. "
    "Choose the one whose positive-value hyperfine axis X points approximately from the bound "
    "electron site to the hydrogen nucleus (X at 135° from [001] for z0, i.e. γ = -45° for the "
    "built-in tensor)."
)

_IU = np.triu_indices(4, k=1)


# ==================== OPTIONS AND RESULTS ====================

@dataclass
class FitOptions:
    """Fit settings; None means the configured default"""
    mode: str = 'gamma'
    alpha_deg: Optional[float] = None
    beta_deg: Optional[float] = None
    max_iter: Optional[int] = None
    tol: Optional[float] = None
    absolute_sigma: bool = False
    n_starts: int = 3


@dataclass
class FitResult:
    """Outcome of a tensor fit"""
    principal: Tuple[float, float, float]
    principal_err: Tuple[float, float, float]
    euler: Tuple[float, float, float]
    euler_err: Tuple[float, float, float]
    parameter_names: List[str]
    covariance: np.ndarray
    jacobian: np.ndarray
    chi2: float
    dof: int
    rms_mhz: float
    residuals_mhz: np.ndarray
    assignments: List[Dict[str, Any]] = field(default_factory=list)
    subset_rms: Dict[str, float] = field(default_factory=dict)
    degenerate_solutions: List[Dict[str, Any]] = field(default_factory=list)
    absolute_sigma: bool = False
    mode: str = 'gamma'
    nfev: int = 0
    message: str = ""

    @property
    def chi2_red(self) -> float:
        return self.chi2 / self.dof if self.dof > 0 else float('nan')

    @property
    def gamma_deg(self) -> float:
        return self.euler[2]

    @property
    def gamma_err(self) -> float:
        return self.euler_err[2]

    @property
    def tensor(self) -> HyperfineTensor:
        return HyperfineTensor(self.principal, self.euler, name='fit')

    def to_dict(self) -> Dict[str, Any]:
        return {
            'principal_mhz': [float(v) for v in self.principal],
            'principal_err_mhz': [float(v) for v in self.principal_err],
            'euler_deg': [float(v) for v in self.euler],
            'euler_err_deg': [float(v) for v in self.euler_err],
            'mode': self.mode,
            'parameters': list(self.parameter_names),
            'covariance': np.asarray(self.covariance, dtype=float).tolist(),
            'chi2': float(self.chi2),
            'dof': int(self.dof),
            'chi2_red': float(self.chi2_red) if self.dof > 0 else None,
            'rms_mhz': float(self.rms_mhz),
            'subset_rms_mhz': {k: float(v) for k, v in sorted(self.subset_rms.items())},
            'degenerate_solutions': self.degenerate_solutions,
            'absolute_sigma': bool(self.absolute_sigma),
            'nfev': int(self.nfev),
            'message': self.message,
        }


# ==================== GAUGE ====================

def canonical_gamma(gamma_deg: float) -> float:
    """
    Representative of γ in [-90°, 0°]

    γ and γ+180° give the same tensor; γ and -γ give tensors related by the C₂ about [001].
    """
    g = ((gamma_deg + 90.0) % 180.0) - 90.0
    return -g if g > 0 else g


def mirror_gamma(gamma_deg: float) -> float:
    """
    The other γ with identical ensemble spectra, in [-180°, -90°]

    Returns -180° - γ_c for the canonical γ_c in [-90°, 0°], with the principal values unchanged.
    It is γ_c reflected about -90°, which equals -γ_c mod 180°, so both tensors lie on one cubic
    orbit. This coincides with γ_c - 90° only at γ_c = -45°; at other angles γ_c - 90° is a
    different tensor and is not degenerate.
    """
    return -180.0 - canonical_gamma(gamma_deg)


@dataclass
class _Problem:
    """Dataset arrays grouped by field"""
    fields: np.ndarray                      # (G, 3)
    groups: List[np.ndarray]                # record indices per field
    freqs: np.ndarray
    sigmas: np.ndarray
    pairs: List[Optional[Tuple[int, int]]]
    rotations: np.ndarray                   # (12, 3, 3)
    labels: List[str]


@dataclass
class _Evaluation:
    residuals: np.ndarray                   # weighted
    predicted: np.ndarray                   # matched predicted frequency per record (MHz)
    orientation: List[str]
    lower: np.ndarray
    upper: np.ndarray
    matched: np.ndarray                     # bool per record


# ==================== SERVICE CLASS ====================

class TensorFitService:
    """Service for fitting hyperfine tensors to resonance datasets"""

    def __init__(self, constants: PhysicalConstants = None, orientations: Optional[List[OrientationId]] = None):
        self.constants = get_constants() if constants is None else constants
        self.orientations = orientation_set() if orientations is None else orientations
        self.validator = DatasetValidator()

        # Configuration
        self.MAX_ITER = config.get_numeric_setting('FIT_MAX_ITER', 200)
        self.TOL = config.get_numeric_setting('FIT_TOL', 1e-12)
        self.RANK_RTOL = config.get_numeric_setting('FIT_RANK_RTOL', 1e-7)

    # ==================== PARAMETERS ====================

    def _parameter_names(self, options: FitOptions) -> List[str]:
        return FULL_PARAMETERS if options.mode == 'full' else GAMMA_PARAMETERS

    def _fixed_angles(self, options: FitOptions, init: Optional[HyperfineTensor]) -> Tuple[float, float]:
        alpha = options.alpha_deg if options.alpha_deg is not None else (init.euler[0] if init else Z0_ALPHA_DEG)
        beta = options.beta_deg if options.beta_deg is not None else (init.euler[1] if init else Z0_BETA_DEG)
        return float(alpha), float(beta)

    def _pack(self, tensor: HyperfineTensor, options: FitOptions) -> np.ndarray:
        a = list(tensor.principal)
        if options.mode == 'full':
            return np.array(a + list(tensor.euler))
        return np.array(a + [tensor.euler[2]])

    def _unpack(self, params: np.ndarray, options: FitOptions, fixed: Tuple[float, float]) -> HyperfineTensor:
        p = np.asarray(params, dtype=float)
        if options.mode == 'full':
            return HyperfineTensor(tuple(p[:3]), tuple(p[3:6]), name='fit')
        return HyperfineTensor(tuple(p[:3]), (fixed[0], fixed[1], p[3]), name='fit')

    def _steps(self, options: FitOptions) -> np.ndarray:
        n_angles = 3 if options.mode == 'full' else 1
        return np.array([STEP_MHZ] * 3 + [STEP_DEG] * n_angles)

    # ==================== RESIDUALS ====================

    def _prepare(self, dataset: ResonanceDataset) -> _Problem:
        groups = dataset.field_groups()
        return _Problem(
            fields=np.array([g[0] for g in groups]),
            groups=[g[1] for g in groups],
            freqs=dataset.frequencies,
            sigmas=dataset.sigmas,
            pairs=dataset.pairs,
            rotations=np.array([oid.rotation for oid in self.orientations]),
            labels=[oid.label for oid in self.orientations],
        )

    def _predicted_lines(self, tensor: HyperfineTensor, problem: _Problem):
        """Per-field pooled lines: freqs (G, 6n), orientation/lower/upper (6n,)"""
        m = tensor.crystal_matrix()
        tensors = np.einsum('kab,bc,kdc->kad', problem.rotations, m, problem.rotations)
        levels = np.linalg.eigvalsh(ground_hamiltonian_stack(problem.fields, tensors, self.constants))
        lines = (levels[..., _IU[1]] - levels[..., _IU[0]]) * RAD_S_TO_MHZ       # (n, G, 6)
        n = len(problem.rotations)
        freqs = np.transpose(lines, (1, 0, 2)).reshape(len(problem.fields), n * 6)
        orient = np.repeat(np.arange(n), 6)
        lower = np.tile(_IU[0], n)
        upper = np.tile(_IU[1], n)
        return freqs, orient, lower, upper

    def _evaluate(self, tensor: HyperfineTensor, problem: _Problem) -> _Evaluation:
        n_rec = len(problem.freqs)
        predicted = np.zeros(n_rec)
        orient_idx = np.zeros(n_rec, dtype=int)
        lower = np.zeros(n_rec, dtype=int)
        upper = np.zeros(n_rec, dtype=int)
        matched = np.zeros(n_rec, dtype=bool)

        freqs, orient, lo, up = self._predicted_lines(tensor, problem)
        for g, members in enumerate(problem.groups):
            order = np.argsort(freqs[g], kind='stable')
            pred = freqs[g][order]
            lo_s, up_s = lo[order], up[order]

            hints = [problem.pairs[i] for i in members]
            allowed = None
            if any(h is not None for h in hints):
                allowed = np.ones((len(members), len(pred)), dtype=bool)
                for r, h in enumerate(hints):
                    if h is not None:
                        allowed[r] = (lo_s == h[0]) & (up_s == h[1])

            assignment = assign_peaks(pred, problem.freqs[members], allowed)
            for r, rec in enumerate(members):
                j = assignment.predicted_index[r]
                matched[rec] = j >= 0
                if j < 0:
                    # More observations than allowed lines: nearest allowed line
                    candidates = np.nonzero(allowed[r])[0] if allowed is not None and allowed[r].any() \
                        else np.arange(len(pred))
                    j = candidates[np.argmin(np.abs(pred[candidates] - problem.freqs[rec]))]
                predicted[rec] = pred[j]
                orient_idx[rec] = orient[order[j]]
                lower[rec] = lo_s[j]
                upper[rec] = up_s[j]

        residuals = (problem.freqs - predicted) / problem.sigmas
        return _Evaluation(
            residuals=residuals,
            predicted=predicted,
            orientation=[problem.labels[k] for k in orient_idx],
            lower=lower,
            upper=upper,
            matched=matched,
        )

    def residuals(self, params: np.ndarray, problem: _Problem, options: FitOptions,
                  fixed: Tuple[float, float]) -> np.ndarray:
        return self._evaluate(self._unpack(params, options, fixed), problem).residuals

    def jacobian(self, params: np.ndarray, problem: _Problem, options: FitOptions,
                 fixed: Tuple[float, float]) -> np.ndarray:
        """Central-difference Jacobian of the weighted residuals"""
        p = np.asarray(params, dtype=float)
        steps = self._steps(options)
        cols = []
        for i, h in enumerate(steps):
            up, down = p.copy(), p.copy()
            up[i] += h
            down[i] -= h
            cols.append((self.residuals(up, problem, options, fixed)
                         - self.residuals(down, problem, options, fixed)) / (2.0 * h))
        return np.column_stack(cols)

    def cost(self, dataset: ResonanceDataset, tensor: HyperfineTensor) -> float:
        """χ² = Σ((observed − assigned predicted)/σ)²"""
        r = self._evaluate(tensor, self._prepare(dataset)).residuals
        return float(r @ r)

    # ==================== UNCERTAINTIES ====================

    def rank_check(self, jacobian: np.ndarray, names: List[str], rtol: float = None) -> None:
        """
        Raise when the weighted Jacobian is rank deficient

        Unconstrained parameters are the dominant components of the right singular vectors
        with relative singular value below rtol.
        """
        rtol = self.RANK_RTOL if rtol is None else rtol
        _, s, vt = np.linalg.svd(jacobian, full_matrices=False)
        if s.size == 0 or s[0] == 0:
            raise UnderdeterminedFitError(list(names))
        weak = np.nonzero(s < rtol * s[0])[0]
        if weak.size:
            unconstrained = []
            for k in weak:
                name = names[int(np.argmax(np.abs(vt[k])))]
                if name not in unconstrained:
                    unconstrained.append(name)
            raise UnderdeterminedFitError(unconstrained)

    def fit_uncertainties(self, result: FitResult) -> np.ndarray:
        """
        Parameter covariance (JᵀWJ)⁻¹, scaled by reduced χ² unless absolute_sigma

        Raises:
            UnderdeterminedFitError: singular normal matrix
        """
        j = np.asarray(result.jacobian, dtype=float)
        self.rank_check(j, result.parameter_names)
        try:
            cov = np.linalg.inv(j.T @ j)
        except np.linalg.LinAlgError:
            raise UnderdeterminedFitError(list(result.parameter_names), "normal matrix JᵀWJ is singular")
        if not result.absolute_sigma:
            cov = cov * (result.chi2_red if result.dof > 0 else 0.0)
        return 0.5 * (cov + cov.T)

    # ==================== FIT ====================

    def _validate(self, dataset: ResonanceDataset, options: FitOptions) -> None:
        errors = self.validator.validate_dataset(dataset)
        ok, msg = self.validator.validate_fit_mode(options.mode)
        if not ok:
            errors.append(msg)
        ok, msg = self.validator.validate_max_iter(self.MAX_ITER if options.max_iter is None else options.max_iter)
        if not ok:
            errors.append(msg)
        if errors:
            raise DatasetValidationError(errors)

    def _run(self, x0: np.ndarray, problem: _Problem, options: FitOptions, fixed: Tuple[float, float]):
        tol = self.TOL if options.tol is None else options.tol
        max_iter = self.MAX_ITER if options.max_iter is None else options.max_iter
        return least_squares(
            self.residuals, x0,
            jac=self.jacobian,
            method='lm',
            ftol=tol, xtol=tol, gtol=tol,
            max_nfev=max_iter,
            args=(problem, options, fixed),
        )

    def fit(self, dataset: ResonanceDataset, init: Optional[HyperfineTensor] = None,
            options: Optional[FitOptions] = None) -> FitResult:
        """
        Fit the hyperfine tensor

        Args:
            dataset: resonance records
            init: starting tensor (zero-field lines seed the principal values when present)
            options: FitOptions

        Returns:
            FitResult in the canonical gauge with the mirror solution listed

        Raises:
            DatasetValidationError: dataset cannot support the fit
            UnderdeterminedFitError: rank-deficient Jacobian at the optimum
            FitConvergenceError: no start converged within max_iter evaluations
        """
        options = FitOptions() if options is None else options
        self._validate(dataset, options)
        if options.mode == 'full':
            logger.warning("⚠️ Fitting α and β as well: the cubic orbit makes the frame non-unique")

        problem = self._prepare(dataset)
        fixed = self._fixed_angles(options, init)
        names = self._parameter_names(options)

        # Rank the starting points by χ²
        starts = []
        for guess in initial_guesses(dataset, init):
            if options.mode == 'gamma':
                guess = HyperfineTensor(guess.principal, (fixed[0], fixed[1], guess.euler[2]))
            x0 = self._pack(guess, options)
            r = self.residuals(x0, problem, options, fixed)
            starts.append((float(r @ r), x0))
        starts.sort(key=lambda s: s[0])
        logger.debug(f"🔧 {len(starts)} starting points, best χ² {starts[0][0]:.6g}")

        best, best_cost, converged_any, last_message = None, np.inf, False, ""
        for _, x0 in starts[:max(1, options.n_starts)]:
            run = self._run(x0, problem, options, fixed)
            cost = float(run.fun @ run.fun)
            last_message = run.message
            if run.status > 0 or cost <= TINY_CHI2 * len(problem.freqs):
                converged_any = True
            if best is None or cost < best_cost * (1.0 - IMPROVEMENT_RTOL) - 1e-20:
                best, best_cost = run, cost

        if not converged_any:
            raise FitConvergenceError(
                f"least squares did not converge: {last_message}",
                best=self._unpack(best.x, options, fixed),
            )

        params = np.array(best.x, dtype=float)
        if options.mode == 'gamma':
            params[3] = canonical_gamma(params[3])
        tensor = self._unpack(params, options, fixed)

        evaluation = self._evaluate(tensor, problem)
        jac = self.jacobian(params, problem, options, fixed)
        chi2 = float(evaluation.residuals @ evaluation.residuals)
        dof = len(problem.freqs) - len(params)

        result = FitResult(
            principal=tensor.principal,
            principal_err=(0.0, 0.0, 0.0),
            euler=tensor.euler,
            euler_err=(0.0, 0.0, 0.0),
            parameter_names=list(names),
            covariance=np.zeros((len(params), len(params))),
            jacobian=jac,
            chi2=chi2,
            dof=dof,
            rms_mhz=float(np.sqrt(np.mean((problem.freqs - evaluation.predicted) ** 2))),
            residuals_mhz=problem.freqs - evaluation.predicted,
            absolute_sigma=options.absolute_sigma,
            mode=options.mode,
            nfev=int(best.nfev),
            message=str(best.message),
        )

        result.covariance = self.fit_uncertainties(result)
        errs = np.sqrt(np.clip(np.diag(result.covariance), 0.0, None))
        result.principal_err = tuple(float(e) for e in errs[:3])
        if options.mode == 'full':
            result.euler_err = tuple(float(e) for e in errs[3:6])
        else:
            result.euler_err = (0.0, 0.0, float(errs[3]))

        result.assignments = self._assignments(dataset, evaluation)
        result.subset_rms = self._subset_rms(dataset, result.residuals_mhz)
        result.degenerate_solutions = self._degenerate_solutions(tensor, problem, chi2)

        logger.info(
            f"✅ Fit converged: A = {np.round(result.principal, 6).tolist()} MHz, "
            f"γ = {result.gamma_deg:.4f}°, rms = {result.rms_mhz * 1e3:.3f} kHz"
        )
        return result

    # ==================== REPORTING ====================

    def _assignments(self, dataset: ResonanceDataset, evaluation: _Evaluation) -> List[Dict[str, Any]]:
        subsets = dataset.subsets
        out = []
        for i in range(len(dataset)):
            out.append({
                'record': i,
                'freq_MHz': float(dataset.frequencies[i]),
                'predicted_MHz': float(evaluation.predicted[i]),
                'orientation': evaluation.orientation[i],
                'lower': int(evaluation.lower[i]),
                'upper': int(evaluation.upper[i]),
                'subset': subsets[i],
                'matched': bool(evaluation.matched[i]),
            })
        return out

    def _subset_rms(self, dataset: ResonanceDataset, residuals_mhz: np.ndarray) -> Dict[str, float]:
        if not dataset.has_subsets:
            return {}
        labels = np.array(dataset.subsets)
        return {
            str(label): float(np.sqrt(np.mean(residuals_mhz[labels == label] ** 2)))
            for label in sorted(set(labels)) if label
        }

    def _degenerate_solutions(self, tensor: HyperfineTensor, problem: _Problem, chi2: float) -> List[Dict[str, Any]]:
        mirror = tensor.with_gamma(mirror_gamma(tensor.euler[2]))
        r = self._evaluate(mirror, problem).residuals
        mirror_chi2 = float(r @ r)
        return [{
            'principal_mhz': [float(v) for v in mirror.principal],
            'euler_deg': [float(v) for v in mirror.euler],
            'gamma_deg': float(mirror.euler[2]),
            'chi2': mirror_chi2,
            'delta_chi2': mirror_chi2 - chi2,
        }]


# ==================== MODULE-LEVEL API ====================

def fit_tensor(dataset: ResonanceDataset, init: Optional[HyperfineTensor] = None,
               options: Optional[FitOptions] = None, constants: PhysicalConstants = None) -> FitResult:
    """Fit with a fresh service (see TensorFitService.fit)"""
    return TensorFitService(constants=constants).fit(dataset, init, options)


def fit_uncertainties(result: FitResult) -> np.ndarray:
    """Covariance of a fit result (see TensorFitService.fit_uncertainties)"""
    return TensorFitService().fit_uncertainties(result)
