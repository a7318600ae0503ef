"""
Tensor Fit Exceptions
=====================
"""
from typing import Any, List, Optional


class TensorFitError(Exception):
    """Base exception for tensor fitting errors"""
    pass


class DatasetParseError(TensorFitError):
    """Raised when a resonance dataset cannot be read"""
    pass


class DatasetValidationError(TensorFitError):
    """Raised when a dataset parses but cannot support a well-posed fit"""

    def __init__(self, errors: List[str]):
        self.errors = list(errors)
        super().__init__("; ".join(self.errors))


class UnderdeterminedFitError(TensorFitError):
    """Raised when the Jacobian is rank deficient; lists the unconstrained parameters"""

    def __init__(self, parameters: List[str], message: Optional[str] = None):
        self.parameters = list(parameters)
        super().__init__(message or f"fit is underdetermined in: {', '.join(self.parameters)}")


class FitConvergenceError(TensorFitError):
    """Raised when the optimizer stops without converging; carries the best point found"""

    def __init__(self, message: str, best: Any = None):
        self.best = best
        super().__init__(message)
