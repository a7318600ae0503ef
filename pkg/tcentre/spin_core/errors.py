"""
Spin Core Exceptions
====================
"""


class SpinCoreError(Exception):
    """Base exception for spin_core errors"""
    pass


class InvalidTensorError(SpinCoreError):
    """Raised when a hyperfine tensor is malformed or not symmetric"""
    pass


class NonHermitianError(SpinCoreError):
    """Raised when an operator expected to be Hermitian is not"""
    pass


class InvalidFieldError(SpinCoreError):
    """Raised when a magnetic field specification is malformed"""
    pass
