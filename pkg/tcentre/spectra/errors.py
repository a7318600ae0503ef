"""
Spectra Exceptions
==================
"""


class SpectraError(Exception):
    """Base exception for spectral computations"""
    pass


class SecularRegimeError(SpectraError):
    """Electron branches cannot be separated at this field"""
    pass
