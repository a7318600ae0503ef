"""
Decoherence Exceptions
======================
"""


class DecoherenceError(Exception):
    """Base exception for optical-cycle decoherence calculations"""
    pass


class ZeroProjectionError(DecoherenceError):
    """Initial state has no weight in the optically coupled electron branch"""
    pass


class RegimeError(DecoherenceError):
    """Evolution time too short for the emission-conditioned mixture"""
    pass


class SingularAverageError(DecoherenceError):
    """Average evolution is singular; the memory has fully dephased"""
    pass


class IntegratorError(DecoherenceError):
    """Master-equation integration failed"""
    pass
