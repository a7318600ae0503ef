"""
Orientation Exceptions
======================
"""


class OrientationError(Exception):
    """Raised for malformed orientation inputs"""
    pass
