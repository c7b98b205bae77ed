class BVFError(Exception):
    """Base class for errors raised by bvf."""


class ValidationError(BVFError, ValueError):
    pass


class OverlapNotRepresentable(BVFError):
    """Two boundaries overlap in a way the exact facet arithmetic cannot express."""


class QuadratureError(BVFError):
    """A requested quadrature tolerance could not be reached."""


class NegativeTail(BVFError):
    pass


class InsufficientRange(BVFError):
    pass


class DegenerateDilation(BVFError, ValueError):
    pass


class WitnessNotFound(BVFError):
    pass


class TailNotControlled(UserWarning):
    """The spectral plateau used for the discrepancy tail bound has not settled."""
