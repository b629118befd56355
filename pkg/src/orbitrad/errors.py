"""Exception types raised by orbitrad operations."""


class OrbitradError(Exception):
    """Base class for all orbitrad domain errors."""


class DimensionMismatch(OrbitradError):
    """Operands have incompatible or unsupported dimensions."""


class WrongDimension(OrbitradError):
    """An operation restricted to a fixed dimension received another one."""


class NotHermitian(OrbitradError):
    """A Hermitian input was required but the deviation exceeds tolerance."""


class NotSkew(OrbitradError):
    """A skew-Hermitian direction was required."""


class NoConvergence(OrbitradError):
    """An iterative eigenvalue computation failed to converge."""


class Singular(OrbitradError):
    """An invertible operator was required (relative smallest singular
    value below 1e-10)."""

    def __init__(self, msg, truncated_at=None):
        super().__init__(msg)
        self.truncated_at = truncated_at


class ZeroPowerOfSingular(OrbitradError):
    """The zeroth power of a singular positive matrix is undefined."""


class DegenerateNorm(OrbitradError):
    """A norm evaluator returned zero on a nonzero matrix."""


class SizeMismatch(OrbitradError):
    """Two multisets of different cardinality cannot be matched."""
