"""Exception types shared across the package."""


class KyFanError(Exception):
    """Base class for every error raised by this package."""


class NonFinite(KyFanError):
    """A matrix contains NaN or infinite entries."""


class NoConvergence(KyFanError):
    """An iterative kernel failed to converge within its cap."""


class ShapeMismatch(KyFanError):
    """Operands have incompatible shapes."""


class KOutOfRange(KyFanError):
    """The norm index k is outside 1..n."""


class QOutOfRange(KyFanError):
    """A partial-sum count q is outside the admissible range."""


class NotOrthogonal(KyFanError):
    """A witness was requested for a pair that is not orthogonal."""


class DegenerateRank(KyFanError):
    """s_k(A) is numerically zero and the requested criterion needs s_k > 0."""


class WitnessSearchFailed(KyFanError):
    """The witness search did not reach the requested residual."""

    def __init__(self, message, residual=None):
        super().__init__(message)
        self.residual = residual


class BadBlockStructure(KyFanError):
    """A certificate matrix violates the required eigenblock structure."""


class ParseError(KyFanError):
    """A problem or report file is malformed."""
