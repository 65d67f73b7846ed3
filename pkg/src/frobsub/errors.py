"""Exception hierarchy.

Mathematical checks that *fail* return a verdict; these exceptions are for
malformed input and for preconditions that cannot be met.
"""


class FrobsubError(Exception):
    """Base class for all library errors."""


class InputError(FrobsubError, ValueError):
    """Malformed or inconsistent input."""


class NonPuiseuxCompositionError(InputError):
    """A substitution would produce a non-Puiseux (e.g. irrational) expression."""


class LogarithmicCaseError(InputError):
    """An antiderivative would require a logarithm."""


class NormalizationError(FrobsubError):
    """``c_1ij`` is not a constant matrix."""


class DegenerateMetricError(FrobsubError):
    """A metric that must be invertible is singular."""


class NotQuasihomogeneousError(FrobsubError):
    """Weighted degrees of the prepotential's terms disagree."""

    def __init__(self, message, offending=()):
        super().__init__(message)
        self.offending = list(offending)


class NotFlatCoordinatesError(InputError):
    """The induced metric is not constant in the submanifold coordinates."""


class UnsupportedCodimensionError(InputError):
    pass


class ConsistencyError(FrobsubError):
    """An identity that holds by construction failed; signals a bug or bad catalog data."""
