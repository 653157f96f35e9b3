"""Exception taxonomy shared across the package.

Everything raised on purpose derives from SemirecError so callers (and the
CLI exit-code mapping) can tell deliberate failures from bugs.
"""


class SemirecError(Exception):
    """Base class for all deliberate failures."""


class BitCapError(SemirecError):
    """A rational exceeded the configured bit-size cap."""


class NonAffineError(SemirecError):
    """An exact operation was requested on a piece it cannot support."""


class BudgetError(SemirecError):
    """An atom / piece / iteration budget was exhausted."""


class CoverageError(SemirecError):
    """A piecewise map does not define a total function on [0, 1]."""


class DegenerateProbabilityError(SemirecError):
    """An operation requiring strictly positive probabilities got a zero."""
