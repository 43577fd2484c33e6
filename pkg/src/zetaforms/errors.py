"""Exception types shared across the package.

The CLI maps these onto its exit-code contract: parameter errors exit 1,
mathematical-consistency failures exit 2, resource caps exit 3.
"""

__all__ = [
    "ParameterError",
    "InconsistencyError",
    "PrecisionUnreachableError",
    "CriterionInapplicableError",
    "ScanCapError",
]


class ParameterError(ValueError):
    """Arguments violate a documented precondition (user error)."""


class InconsistencyError(RuntimeError):
    """An exact identity or a certified residual check failed.

    This never indicates bad user input: it signals a bug somewhere in
    the exact tables, the series evaluation, or the zeta constants.
    """


class PrecisionUnreachableError(RuntimeError):
    """A certified tail bound could not be pushed below the requested
    precision within the iteration cap."""


class CriterionInapplicableError(ValueError):
    """The linear-independence criterion requires 0 < alpha < 1 < beta;
    raised when the supplied logs violate that."""


class ScanCapError(RuntimeError):
    """An exhaustive parameter scan hit its cap without finding a hit."""
