"""Exception types shared across the library.

Every failure mode surfaces as one of these instead of a silent NaN. The CLI
maps each family onto its own exit status.
"""


class IrsFsoError(Exception):
    """Base class for all library errors."""


class ConfigurationError(IrsFsoError, ValueError):
    """Scenario or parameter values that violate a documented invariant."""


class RegimeError(IrsFsoError):
    """Geometry outside the regime in which a closed form is valid.

    Carries the offending :class:`~irsfso.analytic.ValidityReport` when one
    is available.
    """

    def __init__(self, message, report=None):
        super().__init__(message)
        self.report = report


class ConvergenceError(IrsFsoError, ArithmeticError):
    """A series, quadrature or iteration failed to reach its tolerance."""


class ResolutionError(ConvergenceError):
    """Quadrature grid too coarse for the integrand's phase variation."""


class PoleError(IrsFsoError, ArithmeticError):
    """Evaluation at a pole of the Gamma function or of a series coefficient."""


class ArgumentOverflowError(IrsFsoError, OverflowError):
    """Result not representable in double precision."""


class SchemaError(ConfigurationError):
    """Scenario document with unknown keys, wrong types or unparsable units."""
