"""Exception hierarchy.

The CLI maps the three families onto exit codes: configuration errors
exit with 2, physicality violations with 3, numerical failures with 4.
"""


class QcorrError(Exception):
    """Base class for all package errors."""


class ConfigError(QcorrError, ValueError):
    """Invalid user-supplied parameters."""


class UnknownPreset(ConfigError):
    pass


class DegenerateAnalyticForm(ConfigError):
    pass


class PhysicalityError(QcorrError, ValueError):
    """Input that does not describe a valid operator or state."""


class NonHermitianInput(PhysicalityError):
    pass


class NotPositiveSemidefinite(PhysicalityError):
    pass


class NotPhysical(PhysicalityError):
    pass


class NotXStructured(PhysicalityError):
    pass


class NumericalError(QcorrError, ArithmeticError):
    """A self-check or convergence test failed."""


class StepTooLarge(NumericalError):
    pass


class TruncationOverflow(NumericalError):
    pass


class ConvergenceError(NumericalError):
    pass
