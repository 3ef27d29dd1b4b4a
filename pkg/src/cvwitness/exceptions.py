class CVWitnessError(Exception):
    """Base class for all errors raised by cvwitness."""


class InputError(CVWitnessError, ValueError):
    """Malformed, out-of-range or inconsistent input."""


class InapplicableError(InputError):
    """The criterion is not defined for this state or partition."""


class NumericError(CVWitnessError, ArithmeticError):
    """A numerical routine failed to converge or produced garbage."""
