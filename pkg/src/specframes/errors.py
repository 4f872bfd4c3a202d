"""Exception hierarchy shared by all modules."""


class SpecframesError(Exception):
    """Base class for every error raised by the package."""


class ParameterError(SpecframesError, ValueError):
    """An argument violates a documented constraint."""


class DataError(SpecframesError, ValueError):
    """Input data (a file, knot list, ...) is malformed."""


class ConstructionError(SpecframesError, RuntimeError):
    """A randomized or iterative construction could not be completed."""


class NumericalError(SpecframesError, ArithmeticError):
    """A numerical routine failed to converge or produced an invalid result."""
