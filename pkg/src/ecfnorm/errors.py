"""Exception types raised by the normality tests and the simulation harness."""


class NormalityError(ValueError):
    """Base class for every error raised by ecfnorm."""


class EmptyInput(NormalityError):
    pass


class DegenerateSample(NormalityError):
    """Sample too short or with zero spread; the studentized statistics are undefined."""


class ZeroModulus(NormalityError):
    pass


class InvalidPoint(NormalityError):
    pass


class TooSmall(NormalityError):
    pass


class TooLarge(NormalityError):
    pass


class UnsupportedAlpha(NormalityError):
    pass


class InvalidParameters(NormalityError):
    pass


class ParseError(NormalityError):
    """Malformed distribution spec or input file.

    ``position`` is a character offset into a spec string; ``line`` is a
    1-based line number in a data file.
    """

    def __init__(self, message, position=None, expected=None, line=None):
        self.position = position
        self.line = line
        self.expected = tuple(expected or ())
        details = []
        if line is not None:
            details.append(f"line {line}")
        if position is not None:
            details.append(f"at {position}")
        if self.expected:
            details.append("expected " + " | ".join(self.expected))
        if details:
            message = f"{message} ({', '.join(details)})"
        super().__init__(message)


class SimulationError(NormalityError):
    """A Monte Carlo cell aborted because one of its replications failed."""
