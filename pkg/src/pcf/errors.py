"""Exception hierarchy.

``Undecided`` subclasses mark outcomes where the mathematics is fine but the
available data (precision, term budget) cannot settle the question; the CLI
maps them to exit status 2.
"""


class PcfError(Exception):
    pass


class Undecided(PcfError):
    pass


class PrecisionExhausted(Undecided):
    pass


class BudgetExhausted(Undecided):
    pass


class StreamOrderError(PcfError):
    """A stream produced a non-decreasing exponent."""


class NoSquareRoot(PcfError):
    pass


class BadCertificate(PcfError):
    pass


class NestingViolation(PcfError):
    pass


class InvalidElement(PcfError):
    pass


class IdentityCheckFailed(AssertionError):
    """Two routes that must agree did not; always a bug, never a data issue."""


class ParseError(PcfError):
    def __init__(self, message: str, text: str = "", pos: int | None = None):
        self.text = text
        self.pos = pos
        if pos is not None and text:
            message = f"{message} at position {pos}\n  {text}\n  {' ' * pos}^"
        super().__init__(message)
