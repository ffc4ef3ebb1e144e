"""Exception hierarchy.

Every error raised on purpose by the package derives from ``LksError`` so the
command line can map it to an exit code: parse problems exit with 2, every
other domain or validation failure with 1.
"""


class LksError(Exception):
    """Base class for domain and validation failures."""


class ExprSyntaxError(LksError):
    """Malformed expression text; ``offset`` is the byte offset of the fault."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class UnknownIdentifier(ExprSyntaxError):
    pass


class ConfigError(LksError):
    """Malformed key/value configuration file."""


class EvaluationError(LksError):
    """The expression is singular (or not finite) at the requested point."""


class ProfileError(LksError):
    """The profile violates a structural requirement (period, constancy...)."""


class ZeroPlateau(LksError):
    """f vanishes on a whole subinterval, so its zeros are not isolated."""


class DegenerateZero(LksError):
    """An operation needing f'(x0) != 0 got a degenerate zero."""


class InvalidRow(LksError):
    """(case, k, l, j) does not describe a valid quotient row."""


class InvariantError(LksError):
    """A classification invariant failed validation."""


class IntegrationEscaped(LksError):
    pass
