class ShapdbError(Exception):
    """Base class for all errors raised by shapdb."""


class InputError(ShapdbError):
    """Malformed or inconsistent user input."""


class ParseError(InputError):
    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class PreconditionError(ShapdbError):
    """An engine was called on an instance outside its domain."""


class CapExceeded(PreconditionError):
    """Too many players for an exhaustive engine."""


class BudgetExceeded(ShapdbError):
    """An exact combinatorial search ran past its work budget."""
