"""Exception types shared across the package."""


class TsextError(Exception):
    """Base class for all errors raised by tsext."""


class InvalidParameterError(TsextError, ValueError):
    pass


class SizeGuardError(TsextError):
    """Raised when an input exceeds a configured desk-scale limit."""

    def __init__(self, what, size, limit):
        self.what = what
        self.size = size
        self.limit = limit
        super().__init__(f"{what} = {size} exceeds size guard {limit}")


class ValidationError(TsextError, ValueError):
    pass


class CocycleError(ValidationError):
    """A cochain failed the cocycle identity; `witness` is the offending triple."""

    def __init__(self, witness, message=None):
        self.witness = witness
        super().__init__(message or f"cocycle identity fails at triple {witness}")


class NotInvertibleError(TsextError):
    pass
