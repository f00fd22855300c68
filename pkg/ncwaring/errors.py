from typing import Any, Optional


class NcwError(ValueError):
    pass


class FieldMismatchError(NcwError):
    pass


class PolySyntaxError(NcwError):
    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} at offset {offset}")
        self.offset = offset


class PreconditionError(NcwError):
    pass


class FieldTooSmallError(PreconditionError):
    pass


class SingularMatrixError(PreconditionError):
    pass


class IdentityPolynomialError(PreconditionError):
    pass


class SearchFailure(NcwError):
    """
    A seeded search used up its budget. This is not a proof that no witness
    exists; `best` holds the most promising candidate seen, if any.
    """
    def __init__(self, message: str, best: Optional[Any] = None):
        super().__init__(message)
        self.best = best


class EnumerationCapError(NcwError):
    pass


class MalformedCertificateError(PreconditionError):
    """Certificate file passed schema validation but its contents do not fit together."""
