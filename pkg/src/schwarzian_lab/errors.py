"""Exception hierarchy. The CLI maps input errors to exit code 2 and
numerical failures to exit code 3."""


class LabError(Exception):
    pass


class InputError(LabError, ValueError):
    pass


class DegenerateInputError(InputError):
    pass


class SeriesDivisionError(LabError, ZeroDivisionError):
    pass


class StructureError(InputError):
    """Raised when a series is not in the image of an orbifold pushdown."""

    def __init__(self, message, exponent=None):
        super().__init__(message)
        self.exponent = exponent


class InconsistentJumpError(InputError):
    pass


class NumericalFailure(LabError, ArithmeticError):
    def __init__(self, message, location=None):
        if location is not None:
            message = f"{message} (at z={complex(location):.6g})"
        super().__init__(message)
        self.location = location


class AmbiguousClassification(NumericalFailure):
    pass
