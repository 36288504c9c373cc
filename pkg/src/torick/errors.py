"""Exception hierarchy.

Errors split into three families that the CLI maps onto exit statuses:
mathematical rejections (the input is well formed but outside the
hypotheses of a computation), resource limits, and input errors.
"""


class TorickError(Exception):
    """Base class for all package errors."""


class MathematicalRejection(TorickError):
    """Well-formed input that a computation refuses on mathematical grounds."""


class InvalidFan(MathematicalRejection):
    """The cones do not form a fan (see the validation report)."""


class NotFiniteIndex(MathematicalRejection):
    pass


class NotSmooth(MathematicalRejection):
    pass


class NotComplete(MathematicalRejection):
    pass


class NotCompleteOrSmooth(MathematicalRejection):
    pass


class NoOrderFound(MathematicalRejection):
    pass


class BasisCheckFailed(MathematicalRejection):
    pass


class NotSupported(MathematicalRejection):
    pass


class UnitArityMismatch(MathematicalRejection):
    pass


class MalformedRelation(MathematicalRejection):
    pass


class UnsupportedModule(MathematicalRejection):
    pass


class ResourceLimit(TorickError):
    """A step budget ran out or the computation was cancelled."""


class InputError(TorickError):
    pass


class ParseError(InputError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = f" (line {line}, column {column})" if line is not None else ""
        super().__init__(f"{message}{where}")


class SchemaError(InputError):
    def __init__(self, field, message):
        self.field = field
        super().__init__(f"{field}: {message}")
