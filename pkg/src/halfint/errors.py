"""Exception hierarchy shared by all modules."""


class HalfIntError(Exception):
    """Base class for every error raised by halfint."""


# algebra
class NotMonic(HalfIntError, ValueError):
    pass


class NotSquarefree(HalfIntError, ValueError):
    pass


class FieldMismatch(HalfIntError, TypeError):
    pass


class DivisionByZero(HalfIntError, ZeroDivisionError):
    pass


class Singular(HalfIntError, ValueError):
    pass


# characters
class CharacterSpecError(HalfIntError, ValueError):
    pass


# qseries / bounds
class PrecisionError(HalfIntError, IndexError):
    """A coefficient was requested at or beyond the known precision."""


class MetaError(HalfIntError, ValueError):
    pass


class BadLevel(HalfIntError, ValueError):
    pass


class BadWeight(HalfIntError, ValueError):
    pass


# certify
class ZeroLeadingCoefficient(HalfIntError, ValueError):
    pass


class PrecisionTooSmall(HalfIntError, ValueError):
    pass


class NotDivisible(HalfIntError, ValueError):
    pass


class RankDeficient(HalfIntError, ValueError):
    pass


class InsufficientRows(HalfIntError, ValueError):
    pass


class NoPivotInWindow(HalfIntError, ValueError):
    pass


class PivotViolation(HalfIntError, ValueError):
    pass


class ShapeMismatch(HalfIntError, ValueError):
    pass


class EmptyWindow(HalfIntError, ValueError):
    pass


class ConsistencyError(HalfIntError, AssertionError):
    """Two independent computations of the same quantity disagreed."""


# io
class FieldSpecError(HalfIntError, ValueError):
    pass


class ParseError(HalfIntError, ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        where = ""
        if line is not None:
            where = f"line {line}"
            if column is not None:
                where += f", column {column}"
            where += ": "
        super().__init__(where + message)
