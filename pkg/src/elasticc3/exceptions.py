"""Exception hierarchy shared by every module of the package."""


class ElasticC3Error(Exception):
    """Base class for all package errors."""


class DataError(ElasticC3Error):
    """Raised for invalid input data (mapped to exit status 2 by the CLI)."""


class AllZeroMatrix(DataError):
    pass


class LengthMismatch(DataError, ValueError):
    pass


class OutOfRangeAssignment(DataError, ValueError):
    pass


class EmptyRow(DataError, ValueError):
    pass


class InvalidClusterCount(DataError, ValueError):
    pass


class DimensionMismatch(DataError, ValueError):
    pass


class InvalidParams(DataError, ValueError):
    pass


class MissingLabels(DataError, ValueError):
    pass


class CountTooLarge(DataError, ValueError):
    pass


class ParseError(DataError):
    """Malformed matrix or label file; ``line`` is 1-based when known."""

    def __init__(self, message, path=None, line=None):
        self.path = path
        self.line = line
        where = ""
        if path is not None:
            where = f"{path}"
            if line is not None:
                where += f":{line}"
            where += ": "
        elif line is not None:
            where = f"line {line}: "
        super().__init__(where + message)


class DimensionHeaderMismatch(ParseError):
    pass
