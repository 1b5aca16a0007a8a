"""Exception types raised by tarpbench."""


class TarpBenchError(Exception):
    pass


class ParseError(TarpBenchError, ValueError):
    """Malformed input file. ``row`` is 1-based and counts the header line."""

    def __init__(self, message, row=None):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message)


class SchemaError(TarpBenchError, ValueError):
    pass


class PartitionError(TarpBenchError, ValueError):
    pass


class SpecError(TarpBenchError, ValueError):
    pass


class DimensionError(TarpBenchError, ValueError):
    pass


class FitError(TarpBenchError, ValueError):
    pass


class DataError(TarpBenchError, ValueError):
    pass
