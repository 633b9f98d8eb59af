"""Exception hierarchy shared by the core modules and the CLI."""


class TvwbError(ValueError):
    """Base class for semantic rejections (CLI exit code 1)."""


class InvalidProbVectorError(TvwbError):
    pass


class InvalidNodeError(TvwbError):
    pass


class TooLargeError(TvwbError):
    """A configured work cap would be exceeded."""

    def __init__(self, what: str, count: int, cap: int):
        self.what = what
        self.count = count
        self.cap = cap
        super().__init__(f"{what}: {count} exceeds the configured cap of {cap}")


class HeightMismatchError(TvwbError):
    pass


class MetricMismatchError(TvwbError):
    pass


class ReducibleMatrixError(TvwbError):
    pass


class InvalidMatrixError(TvwbError):
    """Entries that do not form a stochastic matrix."""


class EndPError(TvwbError):
    pass


class DecompositionError(TvwbError):
    pass


class MissingCouplingError(TvwbError):
    pass


class DescriptorError(TvwbError):
    pass


class PrecisionError(TvwbError):
    """A numerical result misses its tolerance."""


class InputFormatError(Exception):
    """Malformed input document (CLI exit code 2)."""
