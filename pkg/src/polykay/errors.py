"""Error types shared across the package.

Each error carries the process exit code the CLI maps it to and a short
machine-readable code used by the HTTP service.
"""


class PolykayError(Exception):
    """Base class for all errors raised by this package."""

    exit_code = 1
    code = "error"


class UsageError(PolykayError):
    """Malformed request: bad spec syntax, bad flags, unparseable input."""

    exit_code = 2
    code = "usage"


class DataParseError(UsageError):
    """Input data could not be parsed (ragged rows, non-numeric cells, ...)."""

    code = "parse"


class CapacityError(PolykayError):
    """Requested order exceeds the configured generation limit."""

    exit_code = 3
    code = "capacity"


class DimensionError(PolykayError):
    """Variable dimension of the request does not match the data."""

    exit_code = 4
    code = "dimension"


class SampleSizeError(PolykayError):
    """Sample too small: a falling-factorial denominator vanishes."""

    exit_code = 5
    code = "sample_size"
