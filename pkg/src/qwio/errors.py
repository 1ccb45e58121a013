"""Exception types shared across the package.

The CLI maps these onto exit codes: decode problems behave like I/O
failures (exit 1), while schema, range, and configuration problems are
usage errors (exit 2).
"""


class QwioError(Exception):
    """Base class for errors raised by this package."""


class UnsupportedFormatError(QwioError):
    """The file is not a raster format this package can read."""


class CorruptImageError(QwioError):
    """The file looks like a supported format but cannot be decoded."""


class SchemaError(QwioError):
    """A table file is missing required fields or has the wrong shape."""


class EntryRangeError(QwioError):
    """A quantization table entry lies outside [1, 255]."""


class ConfigError(QwioError):
    """An optimizer or CLI configuration value is invalid."""
