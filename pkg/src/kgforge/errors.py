"""Exception hierarchy shared across the package.

The command line maps these onto exit codes: ConfigurationError exits 1,
DataError exits 2.
"""

from __future__ import annotations


class KgforgeError(Exception):
    """Base class for all errors raised by this package."""


class ConfigurationError(KgforgeError):
    """A manifest, map, catalog, or option is invalid or inconsistent."""


class DataError(KgforgeError):
    """An input data file is missing, unreadable, or malformed."""


class NTriplesParseError(DataError):
    """A statement could not be parsed.

    Attributes:
        line_number: 1-based line number of the offending statement.
        text: The offending line, without its trailing newline.
    """

    def __init__(self, message: str, line_number: int, text: str) -> None:
        super().__init__(f"line {line_number}: {message}: {text!r}")
        self.line_number = line_number
        self.text = text


class UnknownPrefixError(ConfigurationError):
    """A CURIE used a prefix that is not registered."""

    def __init__(self, prefix: str) -> None:
        super().__init__(f"unknown namespace prefix {prefix!r}")
        self.prefix = prefix


class AlignmentError(ConfigurationError):
    """The identifier alignment map contains chains or cycles."""


class BuildError(ConfigurationError):
    """The anchor map or relation catalog cannot support a requested edge."""
