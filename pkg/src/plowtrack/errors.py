"""Shared exception types."""

from __future__ import annotations


class PlowtrackError(Exception):
    """Base class for errors raised by this package."""


class RouteParseError(PlowtrackError):
    """A route reference string could not be parsed."""


class FormatError(PlowtrackError):
    """An input file violates its documented schema."""

    def __init__(self, message: str, *, file: str | None = None, line: int | None = None):
        self.file = file
        self.line = line
        where = ""
        if file is not None:
            where = f" [{file}" + (f":{line}" if line is not None else "") + "]"
        super().__init__(message + where)


class BuildError(PlowtrackError):
    """The spatial index could not be built from the given inventory."""
