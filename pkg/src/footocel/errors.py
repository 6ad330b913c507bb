"""Error taxonomy shared across the pipeline.

Three failure families map onto the CLI exit codes: malformed input files
(ParseError, exit 1), queries that reference things the data does not contain
(QueryError, exit 1), and violated cross-file or internal invariants
(ConsistencyError, exit 2).
"""

from __future__ import annotations


class ParseError(ValueError):
    """A file is syntactically or structurally malformed.

    Carries enough context (source name, line number or JSON path) in the
    message to point at the offending location.
    """

    def __init__(self, message: str, *, source: str | None = None, line: int | None = None):
        loc = ""
        if source is not None:
            loc += source
        if line is not None:
            loc += f":{line}" if loc else f"line {line}"
        super().__init__(f"{loc}: {message}" if loc else message)
        self.source = source
        self.line = line


class ConsistencyError(ValueError):
    """Individually well-formed data that contradicts itself or an invariant."""


class QueryError(ValueError):
    """A filter or lookup references an id/attribute absent from the data."""
