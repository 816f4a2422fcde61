"""Exception hierarchy shared across the package."""


class RolenetError(Exception):
    """Base class for all package-specific errors."""


class EdgeListParseError(RolenetError):
    """A malformed line was encountered while reading an edge list."""

    def __init__(self, message, line_number=None):
        if line_number is not None:
            message = f"line {line_number}: {message}"
        super().__init__(message)
        self.line_number = line_number


class DegenerateClusteringError(RolenetError):
    """A clustering cannot be scored (e.g. coincident centroids)."""


class MissingArtifactError(RolenetError):
    """A pipeline stage was run before its prerequisite stage."""
