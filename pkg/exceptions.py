"""Error types raised across the pipeline"""
from typing import Optional


class PidsError(Exception):
    """Base class for every error the pipeline raises on purpose"""


class InvalidArgumentError(PidsError, ValueError):
    """A caller-supplied argument violates a documented precondition"""


class ShapeError(PidsError, ValueError):
    """Array dimensions do not line up"""


class ValidationError(PidsError, ValueError):
    """A genotype, token id or configuration failed validation"""


class UnsupportedOperationError(PidsError):
    """The operation is not defined for this kind of input"""


class WriteError(PidsError, OSError):
    """Persisting an artifact failed"""


class ParseError(PidsError, ValueError):
    """An input file could not be parsed"""

    def __init__(
        self,
        message: str,
        path: Optional[str] = None,
        line: Optional[int] = None,
        offset: Optional[int] = None
    ):
        self.path = path
        self.line = line
        self.offset = offset

        location = []
        if path:
            location.append(str(path))
        if line is not None:
            location.append(f"line {line}")
        if offset is not None:
            location.append(f"offset {offset}")

        if location:
            message = f"{message} ({', '.join(location)})"
        super().__init__(message)
