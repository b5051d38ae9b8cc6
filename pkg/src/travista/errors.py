"""Exception hierarchy with stable machine-readable codes."""

from __future__ import annotations


class TravistaError(Exception):
    """Base error; ``code`` is the wire-stable identifier."""

    code = "ERROR"

    def __init__(self, message: str = ""):
        super().__init__(message or self.code)
        self.message = message or self.code


class NoSamples(TravistaError):
    code = "NO_SAMPLES"


class UnknownType(TravistaError):
    code = "UNKNOWN_TYPE"


class UnknownLabel(TravistaError):
    code = "UNKNOWN_LABEL"


class UnknownEdge(TravistaError):
    code = "UNKNOWN_EDGE"


class UnknownProcess(TravistaError):
    code = "UNKNOWN_PROCESS"


class DuplicateTrace(TravistaError):
    code = "DUPLICATE_TRACE"


class TraceNotFound(TravistaError):
    code = "NOT_FOUND"


class StorageError(TravistaError):
    code = "STORAGE"
