"""Exception hierarchy shared by every part of the checker."""

from __future__ import annotations


class CoverError(Exception):
    """Base class for all checker errors."""


class ModeError(CoverError):
    """A construct is not legal under the active language mode."""


class ContractSyntaxError(CoverError):
    """Malformed contract text.

    ``position`` is the 0-based character offset into the text handed to the
    parser; ``expected`` names the token the grammar wanted there.
    """

    def __init__(self, message: str, position: int = 0, expected: str | None = None, text: str = ""):
        self.position = position
        self.expected = expected
        self.text = text
        detail = f"{message} at offset {position}"
        if expected:
            detail += f" (expected {expected})"
        super().__init__(detail)


class PackError(CoverError):
    """Malformed contract-pack file."""


class DuplicateContract(CoverError):
    """Two attachments target the same function."""


class ContractValidationError(CoverError):
    """Raised when validation produced error-level issues."""

    def __init__(self, issues):
        self.issues = list(issues)
        super().__init__("; ".join(str(i) for i in self.issues))


class IRError(CoverError):
    """Base for mini-IR parse and structure errors; carries a source location."""

    def __init__(self, message: str, line: int = 0, col: int = 0):
        self.line = line
        self.col = col
        where = f"{line}:{col}: " if line else ""
        super().__init__(where + message)


class IRSyntaxError(IRError):
    pass


class UndefinedValue(IRError):
    pass


class DuplicateFunction(IRError):
    pass


class DuplicateDefinition(IRError):
    pass


class NoEntry(IRError):
    pass


class MissingTerminator(IRError):
    pass


class ArityMismatch(CoverError):
    pass


class Trap(CoverError):
    """Runtime fault inside the interpreter (bad address, step limit)."""


class AnalysisTimeout(CoverError):
    pass


class MalformedTrace(CoverError):
    pass


class SchemaError(MalformedTrace):
    """Trace file does not follow the JSON Lines event schema."""


class CorpusError(CoverError):
    pass
