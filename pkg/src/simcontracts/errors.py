"""Exception hierarchy shared by every module of the package."""

from __future__ import annotations


class ContractError(Exception):
    """Base class. Carries an optional 1-based source position."""

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(str(self))

    def __str__(self) -> str:
        if self.line is not None:
            return f"line {self.line}, column {self.column}: {self.message}"
        return self.message


# assertion core
class UnknownVariable(ContractError):
    pass


class MissingVariable(ContractError):
    pass


class DomainViolation(ContractError):
    pass


class AlphabetMismatch(ContractError):
    pass


class NotASuperAlphabet(ContractError):
    pass


class VariableDeclConflict(ContractError):
    pass


# architecture
class StructuralError(ContractError):
    pass


# assertion language and project files
class DslSyntaxError(ContractError):
    def __init__(self, message: str, *, line: int, column: int, expected: frozenset[str] = frozenset()):
        self.expected = frozenset(expected)
        if self.expected:
            message = f"{message} (expected one of: {', '.join(sorted(self.expected))})"
        super().__init__(message, line=line, column=column)


class TypeMismatch(ContractError):
    pass


class OutOfDomainLiteral(ContractError):
    pass


class SchemaError(ContractError):
    pass


class DanglingReference(ContractError):
    pass


class DuplicateId(ContractError):
    pass


# configurator
class EvaluationVariableUncontrolled(ContractError):
    pass


class NoModelsForComponent(ContractError):
    pass


class TargetComponentAssigned(ContractError):
    pass


class CandidateLimitExceeded(ContractError):
    pass


# monitor
class TraceFormatError(ContractError):
    def __init__(self, message: str, *, row: int | None = None, **kw):
        self.row = row
        if row is not None:
            message = f"row {row}: {message}"
        super().__init__(message, **kw)
