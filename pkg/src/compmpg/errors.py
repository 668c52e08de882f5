"""Exception hierarchy.

Every error carries a stable ``code`` used in the CLI's JSON error output.
Errors that originate in diagram source text also carry ``line``/``column``.
"""

from __future__ import annotations


class CompMPGError(Exception):
    code = "Error"

    def __init__(self, message: str, *, line: int | None = None, column: int | None = None):
        super().__init__(message)
        self.message = message
        self.line = line
        self.column = column

    def located(self, line: int, column: int) -> "CompMPGError":
        if self.line is None:
            self.line, self.column = line, column
        return self

    def to_json(self) -> dict:
        out = {"error": self.code, "message": self.message}
        if self.line is not None:
            out["line"] = self.line
            out["column"] = self.column
        return out

    def __str__(self) -> str:
        if self.line is None:
            return self.message
        return f"{self.line}:{self.column}: {self.message}"


class GameValidationError(CompMPGError):
    code = "InvalidGame"


class EntranceWithoutSuccessor(GameValidationError):
    code = "EntranceWithoutSuccessor"


class EntranceWithMultipleSuccessors(GameValidationError):
    code = "EntranceWithMultipleSuccessors"


class ExitWithMultiplePredecessors(GameValidationError):
    code = "ExitWithMultiplePredecessors"


class DanglingEdgeEndpoint(GameValidationError):
    code = "DanglingEdgeEndpoint"


class MissingRoleOrWeight(GameValidationError):
    code = "MissingRoleOrWeight"


class StrategyGameMismatch(CompMPGError):
    code = "StrategyGameMismatch"


class ArityMismatch(CompMPGError):
    code = "ArityMismatch"

    def __init__(self, expected, found, message: str | None = None, **kw):
        self.expected = expected
        self.found = found
        super().__init__(message or f"arity mismatch: expected {expected}, found {found}", **kw)


class TraceOnBidirectionalTerm(CompMPGError):
    code = "TraceOnBidirectionalTerm"


class DiagramSyntaxError(CompMPGError):
    code = "SyntaxError"

    def __init__(self, message: str, expected=(), **kw):
        self.expected = tuple(expected)
        super().__init__(message, **kw)

    def to_json(self) -> dict:
        out = super().to_json()
        if self.expected:
            out["expected"] = list(self.expected)
        return out


class UnboundVariable(CompMPGError):
    code = "UnboundVariable"


class RealizabilityViolation(CompMPGError):
    code = "RealizabilityViolation"


class NonProductiveCycle(CompMPGError):
    code = "NonProductiveCycle"


class LeafTooLarge(CompMPGError):
    code = "LeafTooLarge"


class EmptyInput(CompMPGError):
    code = "EmptyInput"


class GameTooLargeForBruteForce(CompMPGError):
    code = "GameTooLargeForBruteForce"


class DisagreementDetected(CompMPGError):
    code = "DisagreementDetected"
