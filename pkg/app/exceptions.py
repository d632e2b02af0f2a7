"""
Error hierarchy for the selection game workbench.

Services raise these; the CLI turns them into exit code 2 and the HTTP layer
turns them into ``HTTPException`` responses.
"""

from typing import Any, Optional, Sequence


class WorkbenchError(Exception):
    """Root of every error raised by the workbench."""

    def to_dict(self) -> dict[str, Any]:
        return {"error": type(self).__name__, "detail": str(self)}


class DomainError(WorkbenchError, ValueError):
    """An atom, point or parameter outside the declared domain."""


class UniverseMismatch(DomainError):
    """Two families (or a family and an instance) disagree on the universe."""


class BoundExceeded(WorkbenchError):
    """A search or enumeration went over its node budget.

    Signals that the instance is too large, never that an answer is wrong.
    """

    def __init__(self, what: str, budget: int, explored: int):
        self.what = what
        self.budget = budget
        self.explored = explored
        super().__init__(f"{what}: budget of {budget} nodes exceeded after {explored}")

    def to_dict(self) -> dict[str, Any]:
        return {**super().to_dict(), "budget": self.budget, "nodes": self.explored}


class IllegalStrategyError(WorkbenchError):
    """A strategy table was consulted at a history it cannot legally answer."""

    def __init__(self, message: str, round_index: int, history: Sequence[Any] = ()):
        self.round_index = round_index
        self.history = tuple(history)
        super().__init__(f"round {round_index}: {message}")

    def to_dict(self) -> dict[str, Any]:
        return {**super().to_dict(), "round": self.round_index, "history": list(self.history)}


class ReflectionViolation(WorkbenchError):
    """A translation needed a reflection property that the families lack."""

    def __init__(self, condition: str, message: str, witness: Optional[dict[str, Any]] = None):
        self.condition = condition
        self.witness = witness or {}
        super().__init__(f"{condition} condition failed, {message}")

    def to_dict(self) -> dict[str, Any]:
        return {**super().to_dict(), "failed_condition": self.condition, "witness": self.witness}


class InstanceParseError(WorkbenchError):
    """Malformed JSON input, located by line/column or by field path."""

    def __init__(self, message: str, location: str = ""):
        self.location = location
        super().__init__(f"{location}: {message}" if location else message)

    def to_dict(self) -> dict[str, Any]:
        return {**super().to_dict(), "location": self.location}
