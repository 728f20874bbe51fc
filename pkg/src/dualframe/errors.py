"""Exception types raised by dualframe."""

from __future__ import annotations

from dataclasses import dataclass


class DualFrameError(Exception):
    """Base class for all domain errors."""

    def to_dict(self) -> dict:
        return {"error": type(self).__name__, "message": str(self)}


class DimensionError(DualFrameError, ValueError):
    pass


class InvalidState(DualFrameError, ValueError):
    def __init__(self, reason: str, value: float):
        super().__init__(f"{reason} (value {value:.3e})")
        self.reason = reason
        self.value = value

    def to_dict(self) -> dict:
        return {"error": "InvalidState", "reason": self.reason, "value": self.value}


class InvalidEnsemble(DualFrameError, ValueError):
    pass


class NegativeProbability(DualFrameError, ValueError):
    def __init__(self, index: int, value: float):
        super().__init__(f"outcome {index} has probability {value:.3e}")
        self.index = index
        self.value = value


# POVM violations are collected, not raised one at a time.

@dataclass(frozen=True)
class NotHermitian:
    index: int
    deviation: float

    def to_dict(self) -> dict:
        return {"error": "NotHermitian", "index": self.index, "deviation": self.deviation}


@dataclass(frozen=True)
class NotPositive:
    index: int
    min_eigenvalue: float

    def to_dict(self) -> dict:
        return {"error": "NotPositive", "index": self.index, "min_eigenvalue": self.min_eigenvalue}


@dataclass(frozen=True)
class IncompleteSum:
    deviation: float

    def to_dict(self) -> dict:
        return {"error": "IncompleteSum", "deviation": self.deviation}


class InvalidPovm(DualFrameError, ValueError):
    """Raised with every violated POVM condition attached."""

    def __init__(self, violations):
        self.violations = tuple(violations)
        names = ", ".join(type(v).__name__ for v in self.violations)
        super().__init__(f"invalid POVM: {names}")

    def to_dict(self) -> dict:
        return {
            "error": "InvalidPovm",
            "violations": [v.to_dict() for v in self.violations],
        }


class SingularFrame(DualFrameError):
    def __init__(self, min_eigenvalue: float):
        super().__init__(f"frame operator is singular on the span (min eigenvalue {min_eigenvalue:.3e})")
        self.min_eigenvalue = min_eigenvalue


class CountMismatch(DualFrameError, ValueError):
    def __init__(self, expected: int, got: int):
        super().__init__(f"expected {expected} operators, got {got}")
        self.expected = expected
        self.got = got


class InvalidDual(DualFrameError):
    def __init__(self, residual: float):
        super().__init__(f"not a dual frame (residual {residual:.3e})")
        self.residual = residual

    def to_dict(self) -> dict:
        return {"error": "InvalidDual", "residual": self.residual}


class MissingGamma(DualFrameError):
    def __init__(self):
        super().__init__("coefficient map has no generalized inverse attached")


class ZeroWeightOutcome(DualFrameError):
    def __init__(self, indices, message: str | None = None):
        self.indices = tuple(int(i) for i in indices)
        super().__init__(message or f"outcomes {list(self.indices)} have zero weight but nonzero POVM element")

    def to_dict(self) -> dict:
        return {"error": "ZeroWeightOutcome", "indices": list(self.indices), "message": str(self)}


class NotInSpan(DualFrameError):
    def __init__(self, residual: float):
        super().__init__(f"operator is not in the span of the POVM (residual {residual:.3e})")
        self.residual = residual

    def to_dict(self) -> dict:
        return {"error": "NotInSpan", "residual": self.residual}


class FormatError(DualFrameError, ValueError):
    """Input document does not follow the expected file layout."""
