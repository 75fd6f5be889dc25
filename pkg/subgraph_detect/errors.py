# subgraph_detect/errors.py
"""Exception hierarchy. Every error carries the CLI exit code it maps to."""
from __future__ import annotations


class DetectionError(Exception):
    exit_code = 1


class DomainError(DetectionError, ValueError):
    """Argument outside the mathematical domain of an operation."""
    exit_code = 2


class InteriorMinimizerError(DomainError):
    """delta_k precondition 2*theta_{p1} >= theta_{q_k} fails; fall back to the Delta bound."""


class ParseError(DetectionError, ValueError):
    exit_code = 2


class MissingKeyError(DetectionError, KeyError):
    exit_code = 2

    def __str__(self) -> str:  # KeyError quotes its argument otherwise
        return str(self.args[0]) if self.args else "missing key"


class OutputError(DetectionError, OSError):
    exit_code = 3


class FeasibilityError(DetectionError, RuntimeError):
    """Enumeration cap or node budget exceeded."""
    exit_code = 4


class SizeCapError(FeasibilityError):
    pass


class InvariantError(DetectionError, AssertionError):
    exit_code = 5


def exit_code_for(exc: BaseException) -> int:
    return getattr(exc, "exit_code", 1)
