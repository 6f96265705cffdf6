"""Exception hierarchy shared by all cyceq modules.

Validation errors mean the input object violates a contract; resource
errors mean a computation hit an explicit bound and the outcome is
inconclusive rather than negative.
"""

from __future__ import annotations


class CyceqError(Exception):
    pass


class ValidationError(CyceqError):
    pass


# equations
class ZeroCoefficient(ValidationError):
    pass


class NonzeroSum(ValidationError):
    pass


class TooShort(ValidationError):
    pass


class CoefficientTooLarge(ValidationError):
    pass


class TooManyVariables(ValidationError):
    pass


class LengthMismatch(ValidationError):
    pass


# graphs
class NotAHomomorphism(ValidationError):
    def __init__(self, edge, message=None):
        self.edge = tuple(edge)
        super().__init__(message or f"edge {self.edge} does not map to a pattern edge")


class ZeroSize(ValidationError):
    pass


class NotAWalk(ValidationError):
    pass


class PatternNotK3(ValidationError):
    pass


class NotACycle(ValidationError):
    pass


class NotSurjective(ValidationError):
    pass


class PackingTooSmall(ValidationError):
    pass


class NoTriangles(ValidationError):
    pass


# resource bounds; all carry enough context to report the bound that was hit
class ResourceLimit(CyceqError):
    pass


class ScaleExceeded(ResourceLimit):
    pass


class Truncated(ResourceLimit):
    pass


class BudgetExhausted(ResourceLimit):
    pass
