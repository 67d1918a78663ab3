"""
Exception hierarchy for spheregate.

Engines raise these; row-level boundaries (survey rows, CLI commands)
catch SphereGateError and turn it into an error row or an exit code.
"""

from typing import Optional


class SphereGateError(Exception):
    """Base class for every error raised by the package."""


# Finite fields
class NonPrime(SphereGateError):
    pass


class TooLarge(SphereGateError):
    pass


class NoIrreducibleFound(SphereGateError):
    pass


class DivisionByZero(SphereGateError, ZeroDivisionError):
    pass


class FieldMismatch(SphereGateError):
    pass


# Group engine
class CapExceeded(SphereGateError):
    pass


class DegreeCapExceeded(CapExceeded):
    pass


class DegreeMismatch(SphereGateError):
    pass


class NotASubset(SphereGateError):
    pass


class NotASubgroup(SphereGateError):
    pass


class NotNormal(SphereGateError):
    pass


# Group-spec language and constructors
class SpecSyntaxError(SphereGateError):
    """Malformed group-spec text; ``position`` is the 0-based offending index."""

    def __init__(self, message: str, position: Optional[int] = None):
        self.position = position
        if position is not None:
            message = f"{message} (at position {position})"
        super().__init__(message)


class ParameterError(SphereGateError):
    pass


class UnsupportedFamily(SphereGateError):
    pass


# Constraint engine and structure
class WitnessInvalid(SphereGateError):
    pass


class ModelMismatch(SphereGateError):
    pass


class SolvableInput(SphereGateError):
    pass


# Data files
class ManifestError(SphereGateError):
    pass


class AxiomTableError(SphereGateError):
    pass
