"""
## Exception Hierachy

- [`RfiForgeException`][rfiforge.exceptions.RfiForgeException]
    - [`ConfigurationError`][rfiforge.exceptions.ConfigurationError]
        - [`ModelValidationError`][rfiforge.exceptions.ModelValidationError]
    - [`OutputError`][rfiforge.exceptions.OutputError]
    - [`SimulationError`][rfiforge.exceptions.SimulationError]
        - [`InvalidModelError`][rfiforge.exceptions.InvalidModelError]
        - [`DomainError`][rfiforge.exceptions.DomainError]
        - [`DimensionMismatch`][rfiforge.exceptions.DimensionMismatch]
        - [`InsufficientSamples`][rfiforge.exceptions.InsufficientSamples]
        - [`NumericError`][rfiforge.exceptions.NumericError]
            - [`IllConditionedBasis`][rfiforge.exceptions.IllConditionedBasis]
            - [`DegenerateLag`][rfiforge.exceptions.DegenerateLag]

Every exception carries the `exit_code` the command line front end returns
when it is raised out of a subcommand.
"""

from __future__ import annotations

from typing import Any


class RfiForgeException(Exception):
    """
    Base exception for rfiforge
    """

    exit_code: int = 1


class ConfigurationError(RfiForgeException):
    """
    Exception raised when a configuration document cannot be read or is invalid
    """

    exit_code = 2

    def __init__(self, *args, field: str | None = None, line: int | None = None):
        self.field = field
        self.line = line
        super().__init__(*args)


class ModelValidationError(ConfigurationError):
    """
    Exception raised when a model fails validation

    Parameters
    ----------
    errors : list[dict[str, Any]]
        The errors reported by pydantic, as returned by `ValidationError.errors()`
    """

    def __init__(self, errors: list[dict[str, Any]], *, line: int | None = None):
        self.errors = errors
        field = None
        if errors:
            field = ".".join(str(part) for part in errors[0].get("loc", ()))
        super().__init__(self._format(errors), field=field, line=line)

    @staticmethod
    def _format(errors: list[dict[str, Any]]) -> str:
        lines = []
        for error in errors:
            loc = ".".join(str(part) for part in error.get("loc", ())) or "<root>"
            lines.append(f"{loc}: {error.get('msg', 'invalid value')}")
        return "; ".join(lines) or "validation failed"


class OutputError(RfiForgeException):
    """
    Exception raised when reading inputs or writing artifacts fails
    """

    exit_code = 3


class SimulationError(RfiForgeException):
    """
    Base exception for failures inside the numerical pipeline
    """

    exit_code = 4


class InvalidModelError(SimulationError):
    """
    Exception raised when a signal model is inconsistent with the array it is used on
    """

    pass


class DomainError(SimulationError):
    """
    Exception raised when an argument lies outside the domain of an operation
    """

    pass


class DimensionMismatch(SimulationError):
    """
    Exception raised when array shapes do not agree
    """

    pass


class InsufficientSamples(SimulationError):
    """
    Exception raised when a lag is not smaller than the number of snapshots
    """

    pass


class NumericError(SimulationError):
    """
    Exception raised when a matrix contains non-finite values or a decomposition fails
    """

    pass


class IllConditionedBasis(NumericError):
    """
    Exception raised when a subspace basis is too close to rank deficient to project out
    """

    pass


class DegenerateLag(NumericError):
    """
    Exception raised when a lagged covariance carries no structure to subtract
    """

    pass
