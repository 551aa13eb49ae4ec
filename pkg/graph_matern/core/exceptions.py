# mypy: disable-error-code = assignment

"""Exceptions for the library with user-friendly messages and process exit codes."""

from typing import Any

EXIT_PARSE = 1
EXIT_NUMERICAL = 2
EXIT_CONVERGENCE = 3


class AppError(Exception):
    """Base exception for all application errors."""

    def __init__(
        self,
        message: str,
        user_message: str | None = None,
        exit_code: int = EXIT_NUMERICAL,
        error_code: str | None = None,
        context: dict[str, Any] | None = None,
    ):
        """
        Initialize application exception.

        Args:
            message: Technical message for logging
            user_message: Message shown on the console
            exit_code: Process exit code used by the CLI
            error_code: Application-specific error code
            context: Additional context for debugging
        """
        super().__init__(message)
        self.message = message
        self.user_message = user_message or message
        self.exit_code = exit_code
        self.error_code = error_code or self.__class__.__name__
        self.context = context or {}

    def __str__(self):
        return f"[{self.error_code}] {self.message}"

    def to_record(self) -> dict[str, Any]:
        """Flatten to a dictionary suitable for structured logs."""
        record = {
            "type": self.error_code.lower().replace("_", "-"),
            "title": self.error_code.replace("_", " ").title(),
            "exit_code": self.exit_code,
            "detail": self.user_message,
        }
        if self.context:
            record.update(self.context)
        return record


# Input Exceptions
class ValidationError(AppError):
    """Raised when user input fails validation."""

    def __init__(
        self,
        message: str,
        user_message: str | None = None,
        field: str | None = None,
        value: Any = None,
        error_code: str = "VALIDATION_ERROR",
    ):
        context = {}
        if field:
            context["field"] = field
        if value is not None:
            context["value"] = str(value)

        super().__init__(
            message=message,
            user_message=user_message or "The information provided is invalid.",
            exit_code=EXIT_PARSE,
            error_code=error_code,
            context=context,
        )


class GraphValidationError(ValidationError):
    """Raised when a metric graph is malformed."""

    def __init__(self, message: str, field: str | None = None, value: Any = None):
        super().__init__(
            message=message,
            user_message=f"Invalid graph: {message}",
            field=field,
            value=value,
            error_code="INVALID_GRAPH",
        )


class InvalidParameterError(ValidationError):
    """Raised when model parameters are outside their admissible range."""

    def __init__(self, message: str, field: str | None = None, value: Any = None):
        super().__init__(
            message=message,
            user_message=f"Invalid parameter: {message}",
            field=field,
            value=value,
            error_code="INVALID_PARAMETER",
        )


class InvalidObservationError(ValidationError):
    """Raised when observations or locations are inconsistent with the graph or model."""

    def __init__(self, message: str, field: str | None = None, value: Any = None):
        super().__init__(
            message=message,
            user_message=f"Invalid observations: {message}",
            field=field,
            value=value,
            error_code="INVALID_OBSERVATION",
        )


class InputParseError(AppError):
    """Raised when an input file cannot be parsed."""

    def __init__(self, path: str, reason: str, line: int | None = None):
        context: dict[str, Any] = {"path": path}
        where = path
        if line is not None:
            context["line"] = line
            where = f"{path}:{line}"

        super().__init__(
            message=f"Cannot parse {where}: {reason}",
            user_message=f"Could not read {where}: {reason}",
            exit_code=EXIT_PARSE,
            error_code="INPUT_PARSE_ERROR",
            context=context,
        )
        self.line = line


# Numerical Exceptions
class NumericalError(AppError):
    """Raised when a numerical routine fails."""

    def __init__(
        self,
        message: str,
        user_message: str | None = None,
        error_code: str = "NUMERICAL_ERROR",
        context: dict[str, Any] | None = None,
    ):
        super().__init__(
            message=message,
            user_message=user_message or "A numerical computation failed.",
            exit_code=EXIT_NUMERICAL,
            error_code=error_code,
            context=context,
        )


class NotPositiveDefiniteError(NumericalError):
    """Raised when a matrix expected to be SPD fails to factorize."""

    def __init__(self, what: str, detail: str | None = None):
        message = f"{what} is not positive definite"
        if detail:
            message += f" ({detail})"
        super().__init__(
            message=message,
            user_message=f"The {what} could not be factorized; check parameters and observations.",
            error_code="NOT_POSITIVE_DEFINITE",
            context={"matrix": what},
        )


class SingularSystemError(NumericalError):
    """Raised when a covariance or constraint system is singular."""

    def __init__(self, what: str, detail: str | None = None):
        message = f"{what} is singular"
        if detail:
            message += f" ({detail})"
        super().__init__(
            message=message,
            user_message=f"The {what} is singular (duplicate direct observations?).",
            error_code="SINGULAR_SYSTEM",
            context={"matrix": what},
        )


class RankDeficientConstraintsError(NumericalError):
    """Raised when a vertex constraint block does not have full row rank."""

    def __init__(self, vertex: str, order: int):
        super().__init__(
            message=f"Constraint block at vertex {vertex} (order {order}) is rank deficient",
            user_message="The vertex conditions are redundant.",
            error_code="RANK_DEFICIENT_CONSTRAINTS",
            context={"vertex": vertex, "order": order},
        )


class ResourceLimitError(NumericalError):
    """Raised when a dense reference computation would exceed its size guard."""

    def __init__(self, what: str, size: int, limit: int):
        super().__init__(
            message=f"{what} needs {size} unknowns, limit is {limit}",
            user_message=f"The {what} is too large for the dense reference path.",
            error_code="RESOURCE_LIMIT",
            context={"size": size, "limit": limit},
        )


# Optimizer Exceptions
class ConvergenceError(AppError):
    """Raised when parameter estimation does not converge."""

    def __init__(self, message: str, context: dict[str, Any] | None = None):
        super().__init__(
            message=message,
            user_message="The optimizer did not converge; the best point found was reported.",
            exit_code=EXIT_CONVERGENCE,
            error_code="CONVERGENCE_ERROR",
            context=context,
        )
