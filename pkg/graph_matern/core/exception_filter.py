"""Central translation of exceptions into console messages and CLI exit codes."""

import logging
from collections.abc import Iterator
from contextlib import contextmanager

import pydantic
import typer
from rich.console import Console

from graph_matern.core.exceptions import EXIT_NUMERICAL, EXIT_PARSE, AppError

logger = logging.getLogger(__name__)


class CliExceptionFilter:
    """Convert exceptions raised by commands into messages and exit codes."""

    def __init__(self, console: Console | None = None):
        self.console = console or Console(stderr=True)

    @staticmethod
    def handle_app_error(console: Console, exc: AppError) -> int:
        """Handle application exceptions."""
        log_message = f"[{exc.error_code}] {exc.message}"
        if exc.context:
            log_message += f" | Context: {exc.context}"

        if exc.exit_code >= EXIT_NUMERICAL:
            logger.error(log_message)
        else:
            logger.warning(log_message)

        console.print(f"[red]Error:[/red] {exc.user_message}")
        return exc.exit_code

    @staticmethod
    def handle_validation_error(console: Console, exc: pydantic.ValidationError) -> int:
        """Handle pydantic validation errors on parameters and records."""
        errors = []
        for error in exc.errors():
            field_name = " -> ".join(str(x) for x in error["loc"])
            errors.append(
                CliExceptionFilter._get_user_friendly_validation_message(
                    field_name, error["msg"], error["type"]
                )
            )

        logger.warning(f"Validation error: {errors}")
        for message in errors:
            console.print(f"[red]Error:[/red] {message}")
        return EXIT_PARSE

    @staticmethod
    def handle_unexpected_error(console: Console, exc: Exception) -> int:
        """Handle unexpected exceptions."""
        logger.error(f"Unhandled exception: {type(exc).__name__} - {exc}", exc_info=True)
        console.print(f"[red]Unexpected error:[/red] {type(exc).__name__}: {exc}")
        return EXIT_NUMERICAL

    @staticmethod
    def _get_user_friendly_validation_message(field_name: str, error_msg: str, error_type: str) -> str:
        """Convert technical validation messages to user-friendly ones."""
        display_field = field_name.split(" -> ")[-1].replace("_", " ")

        validation_message_map = {
            "missing": f"{display_field} is required.",
            "greater_than": f"{display_field} must be positive.",
            "greater_than_equal": f"{display_field} must not be negative.",
            "less_than_equal": f"{display_field} is too large.",
            "float_parsing": f"{display_field} must be a number.",
            "int_parsing": f"{display_field} must be an integer.",
            "finite_number": f"{display_field} must be finite.",
        }
        return validation_message_map.get(error_type, f"{display_field}: {error_msg}")

    @contextmanager
    def guard(self) -> Iterator[None]:
        """Run a command body, exiting with the code matching any raised exception."""
        try:
            yield
        except typer.Exit:
            raise
        except AppError as exc:
            raise typer.Exit(code=self.handle_app_error(self.console, exc)) from exc
        except pydantic.ValidationError as exc:
            raise typer.Exit(code=self.handle_validation_error(self.console, exc)) from exc
        except Exception as exc:
            raise typer.Exit(code=self.handle_unexpected_error(self.console, exc)) from exc
