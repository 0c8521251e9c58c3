"""
Custom exceptions for the topobench toolkit.

This module defines the exception hierarchy used by all services and the
conversion of those exceptions into process exit codes at the CLI boundary.
"""

from typing import Any, Dict, List, Optional, Tuple


EXIT_OK = 0
EXIT_USAGE = 1
EXIT_VALIDATION = 2
EXIT_INFEASIBLE = 3


class TopoBenchError(Exception):
    """
    Base exception class for topobench.

    Args:
        message: Error message
        details: Additional error details
    """

    def __init__(self, message: str, details: Optional[Dict[str, Any]] = None):
        self.message = message
        self.details = details or {}
        super().__init__(self.message)


class UsageError(TopoBenchError):
    """Raised for malformed command lines or unknown option values."""


class FilterConfigError(TopoBenchError):
    """
    Exception raised when a run or filter configuration is invalid.

    Args:
        message: Error message
        field_errors: Mapping of field name to problem description
        details: Additional error details
    """

    def __init__(self, message: str, field_errors: Optional[Dict[str, str]] = None, details: Optional[Dict[str, Any]] = None):
        self.field_errors = field_errors or {}
        super().__init__(message, details)


class GraphValidationError(TopoBenchError):
    """
    Exception raised when a graph violates its structural invariants.

    Args:
        message: Error message
        pair: The offending node pair, if the problem is edge-specific
        details: Additional error details
    """

    def __init__(self, message: str, pair: Optional[Tuple[int, int]] = None, details: Optional[Dict[str, Any]] = None):
        self.pair = pair
        super().__init__(message, details)


class UnsatisfiableGenerationError(TopoBenchError):
    """
    Exception raised when a generator cannot satisfy its target after retries.

    Args:
        message: Error message
        attempts: Number of attempts made before giving up
        details: Additional error details
    """

    def __init__(self, message: str, attempts: int = 0, details: Optional[Dict[str, Any]] = None):
        self.attempts = attempts
        super().__init__(message, details)


class InfeasibleSelectionError(TopoBenchError):
    """
    Exception raised when filtering cannot meet balanced split targets.

    Args:
        message: Error message
        shortfall: Missing item count per class label
        details: Additional error details
    """

    def __init__(self, message: str, shortfall: Optional[Dict[int, int]] = None, details: Optional[Dict[str, Any]] = None):
        self.shortfall = shortfall or {}
        super().__init__(message, details)


class TensorShapeError(TopoBenchError):
    """
    Exception raised on a shape mismatch in tensor operations.

    Args:
        message: Error message
        step: Index or description of the failing pipeline step
        details: Additional error details
    """

    def __init__(self, message: str, step: Optional[str] = None, details: Optional[Dict[str, Any]] = None):
        self.step = step
        super().__init__(message, details)


class PlanError(TopoBenchError):
    """
    Exception raised when an embedding plan cannot be constructed.

    Args:
        message: Error message
        mode: Mode id that caused the failure
        details: Additional error details
    """

    def __init__(self, message: str, mode: Optional[int] = None, details: Optional[Dict[str, Any]] = None):
        self.mode = mode
        super().__init__(message, details)


class DatasetFormatError(TopoBenchError):
    """
    Exception raised when a dataset or tensor file is malformed.

    Args:
        message: Error message
        line_number: 1-based line number of the offending record
        details: Additional error details
    """

    def __init__(self, message: str, line_number: Optional[int] = None, details: Optional[Dict[str, Any]] = None):
        self.line_number = line_number
        super().__init__(message, details)


class OracleMismatchError(TopoBenchError):
    """
    Exception raised when dataset labels disagree with oracle recomputation.

    Args:
        message: Error message
        item_ids: Ids of the inconsistent items
        details: Additional error details
    """

    def __init__(self, message: str, item_ids: Optional[List[str]] = None, details: Optional[Dict[str, Any]] = None):
        self.item_ids = item_ids or []
        super().__init__(message, details)


_EXIT_CODES = (
    (UsageError, EXIT_USAGE),
    (FilterConfigError, EXIT_USAGE),
    (UnsatisfiableGenerationError, EXIT_INFEASIBLE),
    (InfeasibleSelectionError, EXIT_INFEASIBLE),
)


def exit_code_for(error: Exception) -> int:
    """
    Map an exception to the CLI exit-code contract.

    Args:
        error: Exception raised by a command

    Returns:
        1 for usage/config errors, 3 for infeasible generation or selection,
        2 for every other failure
    """
    for error_type, code in _EXIT_CODES:
        if isinstance(error, error_type):
            return code
    return EXIT_VALIDATION


def format_error(error: Exception) -> str:
    """
    Render an exception as a single diagnostic line for stderr.

    Args:
        error: Exception raised by a command

    Returns:
        Human-readable error line including typed context
    """
    if not isinstance(error, TopoBenchError):
        return f"error: {error}"

    context: Dict[str, Any] = {}
    if isinstance(error, GraphValidationError) and error.pair is not None:
        context["pair"] = list(error.pair)
    elif isinstance(error, FilterConfigError) and error.field_errors:
        context["fields"] = error.field_errors
    elif isinstance(error, InfeasibleSelectionError) and error.shortfall:
        context["shortfall"] = error.shortfall
    elif isinstance(error, UnsatisfiableGenerationError):
        context["attempts"] = error.attempts
    elif isinstance(error, TensorShapeError) and error.step is not None:
        context["step"] = error.step
    elif isinstance(error, PlanError) and error.mode is not None:
        context["mode"] = error.mode
    elif isinstance(error, DatasetFormatError) and error.line_number is not None:
        context["line"] = error.line_number
    elif isinstance(error, OracleMismatchError):
        context["ids"] = error.item_ids

    suffix = f" {context}" if context else ""
    return f"{type(error).__name__}: {error.message}{suffix}"
