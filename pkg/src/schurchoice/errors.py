"""Exception hierarchy shared by every module.

Each class carries a short ``code`` so the CLI can report failures in a
machine-parsable form.
"""

from __future__ import annotations


class SchurChoiceError(Exception):
    code = "error"


class InputError(SchurChoiceError, ValueError):
    """Malformed or inconsistent user input."""

    code = "input_error"


class ResourceError(SchurChoiceError):
    """An enumeration would exceed its configured cap."""

    code = "resource_error"


class PreconditionError(SchurChoiceError):
    """An operation was called outside its documented domain."""

    code = "precondition_error"


class ConsistencyError(SchurChoiceError, AssertionError):
    """An internal structural guarantee failed; this indicates a bug."""

    code = "internal_consistency_error"
