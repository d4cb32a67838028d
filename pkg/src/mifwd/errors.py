"""Exception hierarchy. Every error carries a stable machine-readable ``code``."""

from __future__ import annotations


class MifwdError(Exception):
    code = "error"

    def __init__(self, message: str = "", **context):
        super().__init__(message)
        self.message = message
        self.context = context

    def to_dict(self) -> dict:
        return {"code": self.code, "message": self.message, "context": self.context}


class VariableNotFound(MifwdError, KeyError):
    code = "variable_not_found"

    def __str__(self):
        return self.message


class EmptyArgument(MifwdError, ValueError):
    code = "empty_argument"


class OverlappingSets(MifwdError, ValueError):
    code = "overlapping_sets"


class InvalidPmf(MifwdError, ValueError):
    code = "invalid_pmf"


class AlreadySelected(MifwdError, ValueError):
    code = "already_selected"


class NothingToSelect(MifwdError, ValueError):
    code = "nothing_to_select"


class NonConvergence(MifwdError, ArithmeticError):
    code = "non_convergence"


class Unsupported(MifwdError, ValueError):
    code = "unsupported"


class MalformedDocument(MifwdError, ValueError):
    code = "malformed_document"


class SumMismatch(MifwdError, ValueError):
    code = "sum_mismatch"


class DuplicateOutcome(MifwdError, ValueError):
    code = "duplicate_outcome"


class MissingColumn(MifwdError, KeyError):
    code = "missing_column"

    def __str__(self):
        return self.message


class EmptyDataset(MifwdError, ValueError):
    code = "empty_dataset"


class UnknownSubcommand(MifwdError, ValueError):
    code = "unknown_subcommand"


class InvalidConfig(MifwdError, ValueError):
    code = "invalid_config"
