"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent caller input (shapes, ranges, enums)."""


class ConfigError(InputError):
    """Invalid experiment or solver configuration."""


class DegenerateInputError(InputError):
    """Input is structurally valid but numerically degenerate (e.g. all
    points identical, all-zero kernel vector)."""


class IngestionError(InputError):
    """CSV ingestion failure; carries the offending 1-based row number."""

    def __init__(self, message, row=None):
        if row is not None:
            message = f"{message} (row {row})"
        super().__init__(message)
        self.row = row


class MissingClassError(InputError):
    """A required class has no annotations (segmentation precondition)."""


class SolverError(RuntimeError):
    """A linear system was singular or too ill-conditioned to trust."""
