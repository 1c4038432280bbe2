"""Exception types shared across the pipeline.

Every module raises one of these instead of bare ValueError/RuntimeError so
callers can tell contract violations apart from upstream (provider) trouble.
"""


class RdrError(Exception):
    """Base class for all package errors."""


class ContractError(RdrError):
    """An operation was called with arguments violating its contract."""


class PreconditionError(ContractError):
    """A stated precondition does not hold (empty text, missing field, ...)."""


class DegenerateInputError(ContractError):
    """Input is too degenerate for the operation (e.g. < 2 distinct points)."""


class MalformedRowError(RdrError):
    """A corpus input row is missing a required field or holds a bad value."""

    def __init__(self, row_number: int, field: str, detail: str = ""):
        self.row_number = row_number
        self.field = field
        msg = f"row {row_number}: bad or missing field {field!r}"
        if detail:
            msg += f" ({detail})"
        super().__init__(msg)


class ConfigurationError(RdrError):
    """Bad or missing configuration (credentials, paths, value ranges)."""

    def __init__(self, message: str, key: str | None = None):
        self.key = key
        super().__init__(f"{key}: {message}" if key else message)


class UpstreamError(RdrError):
    """A provider rejected the request after all retries."""

    def __init__(self, message: str, status: int | str | None = None):
        self.status = status
        super().__init__(message)


class FormatError(RdrError):
    """Model output could not be parsed; carries the raw text for audit."""

    def __init__(self, message: str, raw_text: str = ""):
        self.raw_text = raw_text
        super().__init__(message)


class ClassificationError(RdrError):
    """A domain verdict could not be mapped to a label."""


class ExtractionError(RdrError):
    """A structured extraction is missing one of its required fields."""


class SummaryError(RdrError):
    """A cluster keyword response stayed malformed after the re-ask."""


class SurveyError(RdrError):
    """The structured survey violates its coverage contract."""

    def __init__(self, message: str, uncovered: set[int] | None = None):
        self.uncovered = set(uncovered or ())
        super().__init__(message)


class DependencyError(RdrError):
    """A pipeline stage ran before the stage it depends on."""

    def __init__(self, stage: str, missing: str):
        self.stage = stage
        self.missing = missing
        super().__init__(f"stage {stage!r} requires outputs of stage {missing!r}; run it first")
