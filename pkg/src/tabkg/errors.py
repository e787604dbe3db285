"""Exception types shared across the package."""


class TabkgError(Exception):
    """Base class for all package-specific errors."""


class EmptyTableError(TabkgError):
    """A CSV file parsed to zero rows; the table should be skipped."""


class BackendUnavailable(TabkgError):
    """The knowledge-graph backend could not be reached after retries."""


class RateLimited(BackendUnavailable):
    """The backend kept rate-limiting us until the retry budget ran out."""


class NotFound(TabkgError):
    """The requested entity id does not exist in the backend."""


class DuplicatePredictionError(TabkgError):
    """An annotation file contains the same key more than once."""


class MalformedRowError(TabkgError):
    """An annotation or target file contains an unparseable row."""

    def __init__(self, message: str, line_no: int):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no
