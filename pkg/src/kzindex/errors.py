"""Exception hierarchy shared by every kzindex module.

The CLI maps these onto exit codes: ``FetchError`` is a transport failure,
everything else deriving from ``KzError`` is a data error.
"""


class KzError(Exception):
    """Base class for all kzindex errors."""


class ParseError(KzError):
    """Malformed input document."""

    def __init__(self, message, line=None, column=None, position=None):
        where = []
        if line is not None:
            where.append(f"line {line}")
        if column is not None:
            where.append(f"column {column}")
        if position is not None:
            where.append(f"byte {position}")
        if where:
            message = f"{message} ({', '.join(where)})"
        super().__init__(message)
        self.line = line
        self.column = column
        self.position = position


class FieldError(ParseError):
    """A required field is missing or has the wrong type."""

    def __init__(self, path, message):
        super().__init__(f"{path}: {message}")
        self.path = path


class DuplicateIdError(ParseError):
    def __init__(self, researcher_id):
        super().__init__(f"duplicate researcher id {researcher_id!r}")
        self.researcher_id = researcher_id


class HeaderError(ParseError):
    pass


class RowError(ParseError):
    """Bad value in a numbered CSV row (row 1 is the header)."""

    def __init__(self, row, message):
        super().__init__(f"row {row}: {message}")
        self.row = row


class ValidationError(KzError):
    pass


class FutureDatedError(ValidationError):
    def __init__(self, publication_year, evaluation_year, researcher_id=None):
        who = f"researcher {researcher_id!r}: " if researcher_id is not None else ""
        super().__init__(
            f"{who}publication year {publication_year} is after "
            f"evaluation year {evaluation_year}"
        )
        self.publication_year = publication_year
        self.evaluation_year = evaluation_year
        self.researcher_id = researcher_id


class YearRangeError(ValidationError):
    pass


class EmptyProfileError(KzError, ValueError):
    def __init__(self, researcher_id=None):
        who = f" (researcher {researcher_id!r})" if researcher_id is not None else ""
        super().__init__(f"N>0 required: profile has no publications{who}")
        self.researcher_id = researcher_id


class DomainError(KzError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class InsufficientDataError(KzError, ValueError):
    pass


class DegenerateDistributionError(KzError, ValueError):
    pass


class SchemaError(KzError):
    """API payload does not match the expected works-list shape."""


class FetchError(KzError):
    """Transport failure talking to the works API."""

    def __init__(self, message, status=None, pages_fetched=0):
        super().__init__(message)
        self.status = status
        self.pages_fetched = pages_fetched


class NotFoundError(FetchError):
    pass
