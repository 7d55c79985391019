"""Exception hierarchy shared across the package."""


class ProcmineError(Exception):
    """Base class for all errors raised by procmine."""


class SchemaError(ProcmineError):
    """A required column is missing or a record does not match its table schema."""


class RowParseError(ProcmineError):
    """A CSV data row could not be parsed; carries the 1-based line number."""

    def __init__(self, line_no: int, message: str):
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


class DuplicateKeyError(ProcmineError):
    """A composite primary key occurred more than once."""

    def __init__(self, key, message: str | None = None):
        super().__init__(message or f"duplicate key {key!r}")
        self.key = key


class EmptyLogError(ProcmineError):
    """An operation that requires a non-empty event log received an empty one."""


class StorageError(ProcmineError):
    """Generic storage-engine failure."""


class TableExistsError(StorageError):
    """create_table was called with a name that is already in use."""


class UnknownTableError(StorageError):
    """A table name was referenced that the engine does not know."""


class UnknownColumnError(StorageError):
    """A scan projection or predicate referenced a column not in the schema."""


class UnsupportedOperationError(StorageError):
    """The operation is not supported by this engine kind (e.g. flush on the row engine)."""


class CompressionError(ProcmineError):
    """A compressed block could not be decoded, or a page cannot fit any legal slot."""
