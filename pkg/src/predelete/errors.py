"""Exception hierarchy shared across the toolkit.

The CLI maps these onto process exit codes: DataError -> 3, ModelError -> 4,
anything else -> 5 (usage problems exit 2 before any of this is reached).
"""


class PredeleteError(Exception):
    """Base class for all errors raised by this package."""


class DataError(PredeleteError):
    """Bad input data: corpus files, annotation tables, score files, labels."""


class InvariantError(DataError):
    """A record or corpus violates one of its declared invariants."""


class CorpusFormatError(DataError):
    """A corpus file failed to parse; carries the offending line number."""

    def __init__(self, message: str, path: str = "", line: int | None = None):
        self.path = path
        self.line = line
        prefix = f"{path}:{line}: " if line is not None else (f"{path}: " if path else "")
        super().__init__(prefix + message)


class DuplicateIdError(DataError):
    """Two records share an id within one corpus."""

    def __init__(self, record_id: str, line: int | None = None):
        self.record_id = record_id
        self.line = line
        at = f" (line {line})" if line is not None else ""
        super().__init__(f"duplicate record id {record_id!r}{at}")


class ModelError(PredeleteError):
    """Model-level failures: dimensions, bundles, cascade wiring."""


class BundleFormatError(ModelError):
    """A bundle file is not in the expected container format."""


class BundleVersionError(ModelError):
    """A bundle file declares a format version this build cannot read."""


class BundleChecksumError(ModelError):
    """A bundle file is truncated or its checksum does not match."""


class UsageError(PredeleteError):
    """Bad command-line invocation (exit code 2)."""
