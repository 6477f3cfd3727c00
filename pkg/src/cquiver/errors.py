"""Exception hierarchy shared by every module."""


class CQuiverError(Exception):
    """Base class for all package errors."""


class NotInvariant(CQuiverError):
    """A block map does not carry one kernel (image) into another."""


class OutOfWindow(CQuiverError):
    pass


class NotExtremal(CQuiverError):
    pass


class NotSink(NotExtremal):
    pass


class NotSource(NotExtremal):
    pass


class NoNeighbor(CQuiverError):
    pass


class Incomparable(CQuiverError):
    pass


class FieldMismatch(CQuiverError):
    pass


class QuiverMismatch(CQuiverError):
    pass


class DecompositionMismatch(CQuiverError):
    pass


class NotInSubcategory(CQuiverError):
    pass


class PaperInconsistency(CQuiverError):
    """Assembled reflection disagrees with the pointwise formulas.

    ``cell`` names the offending cell when one is known.
    """

    def __init__(self, message: str, cell=None, check: str | None = None):
        super().__init__(message)
        self.cell = cell
        self.check = check


class RoundTripMismatch(CQuiverError):
    def __init__(self, message: str, expected=None, got=None):
        super().__init__(message)
        self.expected = expected
        self.got = got


class SchemaError(CQuiverError):
    """Malformed document; ``path`` locates the offending field."""

    def __init__(self, message: str, path: str = "$"):
        super().__init__(f"{path}: {message}")
        self.path = path
