"""Exception types shared across the library."""


class L0LimitsError(Exception):
    """Base class for all library errors."""


class SpaceMismatchError(L0LimitsError):
    """Operands live over different base spaces."""


class ShapeMismatchError(L0LimitsError):
    """Dimension or shape incompatibility between operands."""


class UnsupportedNormError(L0LimitsError):
    """A norm construction falls outside the supported closed family."""


class DimensionCapError(L0LimitsError):
    """Vertex enumeration requested beyond the supported dimension cap."""


class BracketTooWideError(L0LimitsError):
    """An operator-norm bracket could not be certified to tolerance."""

    def __init__(self, lower: float, upper: float, message: str = ""):
        self.lower = lower
        self.upper = upper
        detail = message or "operator norm bracket too wide"
        super().__init__(f"{detail}: [{lower!r}, {upper!r}]")


class ValidationError(L0LimitsError):
    """A system, morphism or factorization violates its laws."""

    def __init__(self, message: str, report=None):
        self.report = report
        super().__init__(message)


class DocumentError(L0LimitsError):
    """A harness document is malformed; carries a path into the document."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")
