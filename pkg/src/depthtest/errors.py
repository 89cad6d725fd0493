"""Exception hierarchy shared across the package."""


class DepthTestError(Exception):
    """Base class for all package errors."""


class DomainError(DepthTestError, ValueError):
    """An argument lies outside the domain of the operation."""


class DimensionMismatch(DepthTestError, ValueError):
    pass


class EmptyInput(DepthTestError, ValueError):
    pass


class NumericalError(DepthTestError):
    """Data are numerically degenerate for the requested computation."""


class NotPositiveDefinite(NumericalError):
    pass


class DegenerateSample(NumericalError):
    pass


class ZeroSpread(NumericalError):
    pass


class TooFewRows(DepthTestError, ValueError):
    pass


class BadWeights(DepthTestError, ValueError):
    pass


class EmptyEnsemble(DepthTestError, ValueError):
    pass


class InsufficientReplicates(DepthTestError, ValueError):
    pass


class ReplicateError(DepthTestError):
    """A replicate of a resampling run failed; ``index`` names which one."""

    def __init__(self, index: int, cause: Exception):
        super().__init__(f"replicate {index} failed: {cause}")
        self.index = index
        self.cause = cause


class DataError(DepthTestError):
    """Problems ingesting user-supplied data files."""


class MissingColumn(DataError):
    pass


class ParseError(DataError):
    def __init__(self, row: int, col: str, value: str):
        super().__init__(f"cannot parse {value!r} as a number at row {row}, column {col!r}")
        self.row = row
        self.col = col
        self.value = value


class NonFiniteValue(DataError):
    def __init__(self, row: int, col: str, value: str):
        super().__init__(f"non-finite value {value!r} at row {row}, column {col!r}")
        self.row = row
        self.col = col
        self.value = value


class EmptyGroup(DataError):
    pass


class SchemaError(DepthTestError, ValueError):
    """Invalid scenario document; ``path`` is a JSON path such as ``$.alpha``."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path}: {message}")
        self.path = path
