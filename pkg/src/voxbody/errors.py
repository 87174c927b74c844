"""Exception hierarchy shared across the toolkit."""


class VoxBodyError(Exception):
    """Base class for all toolkit errors."""


class DataError(VoxBodyError):
    """Malformed or inconsistent input data."""


class DegenerateInputError(DataError):
    """Geometrically degenerate input (zero extent, empty mesh, ...)."""


class DimensionMismatchError(DataError):
    """Operands with incompatible grid / image dimensions."""


class FormatError(DataError):
    """Malformed file content."""


class NonConvergenceError(VoxBodyError):
    """An iterative solve failed to converge."""
