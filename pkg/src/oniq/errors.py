"""Exception types shared across the package."""


class OniqError(Exception):
    """Base class for all package-specific errors."""


class ZeroVectorError(OniqError, ValueError):
    """Input vector has (numerically) zero norm and cannot be encoded."""


class TooManyFeaturesError(OniqError, ValueError):
    """More features than the register can hold (m > 2**n_qubits)."""


class QubitOutOfRangeError(OniqError, IndexError):
    """Qubit index >= n_qubits."""


class ControlEqualsTargetError(OniqError, ValueError):
    """CNOT control and target must differ."""


class ParamLengthMismatchError(OniqError, ValueError):
    """Parameter vector length does not match the ansatz spec."""


class QubitCountMismatchError(OniqError, ValueError):
    """State and ansatz spec disagree on qubit count."""


class InvalidRangeError(OniqError, ValueError):
    """Entangling offset outside 1..n_qubits-1."""


class ShapeMismatchError(OniqError, ValueError):
    """Array shapes do not chain."""


class MissingCacheError(OniqError, ValueError):
    """Backward called without the forward cache."""


class EmptyDatasetError(OniqError, ValueError):
    """Training requires at least one sample."""


class BadMagicError(OniqError, ValueError):
    """File does not start with the expected magic bytes."""


class VersionMismatchError(OniqError, ValueError):
    """File format version not supported."""


class TruncatedFileError(OniqError, ValueError):
    """File ends before the declared payload."""


class ShapeInconsistentError(OniqError, ValueError):
    """Declared and actual payload shapes disagree."""


class NonFiniteError(OniqError, ValueError):
    """Dataset writer refuses NaN or infinite values."""


class RegionNotCoveredError(OniqError, ValueError):
    """Grid does not cover the Nino3.4 box."""


class OverlappingRangesError(OniqError, ValueError):
    """Train and test year ranges intersect."""


class DegenerateSeriesError(OniqError, ValueError):
    """Series too short or with zero variance for a correlation."""


class LengthMismatchError(OniqError, ValueError):
    """Paired series have different lengths."""
