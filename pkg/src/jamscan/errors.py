"""Exception taxonomy shared by all jamscan modules."""


class JamscanError(Exception):
    """Base class for all jamscan errors."""


class SpecificationError(JamscanError):
    """Waveform specification has an invalid field combination."""


class DomainError(JamscanError):
    """Numeric argument outside its valid domain."""


class InsufficientDataError(JamscanError):
    """Input block too short for the requested operation."""


class DegenerateGeometryError(JamscanError):
    """Geometry makes the requested computation undefined."""


class CalibrationError(JamscanError):
    """Threshold calibration is missing or impossible."""


class ConfigurationError(JamscanError):
    """Configuration parameter outside its valid range."""


class SequencingError(JamscanError):
    """Timestamps presented out of order."""


class FormatError(JamscanError):
    """File does not match the expected format identity."""


class CorruptionError(JamscanError):
    """File structure is damaged or truncated."""


class InputError(JamscanError):
    """Operation invoked with unusable input."""
