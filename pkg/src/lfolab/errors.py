"""Exception types shared across the library."""


class ParameterError(ValueError):
    """An argument is outside its documented domain."""


class FormatError(ValueError):
    """A file is malformed or does not match the expected layout."""


class DataError(RuntimeError):
    """Source material cannot satisfy a request (e.g. only silent audio)."""


class ValidityError(ValueError):
    """A modulation signal fails a structural precondition (e.g. no extrema)."""


class UndefinedMetricError(ValueError):
    """A metric is undefined for the given reference (e.g. all-zero ESR denominator)."""


class TrainingDivergenceError(RuntimeError):
    """A training step produced a non-finite loss."""
