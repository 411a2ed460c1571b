class ConfigurationError(ValueError):
    """Invalid or inconsistent run configuration."""


class AudioError(ValueError):
    """Base class for WAV decoding problems."""


class UnsupportedFormatError(AudioError):
    pass


class CorruptFileError(AudioError):
    pass


class AnnotationSchemaError(ValueError):
    """A visual annotation document does not follow the expected schema."""


class EvaluationError(ValueError):
    pass


class AnnotationValidationError(ValueError):
    """Annotation geometry or ordering is inconsistent."""
