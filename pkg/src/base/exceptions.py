class DriftGasError(Exception):
    """Base class of every error raised by the driftgas package."""


class StreamError(DriftGasError, ValueError):
    """Invalid stream split, batching or class coverage."""


class DatasetError(DriftGasError, ValueError):
    """Malformed dataset file or invalid generator parameters."""


class GngError(DriftGasError, ValueError):
    """Invalid Growing Neural Gas parameters or input vectors."""


class RegistrationError(DriftGasError, ValueError):
    """Not enough correspondences to estimate a rigid transform."""
