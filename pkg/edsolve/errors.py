class EdsError(Exception):
    """Base class for every error raised by edsolve."""
