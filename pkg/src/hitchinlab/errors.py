class NumericalError(RuntimeError):
    """A solver failed to converge or produced an invalid state."""
