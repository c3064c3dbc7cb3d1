"""Exception types shared across the engine."""


class DimensionMismatchError(ValueError):
    """Operands have incompatible shapes (channels, grid size or resolution)."""


class EmptyMemoryError(RuntimeError):
    """A readout or normalization was requested against an empty memory."""


class MemoryDisabledError(RuntimeError):
    """A working-memory insertion was requested while the tier is disabled."""


class StalePredictionsError(RuntimeError):
    """Candidate suggestion requested before propagation refreshed predictions."""
