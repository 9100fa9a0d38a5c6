"""Exception types shared across the package."""


class FoldcohError(Exception):
    pass


class ParameterError(FoldcohError, ValueError):
    """Construction or pipeline parameters violate their invariants."""


class DimensionError(FoldcohError, ValueError):
    """A coordinate tuple does not match the rank of its degree."""


class ShapeError(FoldcohError, ValueError):
    pass


class SurgeryError(FoldcohError, ValueError):
    """An ATSS precondition failed; the message names the violated relation."""
