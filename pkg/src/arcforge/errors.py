"""Exception hierarchy shared by all arcforge modules."""


class ArcforgeError(Exception):
    """Base class; ``knot`` is filled in by the pipeline when known."""

    knot: str | None = None


class FormatError(ArcforgeError, ValueError):
    pass


class RealizationError(ArcforgeError):
    """No planar curve has the given Gauss/DT sequence."""


class NotPrimeError(ArcforgeError):
    pass


class NugatoryCrossingError(NotPrimeError):
    pass


class CompositeDiagramError(NotPrimeError):
    pass


class LinkNotSupported(FormatError):
    pass


class SearchError(ArcforgeError):
    pass


class SearchExhausted(SearchError):
    pass


class SearchBudgetExceeded(SearchError, TimeoutError):
    pass


class NoTargets(SearchError):
    pass


class WheelError(ArcforgeError):
    pass


class StringLoop(WheelError):
    pass


class DepthConflict(WheelError):
    pass


class PlacementConflict(WheelError):
    pass


class GridError(ArcforgeError, ValueError):
    pass


class InvalidSpokes(GridError):
    pass


class InvalidGrid(GridError):
    pass


class NotDestabilizable(GridError):
    pass


class TooLarge(ArcforgeError):
    pass
