"""Exception types shared across the package."""


class Td13Error(Exception):
    """Base class for all package errors."""


class MalformedLabel(Td13Error, ValueError):
    pass


class MalformedPath(Td13Error, ValueError):
    pass


class RootEdgeVertex(Td13Error, ValueError):
    """Raised for "0" and "01", which are never a v2/v3 corner."""


class NotAnEdge(Td13Error, ValueError):
    pass


class IncidenceContradiction(Td13Error):
    """A vertex/edge pair whose ratio is real but not an integer offset.

    Seeing this means the implementation is wrong, never bad sampling luck.
    """


class InputError(Td13Error, ValueError):
    """Problems with a user-supplied graph."""


class BadOrder(InputError):
    pass


class BadEdge(InputError):
    pass


class DuplicateEdge(InputError):
    pass


class CrossingChords(InputError):
    def __init__(self, first, second):
        super().__init__(f"chords {tuple(first)} and {tuple(second)} cross")
        self.first = tuple(first)
        self.second = tuple(second)


class TooSmall(InputError):
    pass


class BaseEdgeNotOnOuterFace(InputError):
    pass


class RetryBudgetExhausted(Td13Error):
    def __init__(self, message, failing_check=None, min_gap=None):
        super().__init__(message)
        self.failing_check = failing_check
        self.min_gap = min_gap


class UnexpectedLength(Td13Error):
    pass
