"""Exception and warning types raised across the package."""


class ScoreGraphError(Exception):
    """Base class for all errors raised by score_graphs."""


class MalformedFile(ScoreGraphError):
    pass


class UnsupportedFeature(ScoreGraphError):
    def __init__(self, element: str, message: str | None = None):
        self.element = element
        super().__init__(message or f"unsupported element <{element}>")


class EmptyInput(ScoreGraphError):
    pass


class TooFewEvents(ScoreGraphError):
    pass


class TooFewNodes(ScoreGraphError):
    pass


class NoEdges(ScoreGraphError):
    pass


class NotConverged(ScoreGraphError):
    def __init__(self, max_iterations: int):
        self.max_iterations = max_iterations
        super().__init__(f"power iteration did not converge in {max_iterations} iterations")


class DirectedUnsupported(ScoreGraphError):
    pass


class AllZero(ScoreGraphError):
    pass


class PartitionMismatch(ScoreGraphError):
    pass


class NodeNotFound(ScoreGraphError, KeyError):
    pass


class NoMeasures(ScoreGraphError):
    pass


class EmptySeries(ScoreGraphError):
    pass


class UnmatchedNoteOn(UserWarning):
    """A MIDI note-on had no matching note-off; the note was cut at track end."""


class DroppedElement(UserWarning):
    """A zero-duration element (e.g. grace note) was skipped."""
