"""Exception types raised across the package."""


class SchreierLabError(Exception):
    """Base class for all package errors."""


class UnsupportedDims(SchreierLabError):
    pass


class NonRegularInput(SchreierLabError):
    pass


class WrongKind(SchreierLabError):
    pass


class MissingFaceChoice(SchreierLabError):
    pass


class FaceDataMissing(SchreierLabError):
    pass


class EmptySet(SchreierLabError):
    pass


class ZeroAlternatives(SchreierLabError):
    pass


class TrialRejected(SchreierLabError):
    """A randomized trial failed in a way that a fresh retry can fix."""


class WrappingCluster(TrialRejected):
    pass


class AmbiguousParent(TrialRejected):
    pass


class WrappingMonochromeCycle(TrialRejected):
    pass


class NoIndependentSet(TrialRejected):
    pass


class InvalidOutput(TrialRejected):
    """A pipeline produced an output that its own post-check rejected."""


class InsufficientCoarsening(SchreierLabError):
    pass


class InsufficientSpacing(SchreierLabError):
    pass


class WindowTooSmall(SchreierLabError):
    pass


class NonCycleComponent(SchreierLabError):
    pass


class ResidualDecompositionFailed(SchreierLabError):
    pass


class OddCycle(SchreierLabError):
    pass


class IncompleteColouring(SchreierLabError):
    pass


class InvalidSourceDecoration(SchreierLabError):
    pass


class OddD(SchreierLabError):
    pass


class NotBalanced(SchreierLabError):
    pass


class TooLarge(SchreierLabError):
    pass


class NonPlanarKind(SchreierLabError):
    pass


class RetriesExhausted(SchreierLabError):
    pass
