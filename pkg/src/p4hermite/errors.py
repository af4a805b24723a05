"""Exception types raised across the package."""


class P4Error(Exception):
    """Base class for computational failures (CLI exit code 1)."""


class DomainError(P4Error, ValueError):
    pass


class InexactDivision(P4Error, ArithmeticError):
    pass


class Overflow(P4Error, OverflowError):
    pass


class NearPole(P4Error):
    pass


class DegenerateDeterminant(P4Error):
    pass


class NoConvergence(P4Error):
    def __init__(self, message, worst_residual=None):
        super().__init__(message)
        self.worst_residual = worst_residual


class NoValidRoot(P4Error):
    pass


class OnBranchCut(P4Error):
    pass


class TrackingLoss(P4Error):
    pass


class MomentViolation(P4Error):
    pass


class SingularPoint(P4Error):
    pass


class BranchMismatch(P4Error):
    pass


class NoCrossing(P4Error):
    def __init__(self, message, theta=None):
        super().__init__(message)
        self.theta = theta


class TraceDiverged(P4Error):
    pass
