"""Exception hierarchy shared by every module of the package."""


class LeechError(Exception):
    """Base class for all errors raised by this package."""


class NotPSD(LeechError, ValueError):
    pass


class NotHermitian(LeechError, ValueError):
    pass


class SingularResolvent(LeechError, ArithmeticError):
    """``I - zA`` is singular at the requested point."""


class UnstableA(LeechError, ValueError):
    """The state matrix has an eigenvalue on or outside the unit circle."""


class NoStabilizingSolution(LeechError, ArithmeticError):
    """The Riccati iteration did not reach a stabilizing solution."""


class NotStabilizing(LeechError, ValueError):
    """A supplied Riccati solution fails one of the stabilizing conditions."""


class DegenerateKernel(LeechError, ArithmeticError):
    pass


class NotSolvable(LeechError):
    """The positivity condition ``T_G T_G^* - T_K T_K^* >= 0`` fails.

    Attributes
    ----------
    margin : float
        The (negative) smallest eigenvalue that decided the verdict.
    """

    def __init__(self, message, margin=float("nan"), diagnostics=None):
        super().__init__(message)
        self.margin = margin
        self.diagnostics = diagnostics or {}


class SemidefiniteUnsupported(LeechError):
    """``R`` is nonnegative on the circle but neither strictly positive nor zero."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class PointOnBoundary(LeechError, ValueError):
    pass


class SectionNotPositive(LeechError, ArithmeticError):
    pass


class OracleInconsistency(LeechError, AssertionError):
    """Two independent assembly routes of the same operator section disagree."""
