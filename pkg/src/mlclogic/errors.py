"""Exception types shared across the package."""


class MlcLogicError(Exception):
    """Base class for all package errors."""


class ConfigError(MlcLogicError):
    """Invalid parameter, configuration value, or input file."""


class DivergedError(MlcLogicError):
    """State left the admissible region during integration.

    Only x1 and x2 are checked against the divergence bound. The phase
    variable z grows without bound by construction and is exempt.
    """

    def __init__(self, t: float, x1: float, x2: float, bound: float):
        self.t = t
        self.x1 = x1
        self.x2 = x2
        self.bound = bound
        super().__init__(
            f"state diverged at t={t:.6g}: |x1|={abs(x1):.3g}, "
            f"|x2|={abs(x2):.3g} exceeds bound {bound:.3g}"
        )


class ForbiddenInputError(MlcLogicError):
    """A set-reset latch was driven with the forbidden (1,1) input pair."""


class ArityMismatchError(MlcLogicError):
    """Number of input channels does not match what the gate expects."""


class EmptySegmentError(MlcLogicError):
    """A decode window contained no samples after settle trimming."""
