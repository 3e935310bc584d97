"""Exception types shared across the toolkit."""


class ConverterSimError(Exception):
    """Base class for all toolkit errors."""


class ConfigError(ConverterSimError):
    """Scenario config is malformed or violates a type invariant."""


class SimError(ConverterSimError):
    """A runtime guard tripped during simulation."""

    def __init__(self, message, t=None):
        if t is not None:
            message = f"{message} (t={t:.6g} s)"
        super().__init__(message)
        self.t = t


class DivisionGuard(SimError):
    """x2 dropped below its floor; the plant left the valid operating region."""


class SingularDenominator(SimError):
    """|x2 - L1*kappa5*x1/C1| below floor; gain condition violated."""


class InfeasibleGains(SimError):
    """The kappa5 magnitude and branch bounds cannot be met simultaneously."""


class NonFinite(SimError):
    """A state component became non-finite during integration."""


class TooCoarse(ConverterSimError):
    """Trajectory sampling is too coarse for a finite-difference analysis."""
