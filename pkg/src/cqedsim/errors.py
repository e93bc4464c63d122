"""Exception and warning types shared across the package."""


class CqedsimError(Exception):
    """Base class for all package errors."""


class ValidationError(CqedsimError):
    """A physical parameter violates an invariant.

    ``field`` names the offending field; no partial acceptance.
    """

    def __init__(self, field, message=None):
        self.field = field
        super().__init__(message or f"invalid value for field '{field}'")


class ParseError(CqedsimError):
    """Config text does not conform to the documented schema."""

    def __init__(self, message, field=None, line=None):
        self.field = field
        self.line = line
        where = []
        if field is not None:
            where.append(f"field '{field}'")
        if line is not None:
            where.append(f"line {line}")
        suffix = f" ({', '.join(where)})" if where else ""
        super().__init__(message + suffix)


class DimensionError(CqedsimError):
    """Operator/state dimensions are inconsistent or exceed the memory cap."""


class DegenerateDriveError(CqedsimError):
    """Resonant drive with no damping: the displacement amplitude diverges."""


class FrameError(CqedsimError):
    """A rotating-frame transform left residual time dependence where a
    static Hamiltonian was requested."""


class NotHermitianError(CqedsimError):
    """Operator handed to the Hermitian eigensolver is not Hermitian."""


class StepSizeUnderflowError(CqedsimError):
    """Adaptive integrator could not meet the tolerance at any step size."""

    def __init__(self, t_reached, message=None):
        self.t_reached = t_reached
        super().__init__(
            message or f"step size underflow at t = {t_reached:.6g} us"
        )


class ToleranceError(CqedsimError):
    """Requested solver tolerances are outside the supported range."""


class PhaseUnwrapError(CqedsimError):
    """Successive phase samples jump by more than pi/2; sampling too coarse."""


class LowOverlapError(CqedsimError):
    """Tracked basis-state overlap fell below the usable threshold."""


class CalibrationError(CqedsimError):
    """Calibration scan has no signal to optimize."""


class AmbiguousTrackingWarning(UserWarning):
    """Best dressed-state overlap**2 is below 0.5; mapping still returned."""


class PositivityWarning(UserWarning):
    """Density matrix developed a negative eigenvalue beyond tolerance."""


class DispersiveRegimeWarning(UserWarning):
    """chi >= alpha: outside the dispersive regime the model assumes."""
