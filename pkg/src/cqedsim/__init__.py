"""Simulator for a multi-tone-driven transmon-cavity system.

Builds displaced-frame effective Hamiltonians (with and without
counter-rotating drive corrections), a brute-force time-dependent
reference Hamiltonian, and the spectra / dynamics machinery needed to
reproduce ac-Stark-shift, two-mode-squeezing and beam-splitting
experiments.

Unit conventions
----------------
Config-facing frequencies and rates are ordinary frequencies in MHz.
Internally everything is angular (rad/us); time is in microseconds.
Tensor ordering is qubit-major: full index = i_q * n_c + i_c.
"""

__version__ = "0.1.0"

from .errors import (
    AmbiguousTrackingWarning,
    CalibrationError,
    DegenerateDriveError,
    DimensionError,
    FrameError,
    NotHermitianError,
    ParseError,
    PhaseUnwrapError,
    StepSizeUnderflowError,
    ToleranceError,
    ValidationError,
)
from .model import (
    DriveTone,
    ExperimentConfig,
    HilbertSpec,
    SolverOptions,
    SystemParams,
    load_config,
    serialize_config,
    validate_params,
)

__all__ = [
    "AmbiguousTrackingWarning",
    "CalibrationError",
    "DegenerateDriveError",
    "DimensionError",
    "DriveTone",
    "ExperimentConfig",
    "FrameError",
    "HilbertSpec",
    "NotHermitianError",
    "ParseError",
    "PhaseUnwrapError",
    "SolverOptions",
    "StepSizeUnderflowError",
    "SystemParams",
    "ToleranceError",
    "ValidationError",
    "load_config",
    "serialize_config",
    "validate_params",
]
