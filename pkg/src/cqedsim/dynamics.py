"""Time evolution: closed-system Schrodinger propagation, Lindblad
propagation with the displaced dephasing dissipator, and the phase-slope
frequency estimator used as the brute-force Stark-shift oracle.

Hamiltonian coefficients are evaluated analytically from the term
rotations at every stage time; there is no precomputed time grid and no
interpolation error. One integration is single-threaded and
deterministic: identical inputs and tolerances give bit-identical
trajectories on one platform (within one kernel backend).
"""

import math
import warnings
from dataclasses import dataclass

import numpy as np

from . import displacement as disp
from ._kernels import backend_name, get_impl
from .errors import (
    DimensionError,
    LowOverlapError,
    PhaseUnwrapError,
    PositivityWarning,
    StepSizeUnderflowError,
    ToleranceError,
)
from .fockspace import basis_state, build_mode_ops
from .model import SolverOptions
from .units import TWO_PI

RTOL_RANGE = (1e-12, 1e-6)

# Cap the raw step at a quarter of the fastest rotation period so the
# error estimator never aliases over an oscillation it has not sampled.
ALIAS_STEP_FRACTION = 0.25


@dataclass(frozen=True)
class Trajectory:
    """Propagation output: sample times, states, solver statistics."""

    times: np.ndarray
    states: np.ndarray
    stats: dict


@dataclass(frozen=True)
class PhaseSlopeEstimate:
    """Transition frequency from unwrapped-phase slopes (MHz) and the
    worst rms fit residual (radians)."""

    frequency: float
    residual: float


def _check_options(options):
    options = options or SolverOptions()
    if not RTOL_RANGE[0] <= options.rtol <= RTOL_RANGE[1]:
        raise ToleranceError(
            f"rtol={options.rtol:g} outside supported range {RTOL_RANGE}")
    if options.atol <= 0:
        raise ToleranceError("atol must be positive")
    return options


def _effective_max_step(spec, options, max_step_us):
    steps = [options.max_step_us]
    if max_step_us is not None:
        steps.append(float(max_step_us))
    fastest = spec.max_rotation()
    if fastest > 0.0:
        steps.append(ALIAS_STEP_FRACTION * TWO_PI / fastest)
    return min(steps)


def _check_grid(t_grid):
    t_grid = np.asarray(t_grid, dtype=float)
    if t_grid.ndim != 1 or len(t_grid) < 1:
        raise ValueError("t_grid must be a non-empty 1-d array of times")
    if len(t_grid) > 1 and not np.all(np.diff(t_grid) > 0):
        raise ValueError("t_grid must be strictly increasing")
    return t_grid


def propagate_schrodinger(spec, psi0, t_grid, options=None, max_step_us=None):
    """Integrate -i H(t) psi over t_grid (us); dense output at the grid.

    The adaptive step never crosses a grid point, so every reported state
    is computed at exactly the requested time.
    """
    options = _check_options(options)
    t_grid = _check_grid(t_grid)
    psi0 = np.asarray(psi0, dtype=complex)
    if psi0.shape != (spec.dim,):
        raise DimensionError(
            f"psi0 has shape {psi0.shape}, expected ({spec.dim},)")
    norm = np.linalg.norm(psi0)
    if abs(norm - 1.0) > 1e-8:
        raise ValueError(f"psi0 is not normalized (norm = {norm:.3e})")

    coeffs, rots, shifts, amps = spec.term_arrays()
    impl = get_impl()
    states, nsteps, nrejected, status, t_reached = impl.propagate_schrodinger(
        coeffs, rots, shifts, amps, psi0, t_grid,
        options.rtol, options.atol, _effective_max_step(spec, options, max_step_us))
    if status != 0:
        raise StepSizeUnderflowError(t_reached)
    norms = np.linalg.norm(states, axis=1)
    stats = {
        "steps": int(nsteps),
        "rejected": int(nrejected),
        "norm_drift": float(np.max(np.abs(norms - 1.0))),
        "backend": backend_name(),
    }
    return Trajectory(times=t_grid, states=states, stats=stats)


def _dephasing_phasors(xi):
    """Qubit displacement phasors entering the displaced dephasing
    dissipator (b^dag - xi_q*)(b - xi_q), with the bookkept rotations."""
    comps = ()
    if xi is not None:
        comps = xi.components("qubit", disp.CO) + xi.components("qubit", disp.COUNTER)
    if not comps:
        return np.zeros(1, dtype=np.complex128), np.zeros(1, dtype=np.float64)
    amps = np.array([c.amplitude for c in comps], dtype=np.complex128)
    rots = np.array([c.rotation for c in comps], dtype=np.float64)
    return amps, rots


def propagate_lindblad(spec, rho0, t_grid, options=None, params=None, xi=None):
    """Integrate the Lindblad master equation with dissipators
    kappa_c D[a] + kappa_q D[b] + kappa_d D[(b^dag - xi_q*)(b - xi_q)].

    params defaults to the system stored in spec.metadata; xi (the
    displacement set, for the dephasing operator) defaults to the one
    rebuilt from the stored tones. The density matrix is symmetrized
    after every accepted step.
    """
    options = _check_options(options)
    t_grid = _check_grid(t_grid)
    metadata = spec.metadata or {}
    if params is None:
        params = metadata.get("params")
    if params is None:
        raise ValueError("params not given and not present in spec.metadata")
    if xi is None and metadata.get("tones"):
        xi = disp.build_xi_set(params, metadata["tones"])

    rho0 = np.asarray(rho0, dtype=complex)
    if rho0.shape != (spec.dim, spec.dim):
        raise DimensionError(
            f"rho0 has shape {rho0.shape}, expected ({spec.dim}, {spec.dim})")
    if np.max(np.abs(rho0 - rho0.conj().T)) > 1e-8:
        raise ValueError("rho0 is not Hermitian")
    if abs(np.trace(rho0).real - 1.0) > 1e-8:
        raise ValueError("rho0 does not have unit trace")
    if np.linalg.eigvalsh(rho0).min() < -1e-8:
        raise ValueError("rho0 has a significantly negative eigenvalue")

    ang = params.ang
    ops = build_mode_ops(spec.hilbert)
    l_ops = []
    l_rates = []
    if ang.kappa_c > 0:
        l_ops.append(ops.a)
        l_rates.append(ang.kappa_c)
    if ang.kappa_q > 0:
        l_ops.append(ops.b)
        l_rates.append(ang.kappa_q)
    dim = spec.dim
    l_ops_arr = (np.stack(l_ops).astype(np.complex128) if l_ops
                 else np.zeros((0, dim, dim), dtype=np.complex128))
    l_rates_arr = np.asarray(l_rates, dtype=np.float64)
    deph_amps, deph_rots = _dephasing_phasors(xi)

    coeffs, rots, shifts, amps = spec.term_arrays()
    impl = get_impl()
    states, nsteps, nrejected, status, t_reached = impl.propagate_lindblad(
        coeffs, rots, shifts, amps, rho0, t_grid,
        options.rtol, options.atol,
        _effective_max_step(spec, options, None),
        l_ops_arr, l_rates_arr, float(ang.kappa_d), deph_amps, deph_rots,
        ops.n_q_op.astype(np.complex128), ops.b.astype(np.complex128))
    if status != 0:
        raise StepSizeUnderflowError(t_reached)

    traces = np.einsum("tii->t", states).real
    min_eig = min(float(np.linalg.eigvalsh(s).min()) for s in states)
    if min_eig < -1e-6:
        warnings.warn(
            f"density matrix reached min eigenvalue {min_eig:.3e}",
            PositivityWarning, stacklevel=2)
    stats = {
        "steps": int(nsteps),
        "rejected": int(nrejected),
        "trace_drift": float(np.max(np.abs(traces - 1.0))),
        "min_eig": min_eig,
        "backend": backend_name(),
    }
    return Trajectory(times=t_grid, states=states, stats=stats)


def undisplace_state(psi, xi, t, hilbert):
    """Map a displaced-frame state back to the mode-rotating frame:
    psi_lab = D_q[xi_q(t)] D_c[xi_c(t)] psi.

    Populations are reported in the displaced frame by default (the
    displacement stays small, |xi| <~ 0.2, for all stock experiments);
    this optional correction applies the displacement unitary built from
    the bookkept xi phasors at time t.
    """
    ops = build_mode_ops(hilbert)
    out = np.asarray(psi, dtype=complex)
    for mode, lower in (("qubit", ops.b), ("cavity", ops.a)):
        amp = (disp.xi_value(xi, mode, disp.CO, t)
               + disp.xi_value(xi, mode, disp.COUNTER, t))
        if amp == 0.0:
            continue
        generator = amp * lower.conj().T - np.conj(amp) * lower
        evals, vecs = np.linalg.eigh(1j * generator)
        unitary = (vecs * np.exp(-1j * evals)) @ vecs.conj().T
        out = unitary @ out
    return out


def _unwrap_phase(overlaps, label):
    mags = np.abs(overlaps)
    if np.min(mags) < 0.1:
        raise LowOverlapError(
            f"|<{label}|psi>| dropped to {np.min(mags):.3f} (< 0.1); "
            "phase tracking unreliable")
    ratios = overlaps[1:] / overlaps[:-1]
    jumps = np.angle(ratios)
    worst = float(np.max(np.abs(jumps))) if len(jumps) else 0.0
    if worst > 0.5 * math.pi:
        raise PhaseUnwrapError(
            f"phase jump of {worst:.3f} rad between samples (> pi/2); "
            "decrease the sample spacing")
    phase = np.empty(len(overlaps))
    phase[0] = np.angle(overlaps[0])
    phase[1:] = phase[0] + np.cumsum(jumps)
    return phase


def phase_slope_frequency(spec, label_a, label_b, duration, dt_max,
                          options=None, n_samples=2001):
    """Transition frequency (MHz) between two bare labels via phase slopes.

    Propagates both bare basis states under spec (which may contain fast
    rotations up to ~2 omega; dt_max must resolve the fastest one),
    unwraps arg<label|psi(t)>, and fits the slope over the final 80% of
    the window. Returns (slope_a - slope_b)/2pi, i.e. E_b - E_a in MHz.
    """
    options = _check_options(options)
    t_grid = np.linspace(0.0, float(duration), int(n_samples))
    slopes = []
    residual = 0.0
    for label in (label_a, label_b):
        psi0 = basis_state(spec.hilbert, label)
        traj = propagate_schrodinger(spec, psi0, t_grid, options=options,
                                     max_step_us=dt_max)
        idx = np.nonzero(psi0)[0][0]
        overlaps = traj.states[:, idx]
        phase = _unwrap_phase(overlaps, label)
        start = int(0.2 * len(t_grid))
        coeffs = np.polyfit(t_grid[start:], phase[start:], 1)
        fit = np.polyval(coeffs, t_grid[start:])
        residual = max(residual, float(np.sqrt(np.mean((phase[start:] - fit) ** 2))))
        slopes.append(coeffs[0])
    return PhaseSlopeEstimate(
        frequency=(slopes[0] - slopes[1]) / TWO_PI,
        residual=residual,
    )
