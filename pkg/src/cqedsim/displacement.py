"""Time-dependent displacement amplitudes that cancel the linear drives.

Each tone contributes a co-rotating and a counter-rotating component:

    xi_co(t)      = eps e^{-i theta} / (-2 Delta - i kappa) * e^{-i Delta t}
    xi_counter(t) = eps e^{+i theta} / (4 omega + 2 Delta - i kappa) * e^{+i Delta t}

(all angular, rad/us). The explicit e^{i 2 omega t} factor that multiplies
the counter-rotating component is never materialized here: the RWA in the
Hamiltonian builders has already paired it against counter-rotating
operator phases, so only the residual e^{+/- i Delta t} rotations are
tracked. The full phase is restored locally where it is physically needed
(the drive-cancellation residual).
"""

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateDriveError

CO = "co"
COUNTER = "counter"

# |denominator| < DEGENERATE_FACTOR * eps marks a non-displaceable drive.
DEGENERATE_FACTOR = 1e-6


@dataclass(frozen=True)
class XiComponent:
    """One displacement phasor: amplitude * e^{i rotation t} (dimensionless
    amplitude, rotation in rad/us)."""

    amplitude: complex
    rotation: float
    family: str  # CO | COUNTER
    target: str  # "qubit" | "cavity"


@dataclass(frozen=True)
class XiSet:
    """Per-mode co-/counter-rotating displacement components, one pair per
    tone, in tone order."""

    qubit_co: tuple = ()
    qubit_counter: tuple = ()
    cavity_co: tuple = ()
    cavity_counter: tuple = ()

    def components(self, mode, family):
        key = ("qubit" if mode == "qubit" else "cavity") + "_" + family
        return getattr(self, key)

    @property
    def n_qubit_tones(self):
        return len(self.qubit_co)

    @property
    def n_cavity_tones(self):
        return len(self.cavity_co)


def xi_components(tone, mode_freq, kappa):
    """Co-/counter-rotating displacement components for one tone.

    tone is a validated DriveTone; mode_freq and kappa are angular
    (rad/us). Raises DegenerateDriveError when the co-rotating denominator
    vanishes relative to the drive (resonant drive, no damping).
    """
    ang = tone.ang
    eps, delta, theta = ang.epsilon, ang.detuning, ang.phase
    if eps == 0.0:
        zero_co = XiComponent(0.0 + 0.0j, -delta, CO, tone.target)
        zero_ct = XiComponent(0.0 + 0.0j, +delta, COUNTER, tone.target)
        return zero_co, zero_ct
    den_co = -2.0 * delta - 1j * kappa
    if abs(den_co) < DEGENERATE_FACTOR * eps:
        raise DegenerateDriveError(
            f"drive on {tone.target} at detuning {tone.detuning} MHz is too "
            "close to resonance to displace (|2*Delta + i*kappa| ~ 0)")
    den_ct = 4.0 * mode_freq + 2.0 * delta - 1j * kappa
    co = XiComponent(eps * np.exp(-1j * theta) / den_co, -delta, CO, tone.target)
    counter = XiComponent(eps * np.exp(1j * theta) / den_ct, +delta, COUNTER, tone.target)
    return co, counter


def build_xi_set(params, tones):
    """Displacement components for every tone, grouped by mode and family."""
    ang = params.ang
    qubit_co, qubit_counter, cavity_co, cavity_counter = [], [], [], []
    for tone in tones:
        if tone.target == "qubit":
            co, ct = xi_components(tone, ang.omega_q, ang.kappa_q)
            qubit_co.append(co)
            qubit_counter.append(ct)
        else:
            co, ct = xi_components(tone, ang.omega_c, ang.kappa_c)
            cavity_co.append(co)
            cavity_counter.append(ct)
    return XiSet(
        qubit_co=tuple(qubit_co),
        qubit_counter=tuple(qubit_counter),
        cavity_co=tuple(cavity_co),
        cavity_counter=tuple(cavity_counter),
    )


def xi_value(xi_set, mode, family, t):
    """Sum of the phasors of one family at time t (bookkept rotations)."""
    return sum(
        (c.amplitude * np.exp(1j * c.rotation * t) for c in xi_set.components(mode, family)),
        start=0.0 + 0.0j,
    )


def _mode_quantities(params, tones, mode):
    ang = params.ang
    if mode == "qubit":
        return ang.omega_q, ang.kappa_q, [t for t in tones if t.target == "qubit"]
    return ang.omega_c, ang.kappa_c, [t for t in tones if t.target == "cavity"]


def drive_cancellation_residual(xi_set, tones, params, t):
    """Defect of the drive-cancellation condition at time t.

    Substitutes the displacement (with its full counter-rotating phase
    restored) into the creation-operator coefficient it is meant to null,

        2 * [ i dxi/dt + i (kappa/2) xi ] + sum_n eps_n (e^{-i(Delta_n t + theta_n)}
              + e^{+i((2 omega + Delta_n) t + theta_n)}),

    and returns the max-norm over the two modes. The overall factor of two
    normalizes the residual so that an amplitude error d on one component
    produces a residual |2 Delta + i kappa| * d. Exact components give 0
    up to roundoff; this is a diagnostic, not an error path.
    """
    worst = 0.0
    for mode in ("qubit", "cavity"):
        omega, kappa, mode_tones = _mode_quantities(params, tones, mode)
        cos_comps = xi_set.components(mode, CO)
        ctr_comps = xi_set.components(mode, COUNTER)
        total = 0.0 + 0.0j
        for tone, co, ct in zip(mode_tones, cos_comps, ctr_comps):
            ang = tone.ang
            # co component: xi = A e^{-i Delta t}
            phase_co = np.exp(1j * co.rotation * t)
            xi_co = co.amplitude * phase_co
            dxi_co = 1j * co.rotation * xi_co
            # counter component with the 2*omega phase restored:
            # xi = A e^{+i Delta t} e^{i 2 omega t}
            full_rot = ct.rotation + 2.0 * omega
            xi_ct = ct.amplitude * np.exp(1j * full_rot * t)
            dxi_ct = 1j * full_rot * xi_ct
            drive = ang.epsilon * (
                np.exp(-1j * (ang.detuning * t + ang.phase))
                + np.exp(1j * ((2.0 * omega + ang.detuning) * t + ang.phase))
            )
            total += 2.0 * (1j * (dxi_co + dxi_ct) + 1j * (kappa / 2.0) * (xi_co + xi_ct)) + drive
        worst = max(worst, abs(total))
    return worst
