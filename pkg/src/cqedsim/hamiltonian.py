"""Hamiltonian assembly as lists of (coefficient, rotation, operator) terms.

A term represents  coeff * e^{i rotation t} * O  with O a normal-ordered
ladder monomial b^dag^p b^q a^dag^r a^s; ``conjugate_pair`` marks that the
Hermitian conjugate is implied. Keeping analytic rotations (never sampled
matrices) makes evaluation exact at any t and turns rotating-frame
transforms into integer bookkeeping on the operator signature.

Builders:
  build_diag      drive-shifted diagonal
  build_h1        interactions from displacing the anharmonic/dispersive terms
  build_h2        counter-rotating drive corrections
  build_late_rwa  diag + h1 (+ h2): the effective model
  build_early_rwa diag + only the statically resonant h1 terms
  build_oracle    full time-dependent quartic + cosine drives (no RWA)
"""

import math
from dataclasses import dataclass, replace

import numpy as np

from . import displacement as disp
from .errors import FrameError
from .fockspace import monomial_band, monomial_matrix
from .units import to_mhz

# Rotations below this (rad/us) are treated as exactly zero. Physical
# rotations are >= 2*pi*kerr_c ~ 1e-2 rad/us; float cancellation noise in
# sums of tone detunings is ~1e-14.
ROTATION_EPS = 1e-9

MODE_ROTATING = "mode_rotating"
DRIVE_FRAME = "drive"


@dataclass(frozen=True)
class HamiltonianTerm:
    """coeff * e^{i rotation t} * monomial(signature) [+ h.c. if paired].

    Unpaired terms must be diagonal monomials (p == q, r == s) with a real
    static coefficient; paired terms may carry any signature, including a
    Hermitian one (multi-tone beat terms on b^dag b / a^dag a).
    """

    coeff: complex
    rotation: float
    signature: tuple
    conjugate_pair: bool = True


@dataclass(frozen=True)
class HamiltonianSpec:
    """Immutable term list over a fixed truncation, plus frame metadata."""

    terms: tuple
    hilbert: "HilbertSpec"
    frame: str = MODE_ROTATING
    metadata: dict = None

    @property
    def dim(self):
        return self.hilbert.dim

    def evaluate(self, t):
        """Dense Hermitian matrix at time t (rad/us units).

        Each paired term is symmetrized before accumulation, which keeps
        the result exactly Hermitian in floating point.
        """
        dim = self.dim
        out = np.zeros((dim, dim), dtype=complex)
        for term in self.terms:
            mat = monomial_matrix(term.signature, self.hilbert)
            w = term.coeff * np.exp(1j * term.rotation * t)
            if term.conjugate_pair:
                out += w * mat + np.conj(w) * mat.T
            else:
                out += w.real * mat
        return out

    def term_arrays(self):
        """Flatten to kernel arrays (coeffs, rotations, shifts, amps) with
        conjugate partners materialized as explicit rows."""
        dim = self.dim
        n_q, n_c = self.hilbert.n_q, self.hilbert.n_c
        rows = []
        for term in self.terms:
            amp, shift = monomial_band(term.signature, n_q, n_c)
            rows.append((complex(term.coeff), float(term.rotation), shift, amp))
            if term.conjugate_pair:
                p, q, r, s = term.signature
                amp_d, shift_d = monomial_band((q, p, s, r), n_q, n_c)
                rows.append((np.conj(complex(term.coeff)), -float(term.rotation),
                             shift_d, amp_d))
        k = max(len(rows), 1)
        coeffs = np.zeros(k, dtype=np.complex128)
        rots = np.zeros(k, dtype=np.float64)
        shifts = np.zeros(k, dtype=np.int64)
        amps = np.zeros((k, dim), dtype=np.float64)
        for i, (c, r, s, a) in enumerate(rows):
            coeffs[i], rots[i], shifts[i] = c, r, s
            amps[i] = a
        return coeffs, rots, shifts, amps

    def max_rotation(self):
        return max((abs(t.rotation) for t in self.terms), default=0.0)

    def is_static(self):
        return all(abs(t.rotation) <= ROTATION_EPS for t in self.terms)

    def dump_lines(self):
        """One line per term: coefficient (MHz, complex), rotation (MHz),
        normal-ordered operator signature."""
        lines = []
        for term in self.terms:
            c = term.coeff / (2.0 * math.pi)
            p, q, r, s = term.signature
            hc = "  +h.c." if term.conjugate_pair else ""
            lines.append(
                f"({c.real:+.9g}{c.imag:+.9g}j) MHz  "
                f"rot={to_mhz(term.rotation):+.9g} MHz  "
                f"b†{p} b{q} a†{r} a{s}{hc}"
            )
        return lines


def _term(coeff, rotation, signature, paired=True):
    return HamiltonianTerm(complex(coeff), float(rotation), tuple(signature), paired)


def _static(coeff, signature):
    p, q, r, s = signature
    assert p == q and r == s, "unpaired terms must be diagonal monomials"
    return HamiltonianTerm(complex(coeff), 0.0, tuple(signature), False)


def _phasors(components, conjugate=False):
    """XiComponents -> list of (amplitude, rotation) phasors."""
    if conjugate:
        return [(np.conj(c.amplitude), -c.rotation) for c in components]
    return [(c.amplitude, c.rotation) for c in components]


def _expand(*factor_lists):
    """Cartesian product of phasor lists: amplitudes multiply, rotations add."""
    combos = [(1.0 + 0.0j, 0.0)]
    for factors in factor_lists:
        combos = [(a * fa, r + fr) for (a, r) in combos for (fa, fr) in factors]
    return combos


def _emit(terms, scale, signature, *factor_lists):
    for amp, rot in _expand(*factor_lists):
        coeff = scale * amp
        if coeff != 0.0:
            terms.append(_term(coeff, rot, signature))


def build_diag(params, xi, hilbert):
    """Diagonal Hamiltonian with drive-induced shifts.

    delta_q = -2 alpha |xi_q1|^2 - chi |xi_c1|^2 and the cavity analogue;
    for multi-tone drives the static shifts use the time-averaged moduli
    and the cross-tone beats are emitted as separate rotating terms.
    """
    ang = params.ang
    q1 = _phasors(xi.components("qubit", disp.CO))
    c1 = _phasors(xi.components("cavity", disp.CO))
    q_abs2 = sum(abs(a) ** 2 for a, _ in q1)
    c_abs2 = sum(abs(a) ** 2 for a, _ in c1)

    terms = []
    delta_q = -2.0 * ang.alpha * q_abs2 - ang.chi * c_abs2
    delta_c = -2.0 * ang.kerr_c * c_abs2 - ang.chi * q_abs2
    if delta_q != 0.0:
        terms.append(_static(delta_q, (1, 1, 0, 0)))
    if delta_c != 0.0:
        terms.append(_static(delta_c, (0, 0, 1, 1)))
    terms.append(_static(-0.5 * ang.alpha, (2, 2, 0, 0)))
    if ang.kerr_c != 0.0:
        terms.append(_static(-0.5 * ang.kerr_c, (0, 0, 2, 2)))
    if ang.chi != 0.0:
        terms.append(_static(-ang.chi, (1, 1, 1, 1)))

    # Cross-tone beats of |xi|^2: one paired term per unordered tone pair.
    # |xi_q1|^2 feeds delta_q (x -2 alpha) and delta_c (x -chi); |xi_c1|^2
    # feeds delta_c (x -2 kerr_c) and delta_q (x -chi).
    beat_plan = (
        (q1, ((1, 1, 0, 0), -2.0 * ang.alpha), ((0, 0, 1, 1), -ang.chi)),
        (c1, ((0, 0, 1, 1), -2.0 * ang.kerr_c), ((1, 1, 0, 0), -ang.chi)),
    )
    for phasors, *targets in beat_plan:
        for n in range(len(phasors)):
            for m in range(n + 1, len(phasors)):
                beat = phasors[n][0] * np.conj(phasors[m][0])
                rot = phasors[n][1] - phasors[m][1]
                if beat == 0.0:
                    continue
                for sig, scale in targets:
                    if scale != 0.0:
                        terms.append(_term(scale * beat, rot, sig))

    return HamiltonianSpec(tuple(terms), hilbert, MODE_ROTATING,
                           {"params": params, "model": "diag"})


def build_h1(params, xi, hilbert):
    """Interaction terms from displacing the anharmonic and dispersive
    quartic terms (co-rotating displacement only). Ten operator families,
    each with its Hermitian conjugate implied; every tone combination
    becomes one term whose rotation is the sum of its xi rotations."""
    ang = params.ang
    q1 = _phasors(xi.components("qubit", disp.CO))
    q1c = _phasors(xi.components("qubit", disp.CO), conjugate=True)
    c1 = _phasors(xi.components("cavity", disp.CO))
    c1c = _phasors(xi.components("cavity", disp.CO), conjugate=True)

    terms = []
    _emit(terms, -0.5 * ang.alpha, (2, 0, 0, 0), q1, q1)
    _emit(terms, ang.alpha, (2, 1, 0, 0), q1)
    _emit(terms, -0.5 * ang.kerr_c, (0, 0, 2, 0), c1, c1)
    _emit(terms, ang.kerr_c, (0, 0, 2, 1), c1)
    _emit(terms, -ang.chi, (1, 0, 1, 0), q1, c1)
    _emit(terms, -ang.chi, (0, 1, 1, 0), q1c, c1)
    _emit(terms, ang.chi, (1, 1, 1, 0), c1)
    _emit(terms, ang.chi, (1, 0, 1, 1), q1)
    # cubic-in-xi linear drives left over after the cancellation
    _emit(terms, ang.alpha, (1, 0, 0, 0), q1, q1, q1c)
    _emit(terms, ang.chi, (1, 0, 0, 0), q1, c1, c1c)
    _emit(terms, ang.kerr_c, (0, 0, 1, 0), c1, c1, c1c)
    _emit(terms, ang.chi, (0, 0, 1, 0), c1, q1, q1c)
    return HamiltonianSpec(tuple(terms), hilbert, MODE_ROTATING,
                           {"params": params, "model": "h1"})


def build_h2(params, xi, hilbert):
    """Counter-rotating drive corrections: six operator families whose
    static-frame rotations at ~2*omega have been cancelled against the
    counter-rotating drive components, leaving the bookkept +/- Delta
    rotations of the xi_2 amplitudes."""
    ang = params.ang
    q2 = _phasors(xi.components("qubit", disp.COUNTER))
    q2c = _phasors(xi.components("qubit", disp.COUNTER), conjugate=True)
    c2c = _phasors(xi.components("cavity", disp.COUNTER), conjugate=True)

    terms = []
    _emit(terms, ang.alpha, (2, 1, 0, 0), q2c)
    _emit(terms, -ang.kerr_c, (0, 0, 2, 1), c2c)
    _emit(terms, -ang.chi / 6.0, (1, 0, 1, 0), q2c, c2c)
    _emit(terms, -ang.chi / 6.0, (0, 1, 1, 0), q2, c2c)
    _emit(terms, ang.chi / 6.0, (1, 1, 1, 0), c2c)
    _emit(terms, ang.chi / 6.0, (1, 0, 1, 1), q2c)
    return HamiltonianSpec(tuple(terms), hilbert, MODE_ROTATING,
                           {"params": params, "model": "h2"})


def build_late_rwa(params, tones, hilbert, include_h2=True):
    """Effective Hamiltonian in the mode-rotating frame: diag + h1 (+ h2).

    include_h2=False reproduces the model without the counter-rotating
    correction for side-by-side comparison."""
    xi = disp.build_xi_set(params, tones)
    terms = (build_diag(params, xi, hilbert).terms
             + build_h1(params, xi, hilbert).terms)
    if include_h2:
        terms = terms + build_h2(params, xi, hilbert).terms
    return HamiltonianSpec(terms, hilbert, MODE_ROTATING, {
        "params": params, "tones": tuple(tones),
        "model": "late" if include_h2 else "late_no_h2",
        "include_h2": include_h2,
    })


def build_early_rwa(params, tones, hilbert):
    """Conventional displaced-frame model: the RWA is applied immediately,
    keeping only terms that are exactly static under the given detunings
    (all counter-rotating corrections dropped)."""
    xi = disp.build_xi_set(params, tones)
    kept = tuple(
        t for t in (build_diag(params, xi, hilbert).terms
                    + build_h1(params, xi, hilbert).terms)
        if abs(t.rotation) <= ROTATION_EPS
    )
    return HamiltonianSpec(kept, hilbert, MODE_ROTATING, {
        "params": params, "tones": tuple(tones), "model": "early",
    })


# Normal-ordered content of (x + x^dag)^k, keeping only the operator-order-k
# monomials (the lower-order by-products renormalize the mode frequencies
# and are absorbed there): {order: [((n_raise, n_lower), multiplicity)]}.
_NORMAL_ORDERED = {
    0: (((0, 0), 1),),
    1: (((1, 0), 1), ((0, 1), 1)),
    2: (((2, 0), 1), ((0, 2), 1), ((1, 1), 2)),
    3: (((3, 0), 1), ((0, 3), 1), ((2, 1), 3), ((1, 2), 3)),
    4: (((4, 0), 1), ((0, 4), 1), ((3, 1), 4), ((1, 3), 4), ((2, 2), 6)),
}


def build_oracle(params, tones, hilbert):
    """Brute-force time-dependent Hamiltonian in the mode-rotating frame.

    Every normal-ordered quartic monomial of the expanded junction
    nonlinearity is retained with its exact rotation (no RWA), plus the
    full cosine drives (both frequency components). The quartic prefactors
    are closed per group against the measured constants:

        E_J phi_q^4        = 2 alpha
        E_J phi_c^4        = 2 K_c
        E_J phi_q^2 phi_c^2 = chi
        E_J phi_q^3 phi_c  = sqrt(2 alpha chi)   (geometric mean)
        E_J phi_q  phi_c^3 = sqrt(2 K_c chi)

    which reproduces each measured constant exactly rather than assuming a
    single consistent junction triple.
    """
    ang = params.ang
    group = {
        4: 2.0 * ang.alpha,
        3: math.sqrt(2.0 * ang.alpha * ang.chi),
        2: ang.chi,
        1: math.sqrt(2.0 * ang.kerr_c * ang.chi),
        0: 2.0 * ang.kerr_c,
    }
    terms = []
    for k in range(5):
        gk = group[k]
        if gk == 0.0:
            continue
        binom = math.comb(4, k)
        for (p, q), mult_q in _NORMAL_ORDERED[k]:
            for (r, s), mult_c in _NORMAL_ORDERED[4 - k]:
                key = (p - q, r - s)
                if key < (0, 0):
                    continue  # dagger of an emitted term
                coeff = -(gk / 24.0) * binom * mult_q * mult_c
                rotation = key[0] * ang.omega_q + key[1] * ang.omega_c
                sig = (p, q, r, s)
                if key == (0, 0):
                    terms.append(_static(coeff, sig))
                else:
                    terms.append(_term(coeff, rotation, sig))
    for tone in tones:
        t_ang = tone.ang
        sig = (1, 0, 0, 0) if tone.target == "qubit" else (0, 0, 1, 0)
        omega = ang.omega_q if tone.target == "qubit" else ang.omega_c
        half = 0.5 * t_ang.epsilon
        if half == 0.0:
            continue
        terms.append(_term(half * np.exp(-1j * t_ang.phase), -t_ang.detuning, sig))
        terms.append(_term(half * np.exp(1j * t_ang.phase),
                           2.0 * omega + t_ang.detuning, sig))
    return HamiltonianSpec(tuple(terms), hilbert, MODE_ROTATING, {
        "params": params, "tones": tuple(tones), "model": "oracle",
    })


def to_drive_frame(spec, delta_q, delta_c, require_static=False):
    """Shift into the frame rotating additionally at the drive detunings.

    Each term's rotation moves by (n_bdag - n_b) delta_q +
    (n_adag - n_a) delta_c (angular, rad/us), and -delta_q b^dag b -
    delta_c a^dag a is added. With one tone per mode and matching
    detunings the result is fully static; otherwise residual rotations
    remain and require_static raises FrameError.
    """
    if spec.frame != MODE_ROTATING:
        raise FrameError(f"spec already in frame {spec.frame!r}")
    shifted = []
    for term in spec.terms:
        p, q, r, s = term.signature
        rot = term.rotation + (p - q) * delta_q + (r - s) * delta_c
        if term.conjugate_pair:
            shifted.append(replace(term, rotation=rot))
        else:
            if abs(rot) > ROTATION_EPS:
                raise FrameError("frame transform made a diagonal term rotate")
            shifted.append(term)
    if delta_q != 0.0:
        shifted.append(_static(-delta_q, (1, 1, 0, 0)))
    if delta_c != 0.0:
        shifted.append(_static(-delta_c, (0, 0, 1, 1)))
    out = HamiltonianSpec(tuple(shifted), spec.hilbert, DRIVE_FRAME,
                          dict(spec.metadata or {}, delta_q=delta_q, delta_c=delta_c))
    if require_static and not out.is_static():
        worst = max((abs(t.rotation) for t in out.terms), default=0.0)
        raise FrameError(
            "drive-frame Hamiltonian is not static: residual rotation up to "
            f"{to_mhz(worst):.6g} MHz (multi-tone drives cannot be made static)")
    return out
