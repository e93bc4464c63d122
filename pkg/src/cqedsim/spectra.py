"""Hermitian eigenanalysis and ac-Stark-shift extraction.

Shifts are always differences of transition energies between the driven
and undriven spectra evaluated in the same frame, so the frame terms and
any constant offsets cancel. Dressed states are identified by maximum
overlap against a reference basis; along sweeps the reference is the
previous point's eigenvectors (adiabatic continuation), which is what
makes tracking survive the avoided crossing near Delta_q ~ -alpha.
"""

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import AmbiguousTrackingWarning, NotHermitianError, ValidationError
from .fockspace import basis_state, hermiticity_defect
from .hamiltonian import build_early_rwa, build_late_rwa, to_drive_frame
from .units import to_mhz

HERMITICITY_TOL = 1e-10
AMBIGUOUS_OVERLAP = 0.5

STARK_LABELS = ("g0", "e0", "g1")

MODELS = ("late", "late_no_h2", "early")


@dataclass(frozen=True)
class SpectrumResult:
    """Ascending eigenvalues (rad/us), orthonormal eigenvector columns,
    and (after tracking) the label -> column mapping with overlap
    confidences."""

    eigenvalues: np.ndarray
    eigenvectors: np.ndarray
    labels: dict = None
    confidences: dict = None


def eig_herm(h, defect_tol=HERMITICITY_TOL):
    """Eigendecomposition of a Hermitian matrix (ascending eigenvalues)."""
    defect = hermiticity_defect(h)
    if defect > defect_tol:
        raise NotHermitianError(
            f"hermiticity defect {defect:.3e} exceeds {defect_tol:.1e}")
    eigenvalues, eigenvectors = np.linalg.eigh(h)
    return SpectrumResult(eigenvalues=eigenvalues, eigenvectors=eigenvectors)


def track_dressed(spectrum, references, warn_ambiguous=True):
    """Map each reference label to the eigenvector of maximum |overlap|^2.

    references: {label: reference vector} (bare basis states, or the
    previous sweep point's dressed vectors for adiabatic continuation).
    The mapping is made injective by assigning labels in order of their
    best overlap; exact ties resolve toward the smaller eigenvalue.
    Returns a SpectrumResult with labels and confidences filled in; if
    the best available overlap^2 falls below 0.5 an
    AmbiguousTrackingWarning is issued (mapping still returned).
    """
    vecs = spectrum.eigenvectors
    overlaps = {
        label: np.abs(ref.conj() @ vecs) ** 2 for label, ref in references.items()
    }
    # Greedy injective assignment, strongest claims first. argmax breaks
    # exact ties toward the first (smallest-eigenvalue) column.
    order = sorted(references, key=lambda lab: -np.max(overlaps[lab]))
    taken = set()
    labels = {}
    confidences = {}
    for label in order:
        weights = overlaps[label].copy()
        weights[list(taken)] = -1.0
        idx = int(np.argmax(weights))
        labels[label] = idx
        confidences[label] = float(overlaps[label][idx])
        taken.add(idx)
        if warn_ambiguous and confidences[label] < AMBIGUOUS_OVERLAP:
            warnings.warn(
                f"tracking {label!r}: best overlap^2 = "
                f"{confidences[label]:.3f} < {AMBIGUOUS_OVERLAP}",
                AmbiguousTrackingWarning, stacklevel=2)
    return SpectrumResult(
        eigenvalues=spectrum.eigenvalues,
        eigenvectors=spectrum.eigenvectors,
        labels=labels,
        confidences=confidences,
    )


@dataclass(frozen=True)
class StarkShiftResult:
    """Drive-induced transition shifts in MHz, with tracking diagnostics.

    qubit_shift  : shift of g0 -> e0
    cavity_shift : shift of g0 -> g1
    confidence   : label -> |<bare|dressed>|^2 for the driven spectrum
    tracking     : label -> overlap^2 against the tracking reference
    vectors      : label -> dressed eigenvector (for sweep continuation)
    """

    qubit_shift: float
    cavity_shift: float
    confidence: dict
    tracking: dict
    vectors: dict


def _build_model(params, tones, hilbert, model):
    if model == "late":
        return build_late_rwa(params, tones, hilbert, include_h2=True)
    if model == "late_no_h2":
        return build_late_rwa(params, tones, hilbert, include_h2=False)
    if model == "early":
        return build_early_rwa(params, tones, hilbert)
    raise ValidationError("model", f"unknown model {model!r}; expected one of {MODELS}")


def _tone_detunings(tones):
    """Angular (delta_q, delta_c) for at most one tone per mode."""
    delta_q = 0.0
    delta_c = 0.0
    seen = set()
    for tone in tones:
        if tone.target in seen:
            raise ValidationError(
                "drives", "stark_shift needs at most one tone per mode "
                "(static drive-frame requirement)")
        seen.add(tone.target)
        if tone.target == "qubit":
            delta_q = tone.ang.detuning
        else:
            delta_c = tone.ang.detuning
    return delta_q, delta_c


def _labelled_energies(spec_static, hilbert, references, bare_refs,
                       warn_ambiguous=True):
    spectrum = eig_herm(spec_static.evaluate(0.0))
    tracked = track_dressed(spectrum, references, warn_ambiguous=warn_ambiguous)
    energies = {lab: float(spectrum.eigenvalues[idx])
                for lab, idx in tracked.labels.items()}
    vectors = {lab: spectrum.eigenvectors[:, idx]
               for lab, idx in tracked.labels.items()}
    bare_conf = {
        lab: float(np.abs(bare_refs[lab].conj() @ vectors[lab]) ** 2)
        for lab in references
    }
    return energies, vectors, bare_conf, tracked.confidences


def stark_shift(params, tones, hilbert, model="late", reference_vectors=None,
                labels=STARK_LABELS):
    """Qubit and cavity ac Stark shifts in MHz for the chosen model.

    Builds the model, moves into the static drive frame, diagonalizes,
    and subtracts the undriven transition energies computed in the same
    frame. reference_vectors (label -> vector) switches label tracking
    from the bare basis to adiabatic continuation along a sweep.
    """
    delta_q, delta_c = _tone_detunings(tones)
    bare_refs = {lab: basis_state(hilbert, lab) for lab in labels}
    references = dict(reference_vectors) if reference_vectors else bare_refs

    driven = to_drive_frame(
        _build_model(params, tones, hilbert, model), delta_q, delta_c,
        require_static=True)
    undriven = to_drive_frame(
        _build_model(params, (), hilbert, model), delta_q, delta_c,
        require_static=True)

    e_d, vectors, bare_conf, tracking = _labelled_energies(
        driven, hilbert, references, bare_refs)
    e_u, _, _, _ = _labelled_energies(
        undriven, hilbert, bare_refs, bare_refs, warn_ambiguous=False)

    qubit_shift = (e_d["e0"] - e_d["g0"]) - (e_u["e0"] - e_u["g0"])
    cavity_shift = (e_d["g1"] - e_d["g0"]) - (e_u["g1"] - e_u["g0"])
    return StarkShiftResult(
        qubit_shift=to_mhz(qubit_shift),
        cavity_shift=to_mhz(cavity_shift),
        confidence=bare_conf,
        tracking=tracking,
        vectors=vectors,
    )
