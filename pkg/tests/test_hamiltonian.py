import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from cqedsim import displacement as disp
from cqedsim import hamiltonian as ham
from cqedsim.errors import FrameError
from cqedsim.fockspace import build_mode_ops, destroy, hermiticity_defect
from cqedsim.model import DriveTone, HilbertSpec, validate_tone
from cqedsim.units import TWO_PI


def tones_for(table_s1, *specs):
    return tuple(validate_tone(DriveTone(*s), table_s1) for s in specs)


# ---------------------------------------------------------------------------
# diagonal part
# ---------------------------------------------------------------------------

def test_diag_no_drives_is_bare_kerr(table_s1, hilbert):
    xi = disp.build_xi_set(table_s1, ())
    spec = ham.build_diag(table_s1, xi, hilbert)
    ops = build_mode_ops(hilbert)
    ang = table_s1.ang
    manual = (-0.5 * ang.alpha * ops.b_dag @ ops.b_dag @ ops.b @ ops.b
              - 0.5 * ang.kerr_c * ops.a_dag @ ops.a_dag @ ops.a @ ops.a
              - ang.chi * ops.n_q_op @ ops.n_c_op)
    assert np.allclose(spec.evaluate(0.0), manual, atol=1e-12)
    assert all(t.rotation == 0.0 for t in spec.terms)


def test_diag_qubit_drive_shift(table_s1, hilbert, fig1_qubit_tone):
    xi = disp.build_xi_set(table_s1, [fig1_qubit_tone])
    spec = ham.build_diag(table_s1, xi, hilbert)
    delta_q = [t for t in spec.terms if t.signature == (1, 1, 0, 0)]
    assert len(delta_q) == 1
    # -2 alpha |xi|^2 with |xi| = 7.63/40 (closed form from the xi formula)
    expected = -2.0 * 229.9 * (7.63 / 40.0) ** 2
    assert delta_q[0].coeff.real / TWO_PI == pytest.approx(expected, abs=5e-4)


def test_diag_cavity_only_selection(table_s1, hilbert):
    tones = tones_for(table_s1, ("cavity", 4.0, 18.5))
    xi = disp.build_xi_set(table_s1, tones)
    spec = ham.build_diag(table_s1, xi, hilbert)
    ang = table_s1.ang
    xi_c2 = abs(xi.cavity_co[0].amplitude) ** 2
    dq = [t for t in spec.terms if t.signature == (1, 1, 0, 0)][0]
    dc = [t for t in spec.terms if t.signature == (0, 0, 1, 1)][0]
    assert dq.coeff.real == pytest.approx(-ang.chi * xi_c2)
    assert dc.coeff.real == pytest.approx(-2.0 * ang.kerr_c * xi_c2)


def test_diag_multi_tone_beats(table_s1, hilbert):
    tones = tones_for(table_s1, ("cavity", 3.0, 18.0), ("cavity", 3.0, 16.0))
    xi = disp.build_xi_set(table_s1, tones)
    spec = ham.build_diag(table_s1, xi, hilbert)
    beats = [t for t in spec.terms if t.rotation != 0.0]
    # one beat pair feeding both delta_c (a^dag a) and delta_q (b^dag b)
    assert {t.signature for t in beats} == {(0, 0, 1, 1), (1, 1, 0, 0)}
    assert all(abs(abs(t.rotation) - 2.0 * TWO_PI) < 1e-9 for t in beats)


# ---------------------------------------------------------------------------
# interaction terms
# ---------------------------------------------------------------------------

H1_FAMILIES = {
    (2, 0, 0, 0), (2, 1, 0, 0), (0, 0, 2, 0), (0, 0, 2, 1),
    (1, 0, 1, 0), (0, 1, 1, 0), (1, 1, 1, 0), (1, 0, 1, 1),
    (1, 0, 0, 0), (0, 0, 1, 0),
}
H2_FAMILIES = {
    (2, 1, 0, 0), (0, 0, 2, 1), (1, 0, 1, 0), (0, 1, 1, 0),
    (1, 1, 1, 0), (1, 0, 1, 1),
}


def test_h1_term_families(table_s1, hilbert):
    tones = tones_for(table_s1, ("qubit", 5.0, -20.0), ("cavity", 5.0, 18.0))
    xi = disp.build_xi_set(table_s1, tones)
    spec = ham.build_h1(table_s1, xi, hilbert)
    assert {t.signature for t in spec.terms} == H1_FAMILIES
    assert all(t.conjugate_pair for t in spec.terms)


def test_h2_term_families(table_s1, hilbert):
    tones = tones_for(table_s1, ("qubit", 5.0, -20.0), ("cavity", 5.0, 18.0))
    xi = disp.build_xi_set(table_s1, tones)
    spec = ham.build_h2(table_s1, xi, hilbert)
    assert {t.signature for t in spec.terms} == H2_FAMILIES


def test_h2_empty_without_drive(table_s1, hilbert):
    xi = disp.build_xi_set(table_s1, tones_for(table_s1, ("qubit", 0.0, -20.0)))
    assert ham.build_h2(table_s1, xi, hilbert).terms == ()


def test_h2_qubit_coefficient(table_s1, hilbert, fig1_qubit_tone):
    xi = disp.build_xi_set(table_s1, [fig1_qubit_tone])
    spec = ham.build_h2(table_s1, xi, hilbert)
    term = [t for t in spec.terms if t.signature == (2, 1, 0, 0)][0]
    # alpha * |xi_2| = 229.9 * 7.63 / 21204
    assert abs(term.coeff) / TWO_PI == pytest.approx(0.0827267, abs=1e-6)


def test_h2_suppressed_by_mode_frequency(table_s1, hilbert, fig1_qubit_tone):
    xi = disp.build_xi_set(table_s1, [fig1_qubit_tone])
    h1 = ham.build_h1(table_s1, xi, hilbert)
    h2 = ham.build_h2(table_s1, xi, hilbert)
    c1 = abs([t for t in h1.terms if t.signature == (2, 1, 0, 0)][0].coeff)
    c2 = abs([t for t in h2.terms if t.signature == (2, 1, 0, 0)][0].coeff)
    ang = fig1_qubit_tone.ang
    expected = abs(2.0 * ang.detuning) / abs(4.0 * table_s1.ang.omega_q
                                             + 2.0 * ang.detuning)
    assert c2 / c1 == pytest.approx(expected, rel=1e-12)


def test_h1_rotation_bookkeeping(table_s1, hilbert):
    delta = 30.0
    # two-mode squeezing condition: b^dag a^dag static
    tms = tones_for(table_s1, ("qubit", 5.0, -delta), ("cavity", 5.0, delta))
    xi = disp.build_xi_set(table_s1, tms)
    spec = ham.build_h1(table_s1, xi, hilbert)
    rot = {t.signature: t.rotation for t in spec.terms}
    assert rot[(1, 0, 1, 0)] == 0.0
    assert rot[(0, 1, 1, 0)] != 0.0
    # beam splitter condition: b a^dag static
    bs = tones_for(table_s1, ("qubit", 5.0, -delta), ("cavity", 5.0, -delta))
    xi = disp.build_xi_set(table_s1, bs)
    rot = {t.signature: t.rotation
           for t in ham.build_h1(table_s1, xi, hilbert).terms}
    assert rot[(0, 1, 1, 0)] == 0.0
    assert rot[(1, 0, 1, 0)] != 0.0
    # single qubit tone: b^dag^2 b rotates at -Delta_q
    single = tones_for(table_s1, ("qubit", 5.0, -delta))
    xi = disp.build_xi_set(table_s1, single)
    rot = {t.signature: t.rotation
           for t in ham.build_h1(table_s1, xi, hilbert).terms}
    assert rot[(2, 1, 0, 0)] == pytest.approx(delta * TWO_PI)


# ---------------------------------------------------------------------------
# assembled models
# ---------------------------------------------------------------------------

def test_late_rwa_no_drives_is_diag(table_s1, hilbert):
    late = ham.build_late_rwa(table_s1, (), hilbert)
    early = ham.build_early_rwa(table_s1, (), hilbert)
    xi = disp.build_xi_set(table_s1, ())
    diag = ham.build_diag(table_s1, xi, hilbert)
    assert late.terms == diag.terms
    assert early.terms == diag.terms


def test_late_with_without_h2(table_s1, hilbert, fig1_qubit_tone):
    xi = disp.build_xi_set(table_s1, [fig1_qubit_tone])
    full = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert)
    bare = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert,
                              include_h2=False)
    h2 = ham.build_h2(table_s1, xi, hilbert)
    assert full.terms == bare.terms + h2.terms


def test_early_selection_rules(table_s1, hilbert):
    # single red-detuned qubit tone: H_diag only
    single = tones_for(table_s1, ("qubit", 7.63, -20.0))
    early = ham.build_early_rwa(table_s1, single, hilbert)
    assert all(t.rotation == 0.0 for t in early.terms)
    assert {t.signature for t in early.terms} <= {
        (1, 1, 0, 0), (0, 0, 1, 1), (2, 2, 0, 0), (0, 0, 2, 2), (1, 1, 1, 1)}
    # TMS pair keeps exactly the b^dag a^dag interaction family
    tms = tones_for(table_s1, ("qubit", 5.0, -30.0), ("cavity", 5.0, 30.0))
    early = ham.build_early_rwa(table_s1, tms, hilbert)
    interactions = {t.signature for t in early.terms if not (
        t.signature[0] == t.signature[1] and t.signature[2] == t.signature[3])}
    assert interactions == {(1, 0, 1, 0)}
    # BS pair keeps exactly b a^dag
    bs = tones_for(table_s1, ("qubit", 5.0, -30.0), ("cavity", 5.0, -30.0))
    early = ham.build_early_rwa(table_s1, bs, hilbert)
    interactions = {t.signature for t in early.terms if not (
        t.signature[0] == t.signature[1] and t.signature[2] == t.signature[3])}
    assert interactions == {(0, 1, 1, 0)}


@settings(max_examples=30, deadline=None)
@given(
    data=st.lists(
        st.tuples(st.booleans(), st.floats(0.0, 20.0), st.floats(2.0, 100.0),
                  st.booleans(), st.floats(0.0, 6.28)),
        min_size=0, max_size=3),
    t=st.floats(0.0, 10.0),
)
def test_builders_hermitian_at_random_times(table_s1, data, t):
    hilbert = HilbertSpec(4, 4)
    tones = tuple(
        validate_tone(DriveTone("qubit" if is_q else "cavity", eps,
                                det if pos else -det, phase), table_s1)
        for is_q, eps, det, pos, phase in data)
    for spec in (ham.build_late_rwa(table_s1, tones, hilbert),
                 ham.build_early_rwa(table_s1, tones, hilbert),
                 ham.build_oracle(table_s1, tones, hilbert)):
        assert hermiticity_defect(spec.evaluate(t)) < 1e-12


# ---------------------------------------------------------------------------
# oracle
# ---------------------------------------------------------------------------

def test_normal_ordered_quartic_tables():
    # (b + b^dag)^4 = quartic monomials + 6 b^dag^2 + 12 b^dag b + 6 b^2 + 3;
    # valid away from the truncation edge.
    n = 14
    b = destroy(n)
    bd = b.conj().T
    x4 = np.linalg.matrix_power(b + bd, 4)
    quartic = sum(
        mult * np.linalg.matrix_power(bd, p) @ np.linalg.matrix_power(b, q)
        for (p, q), mult in ham._NORMAL_ORDERED[4])
    remainder = x4 - quartic
    manual = 6 * bd @ bd + 12 * bd @ b + 6 * b @ b + 3 * np.eye(n)
    k = n - 4
    assert np.allclose(remainder[:k, :k], manual[:k, :k], atol=1e-9)


def test_oracle_rwa_filter_reproduces_kerr_diagonal(table_s1, hilbert):
    oracle = ham.build_oracle(table_s1, (), hilbert)
    static = [t for t in oracle.terms if t.rotation == 0.0]
    assert {t.signature for t in static} == {
        (2, 2, 0, 0), (0, 0, 2, 2), (1, 1, 1, 1)}
    coeffs = {t.signature: t.coeff.real for t in static}
    ang = table_s1.ang
    assert coeffs[(2, 2, 0, 0)] == pytest.approx(-0.5 * ang.alpha)
    assert coeffs[(0, 0, 2, 2)] == pytest.approx(-0.5 * ang.kerr_c)
    assert coeffs[(1, 1, 1, 1)] == pytest.approx(-ang.chi)


def test_oracle_contains_superharmonics(table_s1, hilbert):
    oracle = ham.build_oracle(table_s1, (), hilbert)
    by_sig = {t.signature: t for t in oracle.terms}
    b3b = by_sig[(3, 1, 0, 0)]
    assert b3b.rotation == pytest.approx(2.0 * table_s1.ang.omega_q)
    assert b3b.coeff.real == pytest.approx(-table_s1.ang.alpha / 3.0)
    # late RWA excludes superharmonics entirely
    late = ham.build_late_rwa(
        table_s1, tones_for(table_s1, ("qubit", 7.63, -20.0)), hilbert)
    assert (3, 1, 0, 0) not in {t.signature for t in late.terms}
    assert (3, 0, 0, 0) not in {t.signature for t in late.terms}


def test_oracle_drive_components(table_s1, hilbert, fig1_qubit_tone):
    oracle = ham.build_oracle(table_s1, [fig1_qubit_tone], hilbert)
    drives = [t for t in oracle.terms if t.signature == (1, 0, 0, 0)]
    assert len(drives) == 2
    ang = fig1_qubit_tone.ang
    rots = sorted(t.rotation for t in drives)
    assert rots[0] == pytest.approx(-ang.detuning)
    assert rots[1] == pytest.approx(2.0 * table_s1.ang.omega_q + ang.detuning)
    assert all(abs(t.coeff) == pytest.approx(ang.epsilon / 2) for t in drives)


# ---------------------------------------------------------------------------
# drive frame
# ---------------------------------------------------------------------------

def test_drive_frame_static_single_tone(table_s1, hilbert, fig1_qubit_tone):
    late = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert)
    framed = ham.to_drive_frame(late, fig1_qubit_tone.ang.detuning, 0.0,
                                require_static=True)
    assert framed.is_static()
    assert framed.frame == ham.DRIVE_FRAME


def test_drive_frame_no_drives_adds_frame_terms(table_s1, hilbert):
    late = ham.build_late_rwa(table_s1, (), hilbert)
    dq, dc = -20.0 * TWO_PI, 18.5 * TWO_PI
    framed = ham.to_drive_frame(late, dq, dc)
    extra = [t for t in framed.terms if t not in late.terms]
    coeffs = {t.signature: t.coeff.real for t in extra}
    assert coeffs == {(1, 1, 0, 0): -dq, (0, 0, 1, 1): -dc}


def test_drive_frame_multi_tone_raises_when_static_required(table_s1, hilbert):
    chi = table_s1.chi
    tones = tones_for(table_s1, ("qubit", 3.0, -20.0),
                      ("cavity", 3.0, 20.0 - chi),
                      ("cavity", 3.0, 20.0 - 2 * chi))
    late = ham.build_late_rwa(table_s1, tones, hilbert)
    with pytest.raises(FrameError):
        ham.to_drive_frame(late, tones[0].ang.detuning,
                           tones[1].ang.detuning, require_static=True)


def test_drive_frame_rejects_wrong_frame(table_s1, hilbert, fig1_qubit_tone):
    late = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert)
    framed = ham.to_drive_frame(late, fig1_qubit_tone.ang.detuning, 0.0)
    with pytest.raises(FrameError):
        ham.to_drive_frame(framed, 0.0, 0.0)


def test_frame_covariance_against_phase_accumulation(table_s1, hilbert,
                                                     fig1_qubit_tone):
    """Spectrum of the static drive-frame Hamiltonian must agree with
    explicit time-dependent phase accumulation on the rotating-frame one:
    the quasi transition differs from the drive-frame transition by
    exactly the frame term Delta_q."""
    from cqedsim.dynamics import phase_slope_frequency
    from cqedsim.spectra import eig_herm, track_dressed
    from cqedsim.fockspace import basis_state

    late = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert)
    est = phase_slope_frequency(late, "g0", "e0", duration=2.0, dt_max=1e-3)

    framed = ham.to_drive_frame(late, fig1_qubit_tone.ang.detuning, 0.0,
                                require_static=True)
    spectrum = eig_herm(framed.evaluate(0.0))
    refs = {lab: basis_state(hilbert, lab) for lab in ("g0", "e0")}
    tracked = track_dressed(spectrum, refs)
    transition = (spectrum.eigenvalues[tracked.labels["e0"]]
                  - spectrum.eigenvalues[tracked.labels["g0"]]) / TWO_PI
    # rotating frame = drive frame + Delta_q on the qubit transition
    assert est.frequency == pytest.approx(
        transition + fig1_qubit_tone.detuning, abs=1e-3)


def test_dump_lines(table_s1, hilbert, fig1_qubit_tone):
    spec = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert)
    lines = spec.dump_lines()
    assert len(lines) == len(spec.terms)
    assert any("b†2 b1 a†0 a0" in line for line in lines)
    assert any("+h.c." in line for line in lines)


def test_oracle_undriven_stationary(table_s1, hilbert):
    """Propagating |g,0> under the undriven brute-force Hamiltonian leaves
    the population in place up to a global phase (the rotating terms only
    dress it at the 1e-6 level)."""
    from cqedsim.dynamics import propagate_schrodinger
    from cqedsim.fockspace import basis_state
    oracle = ham.build_oracle(table_s1, (), hilbert)
    psi0 = basis_state(hilbert, "g0")
    traj = propagate_schrodinger(oracle, psi0, np.array([0.0, 1.0]),
                                 max_step_us=1e-4)
    overlap = abs(np.vdot(psi0, traj.states[-1])) ** 2
    assert overlap > 1.0 - 1e-5
