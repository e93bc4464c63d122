import numpy as np
import pytest

from cqedsim import hamiltonian as ham
from cqedsim.dynamics import (
    phase_slope_frequency,
    propagate_lindblad,
    propagate_schrodinger,
)
from cqedsim.errors import (
    LowOverlapError,
    PhaseUnwrapError,
    ToleranceError,
)
from cqedsim.fockspace import basis_state
from cqedsim.hamiltonian import HamiltonianSpec, HamiltonianTerm
from cqedsim.model import (
    DriveTone,
    HilbertSpec,
    SolverOptions,
    SystemParams,
    validate_params,
    validate_tone,
)
from cqedsim.units import TWO_PI


def spec_from_terms(hilbert, *terms, params=None, tones=()):
    meta = {"params": params, "tones": tones}
    return HamiltonianSpec(tuple(terms), hilbert, metadata=meta)


def static(coeff, sig):
    return HamiltonianTerm(complex(coeff), 0.0, sig, False)


def paired(coeff, rot, sig):
    return HamiltonianTerm(complex(coeff), float(rot), sig, True)


SMALL = HilbertSpec(3, 2)


def test_zero_hamiltonian_keeps_state():
    spec = spec_from_terms(SMALL)
    psi0 = basis_state(SMALL, "e1")
    traj = propagate_schrodinger(spec, psi0, np.linspace(0, 5, 6))
    assert np.array_equal(traj.states[-1], psi0)
    assert traj.stats["norm_drift"] == 0.0


def test_number_operator_phase():
    omega = 3.7 * TWO_PI
    spec = spec_from_terms(SMALL, static(omega, (0, 0, 1, 1)))
    psi0 = basis_state(SMALL, "g1")
    t_grid = np.linspace(0, 2, 9)
    traj = propagate_schrodinger(spec, psi0, t_grid)
    idx = np.nonzero(psi0)[0][0]
    for k, t in enumerate(t_grid):
        amp = traj.states[k][idx]
        assert abs(amp - np.exp(-1j * omega * t)) < 1e-7
        assert abs(np.abs(amp) - 1.0) < 1e-7


def test_resonant_rabi_closed_form():
    rabi = 2.0 * TWO_PI  # full Rabi frequency Omega
    # drive the two-level cavity factor: Omega/2 (a^dag + a)
    spec = spec_from_terms(SMALL, paired(rabi / 2.0, 0.0, (0, 0, 1, 0)))
    psi0 = basis_state(SMALL, "g0")
    t_grid = np.linspace(0, 1.5, 31)
    traj = propagate_schrodinger(spec, psi0, t_grid)
    idx1 = np.nonzero(basis_state(SMALL, "g1"))[0][0]
    p1 = np.abs(traj.states[:, idx1]) ** 2
    assert np.max(np.abs(p1 - np.sin(rabi * t_grid / 2.0) ** 2)) < 1e-6


def test_tolerance_validation(table_s1, hilbert, fig1_qubit_tone):
    spec = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert)
    psi0 = basis_state(hilbert, "g0")
    with pytest.raises(ToleranceError):
        propagate_schrodinger(spec, psi0, [0.0, 1.0],
                              options=SolverOptions(rtol=1e-4))
    with pytest.raises(ValueError):
        propagate_schrodinger(spec, 0.5 * psi0, [0.0, 1.0])
    with pytest.raises(ValueError):
        propagate_schrodinger(spec, psi0, [1.0, 0.5])


def test_norm_drift_budget_10us(table_s1, hilbert):
    tones = (validate_tone(DriveTone("qubit", 3.0, -20.0), table_s1),
             validate_tone(DriveTone("cavity", 12.0, 18.077), table_s1))
    spec = ham.build_late_rwa(table_s1, tones, hilbert)
    psi0 = basis_state(hilbert, "g0")
    traj = propagate_schrodinger(spec, psi0, np.linspace(0, 10, 11))
    assert traj.stats["norm_drift"] < 1e-8


def test_tolerance_halving_convergence(table_s1, fig1_qubit_tone):
    hilbert = HilbertSpec(4, 6)
    spec = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert)
    psi0 = basis_state(hilbert, "g0")
    t_grid = np.array([0.0, 2.0])
    pops = []
    for rtol, atol in ((1e-8, 1e-10), (5e-9, 5e-11)):
        traj = propagate_schrodinger(spec, psi0, t_grid,
                                     options=SolverOptions(rtol=rtol, atol=atol))
        pops.append(np.abs(traj.states[-1]) ** 2)
    assert np.max(np.abs(pops[0] - pops[1])) < 1e-6


# ---------------------------------------------------------------------------
# Lindblad
# ---------------------------------------------------------------------------

def lindblad_params(**kw):
    base = dict(omega_q=5311.0, omega_c=3579.0, alpha=229.9, kerr_c=0.0022,
                chi=1.923)
    base.update(kw)
    return validate_params(SystemParams(**base))


def test_lindblad_closed_limit_matches_schrodinger(table_s1, fig1_qubit_tone):
    hilbert = HilbertSpec(3, 3)
    spec = ham.build_late_rwa(table_s1, [fig1_qubit_tone], hilbert)
    psi0 = basis_state(hilbert, "g0")
    t_grid = np.linspace(0.0, 1.0, 5)
    opts = SolverOptions(rtol=1e-10, atol=1e-12)
    traj_psi = propagate_schrodinger(spec, psi0, t_grid, options=opts)
    rho0 = np.outer(psi0, psi0.conj())
    traj_rho = propagate_lindblad(spec, rho0, t_grid, options=opts,
                                  params=table_s1)
    for k in range(len(t_grid)):
        pure = np.outer(traj_psi.states[k], traj_psi.states[k].conj())
        assert np.max(np.abs(pure - traj_rho.states[k])) < 1e-8


def test_cavity_decay_analytic():
    params = lindblad_params(kappa_c=0.1)
    hilbert = HilbertSpec(3, 4)
    spec = spec_from_terms(hilbert, params=params)
    rho0 = np.outer(basis_state(hilbert, "g1"),
                    basis_state(hilbert, "g1").conj())
    t_grid = np.linspace(0.0, 2.0, 9)
    traj = propagate_lindblad(spec, rho0, t_grid, params=params)
    idx = np.nonzero(basis_state(hilbert, "g1"))[0][0]
    for k, t in enumerate(t_grid):
        p1 = traj.states[k][idx, idx].real
        assert abs(p1 - np.exp(-params.ang.kappa_c * t)) < 1e-8
    assert traj.stats["trace_drift"] < 1e-8 * max(t_grid[-1], 1.0)


def test_plain_dephasing_coherence_decay():
    params = lindblad_params(kappa_d=0.05)
    hilbert = HilbertSpec(3, 2)
    spec = spec_from_terms(hilbert, params=params)
    plus = (basis_state(hilbert, "g0") + basis_state(hilbert, "e0")) / np.sqrt(2)
    rho0 = np.outer(plus, plus.conj())
    t_grid = np.linspace(0.0, 4.0, 5)
    traj = propagate_lindblad(spec, rho0, t_grid, params=params)
    i_g = np.nonzero(basis_state(hilbert, "g0"))[0][0]
    i_e = np.nonzero(basis_state(hilbert, "e0"))[0][0]
    # D[b^dag b]: rho_ge decays at kappa_d (n_e - n_g)^2 / 2
    for k, t in enumerate(t_grid):
        coh = traj.states[k][i_g, i_e]
        assert abs(coh - 0.5 * np.exp(-0.5 * params.ang.kappa_d * t)) < 1e-8


def test_displaced_dephasing_differs_and_preserves_trace(table_s1):
    params = lindblad_params(kappa_d=0.05)
    hilbert = HilbertSpec(3, 2)
    tone = validate_tone(DriveTone("qubit", 7.63, -20.0), params)
    from cqedsim.displacement import build_xi_set
    xi = build_xi_set(params, [tone])
    spec = spec_from_terms(hilbert, params=params)
    plus = (basis_state(hilbert, "g0") + basis_state(hilbert, "e0")) / np.sqrt(2)
    rho0 = np.outer(plus, plus.conj())
    t_grid = np.linspace(0.0, 2.0, 5)
    plain = propagate_lindblad(spec, rho0, t_grid, params=params)
    displaced = propagate_lindblad(spec, rho0, t_grid, params=params, xi=xi)
    assert displaced.stats["trace_drift"] < 1e-8 * 2.0
    diff = np.max(np.abs(plain.states[-1] - displaced.states[-1]))
    assert diff > 1e-4  # the displacement visibly changes the dissipator


def test_lindblad_validates_state(table_s1):
    hilbert = HilbertSpec(3, 2)
    spec = spec_from_terms(hilbert, params=table_s1)
    good = np.eye(hilbert.dim, dtype=complex) / hilbert.dim
    bad_trace = 2.0 * good
    with pytest.raises(ValueError):
        propagate_lindblad(spec, bad_trace, [0.0, 1.0], params=table_s1)
    bad_herm = good.copy()
    bad_herm[0, 1] = 1.0
    with pytest.raises(ValueError):
        propagate_lindblad(spec, bad_herm, [0.0, 1.0], params=table_s1)


# ---------------------------------------------------------------------------
# phase-slope estimator
# ---------------------------------------------------------------------------

def test_phase_slope_number_operator():
    omega_mhz = 4.321
    spec = spec_from_terms(SMALL, static(omega_mhz * TWO_PI, (0, 0, 1, 1)))
    est = phase_slope_frequency(spec, "g0", "g1", duration=2.0, dt_max=0.01)
    assert est.frequency == pytest.approx(omega_mhz, abs=1e-9)
    assert est.residual < 1e-10


def test_phase_slope_matches_eigensolver(table_s1, hilbert):
    from cqedsim import displacement as disp
    from cqedsim.spectra import eig_herm
    xi = disp.build_xi_set(table_s1, ())
    diag = ham.build_diag(table_s1, xi, hilbert)
    est = phase_slope_frequency(diag, "g0", "e0", duration=2.0, dt_max=0.01)
    evals = np.sort(np.diag(diag.evaluate(0.0)).real)
    h_mat = diag.evaluate(0.0)
    i_g = np.nonzero(basis_state(hilbert, "g0"))[0][0]
    i_e = np.nonzero(basis_state(hilbert, "e0"))[0][0]
    expected = (h_mat[i_e, i_e] - h_mat[i_g, i_g]).real / TWO_PI
    assert est.frequency == pytest.approx(expected, abs=1e-3)


def test_phase_slope_unwrap_error():
    # 4 MHz phase rate sampled every 0.1 us -> 2.5 rad jumps (> pi/2)
    spec = spec_from_terms(SMALL, static(4.0 * TWO_PI, (0, 0, 1, 1)))
    with pytest.raises(PhaseUnwrapError):
        phase_slope_frequency(spec, "g0", "g1", duration=2.0, dt_max=0.01,
                              n_samples=21)


def test_phase_slope_low_overlap():
    # resonant full transfer drives the overlap with |g0> through zero
    rabi = 2.0 * TWO_PI
    spec = spec_from_terms(SMALL, paired(rabi / 2.0, 0.0, (0, 0, 1, 0)))
    with pytest.raises(LowOverlapError):
        phase_slope_frequency(spec, "g0", "g1", duration=1.0, dt_max=0.005)


# ---------------------------------------------------------------------------
# displaced-frame reporting helper
# ---------------------------------------------------------------------------

def test_undisplace_state(table_s1):
    from cqedsim.displacement import build_xi_set
    from cqedsim.dynamics import undisplace_state
    from cqedsim.fockspace import build_mode_ops

    hilbert = HilbertSpec(3, 8)
    tone = validate_tone(DriveTone("cavity", 4.0, 18.5), table_s1)
    xi = build_xi_set(table_s1, [tone])
    vac = basis_state(hilbert, "g0")

    # no drives: identity
    empty = build_xi_set(table_s1, ())
    assert np.array_equal(undisplace_state(vac, empty, 0.3, hilbert), vac)

    # unitary: norm preserved; vacuum maps to a coherent state with the
    # xi amplitude
    out = undisplace_state(vac, xi, 0.0, hilbert)
    assert np.linalg.norm(out) == pytest.approx(1.0, abs=1e-12)
    ops = build_mode_ops(hilbert)
    amp = np.vdot(out, ops.a @ out)
    expect = (xi.cavity_co[0].amplitude + xi.cavity_counter[0].amplitude)
    assert amp == pytest.approx(expect, abs=1e-6)
