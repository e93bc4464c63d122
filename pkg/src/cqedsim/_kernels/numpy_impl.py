"""Pure-numpy fallback kernels (reference implementation).

Mirrors the numba kernels step for step; used when numba is unavailable
or when CQEDSIM_BACKEND=numpy is set. Slower, but algorithmically
identical.
"""

import numpy as np

from . import common as cm

NAME = "numpy"


def _rhs_psi(coeffs, rots, shifts, amps, t, psi):
    """-i H(t) psi with H the sum of banded ladder monomials."""
    d = psi.shape[0]
    out = np.zeros(d, dtype=np.complex128)
    w = coeffs * np.exp(1j * rots * t)
    for k in range(coeffs.shape[0]):
        off = int(shifts[k])
        if off >= 0:
            if off < d:
                out[off:] += w[k] * amps[k, : d - off] * psi[: d - off]
        elif -off < d:
            out[: d + off] += w[k] * amps[k, -off:] * psi[-off:]
    return -1j * out


def _assemble_h(coeffs, rots, shifts, amps, t, d):
    h = np.zeros((d, d), dtype=np.complex128)
    w = coeffs * np.exp(1j * rots * t)
    for k in range(coeffs.shape[0]):
        off = int(shifts[k])
        lo = max(0, -off)
        hi = min(d, d - off)
        if lo >= hi:
            continue
        idx = np.arange(lo, hi)
        h[idx + off, idx] += w[k] * amps[k, lo:hi]
    return h


def _error_norm(err, y0, y1, rtol, atol):
    scale = atol + rtol * np.maximum(np.abs(y0), np.abs(y1))
    return float(np.sqrt(np.mean((np.abs(err) / scale) ** 2)))


def _initial_step(rhs, t0, y0, rtol, atol, max_step, span):
    f0 = rhs(t0, y0)
    scale = atol + rtol * np.abs(y0)
    d0 = float(np.sqrt(np.mean((np.abs(y0) / scale) ** 2)))
    d1 = float(np.sqrt(np.mean((np.abs(f0) / scale) ** 2)))
    if d1 > 1e-12 and d0 > 1e-12:
        h0 = 0.01 * d0 / d1
    else:
        h0 = span * 1e-3
    return min(h0, max_step, span), f0


def _integrate(rhs, y0, t_grid, rtol, atol, max_step, symmetrize=False):
    """Adaptive Dormand-Prince 5(4) with PI control, stepping exactly onto
    every grid point. Returns (states, nsteps, nrejected, status, t_reached).
    """
    nt = len(t_grid)
    states = np.empty((nt,) + y0.shape, dtype=np.complex128)
    states[0] = y0
    y = y0.astype(np.complex128, copy=True)
    t = float(t_grid[0])
    span = float(t_grid[-1] - t_grid[0])
    if nt == 1 or span == 0.0:
        states[:] = y0
        return states, 0, 0, cm.STATUS_OK, t

    h_nat, k1 = _initial_step(rhs, t, y, rtol, atol, max_step, span)
    facold = cm.FACOLD_INIT
    nsteps = 0
    nrejected = 0

    for igrid in range(1, nt):
        t_next = float(t_grid[igrid])
        while t < t_next:
            remaining = t_next - t
            h = min(h_nat, max_step, remaining)
            clamped = h < h_nat
            # Underflow only when the controller shrank the step to nothing;
            # an end-of-interval step may be legitimately tiny.
            if h < remaining and h < cm.HMIN_REL * max(1.0, abs(t)):
                states[igrid:] = np.nan
                return states, nsteps, nrejected, cm.STATUS_UNDERFLOW, t

            k2 = rhs(t + cm.C2 * h, y + h * (cm.A21 * k1))
            k3 = rhs(t + cm.C3 * h, y + h * (cm.A31 * k1 + cm.A32 * k2))
            k4 = rhs(t + cm.C4 * h, y + h * (cm.A41 * k1 + cm.A42 * k2 + cm.A43 * k3))
            k5 = rhs(t + cm.C5 * h, y + h * (cm.A51 * k1 + cm.A52 * k2
                                             + cm.A53 * k3 + cm.A54 * k4))
            k6 = rhs(t + h, y + h * (cm.A61 * k1 + cm.A62 * k2 + cm.A63 * k3
                                     + cm.A64 * k4 + cm.A65 * k5))
            y_new = y + h * (cm.B1 * k1 + cm.B3 * k3 + cm.B4 * k4
                             + cm.B5 * k5 + cm.B6 * k6)
            k7 = rhs(t + h, y_new)
            err_vec = h * (cm.E1 * k1 + cm.E3 * k3 + cm.E4 * k4
                           + cm.E5 * k5 + cm.E6 * k6 + cm.E7 * k7)
            err = max(_error_norm(err_vec, y, y_new, rtol, atol), cm.ERR_FLOOR)

            if err <= 1.0:
                nsteps += 1
                t = t_next if h == remaining else t + h
                y = y_new
                if symmetrize:
                    y = 0.5 * (y + y.conj().T)
                    k1 = rhs(t, y)
                else:
                    k1 = k7
                factor = min(cm.FAC_MAX,
                             max(cm.FAC_MIN,
                                 cm.SAFETY * err ** (-cm.KI) * facold ** cm.KP))
                facold = max(err, cm.FACOLD_INIT)
                if clamped:
                    h_nat = max(h_nat, h * factor)
                else:
                    h_nat = h * factor
            else:
                nrejected += 1
                h_nat = h * max(0.1, cm.SAFETY * err ** (-0.2))
        states[igrid] = y
    return states, nsteps, nrejected, cm.STATUS_OK, t


def propagate_schrodinger(coeffs, rots, shifts, amps, psi0, t_grid,
                          rtol, atol, max_step):
    def rhs(t, y):
        return _rhs_psi(coeffs, rots, shifts, amps, t, y)

    return _integrate(rhs, psi0, t_grid, rtol, atol, max_step)


def propagate_lindblad(coeffs, rots, shifts, amps, rho0, t_grid, rtol, atol,
                       max_step, l_ops, l_rates, deph_rate, deph_amps,
                       deph_rots, nq_op, b_op):
    """Lindblad RHS: -i[H, rho] + sum_j kappa_j D[L_j] rho, with the
    dephasing collapse operator rebuilt from xi_q(t) at every evaluation."""
    d = rho0.shape[0]
    eye = np.eye(d, dtype=np.complex128)
    b_dag = b_op.conj().T
    l_dags = [op.conj().T for op in l_ops]
    l_sqs = [dag @ op for op, dag in zip(l_ops, l_dags)]

    def rhs(t, rho):
        h = _assemble_h(coeffs, rots, shifts, amps, t, d)
        out = -1j * (h @ rho - rho @ h)
        for op, dag, sq, rate in zip(l_ops, l_dags, l_sqs, l_rates):
            if rate != 0.0:
                out += rate * (op @ rho @ dag - 0.5 * (sq @ rho + rho @ sq))
        if deph_rate != 0.0:
            xi = complex(np.sum(deph_amps * np.exp(1j * deph_rots * t)))
            ld = nq_op - xi * b_dag - np.conj(xi) * b_op + (abs(xi) ** 2) * eye
            ld_dag = ld.conj().T
            ld_sq = ld_dag @ ld
            out += deph_rate * (ld @ rho @ ld_dag - 0.5 * (ld_sq @ rho + rho @ ld_sq))
        return out

    return _integrate(rhs, rho0, t_grid, rtol, atol, max_step, symmetrize=True)
