"""Numba-jitted propagation kernels (the default backend).

Same algorithm as numpy_impl, compiled with the full adaptive loop inside
one nogil kernel so sweeps can run the cells on worker threads.
"""

import numpy as np
from numba import njit

from .common import (
    A21, A31, A32, A41, A42, A43, A51, A52, A53, A54,
    A61, A62, A63, A64, A65,
    B1, B3, B4, B5, B6,
    C2, C3, C4, C5,
    E1, E3, E4, E5, E6, E7,
    ERR_FLOOR, FAC_MAX, FAC_MIN, FACOLD_INIT, HMIN_REL,
    KI, KP, SAFETY,
    STATUS_OK, STATUS_UNDERFLOW,
)

NAME = "numba"


@njit(cache=True, nogil=True)
def _rhs_psi(coeffs, rots, shifts, amps, t, psi, out):
    d = psi.shape[0]
    for i in range(d):
        out[i] = 0.0
    for k in range(coeffs.shape[0]):
        w = -1j * coeffs[k] * np.exp(1j * rots[k] * t)
        off = shifts[k]
        lo = 0 if off >= 0 else -off
        hi = d - off if off >= 0 else d
        if lo < 0:
            lo = 0
        if hi > d:
            hi = d
        for i in range(lo, hi):
            out[i + off] += w * amps[k, i] * psi[i]


@njit(cache=True, nogil=True)
def propagate_schrodinger(coeffs, rots, shifts, amps, psi0, t_grid,
                          rtol, atol, max_step):
    d = psi0.shape[0]
    nt = t_grid.shape[0]
    states = np.empty((nt, d), np.complex128)
    y = psi0.astype(np.complex128)
    for i in range(d):
        states[0, i] = y[i]
    t = t_grid[0]
    span = t_grid[nt - 1] - t_grid[0]
    if nt == 1 or span == 0.0:
        for ig in range(nt):
            for i in range(d):
                states[ig, i] = y[i]
        return states, 0, 0, STATUS_OK, t

    k1 = np.empty(d, np.complex128)
    k2 = np.empty(d, np.complex128)
    k3 = np.empty(d, np.complex128)
    k4 = np.empty(d, np.complex128)
    k5 = np.empty(d, np.complex128)
    k6 = np.empty(d, np.complex128)
    k7 = np.empty(d, np.complex128)
    tmp = np.empty(d, np.complex128)
    y_new = np.empty(d, np.complex128)

    # initial step size from the scaled right-hand side
    _rhs_psi(coeffs, rots, shifts, amps, t, y, k1)
    d0 = 0.0
    d1 = 0.0
    for i in range(d):
        sc = atol + rtol * abs(y[i])
        d0 += (abs(y[i]) / sc) ** 2
        d1 += (abs(k1[i]) / sc) ** 2
    d0 = np.sqrt(d0 / d)
    d1 = np.sqrt(d1 / d)
    if d1 > 1e-12 and d0 > 1e-12:
        h_nat = 0.01 * d0 / d1
    else:
        h_nat = span * 1e-3
    if h_nat > max_step:
        h_nat = max_step
    if h_nat > span:
        h_nat = span

    facold = FACOLD_INIT
    nsteps = 0
    nrejected = 0

    for igrid in range(1, nt):
        t_next = t_grid[igrid]
        while t < t_next:
            remaining = t_next - t
            h = h_nat
            if h > max_step:
                h = max_step
            clamped_end = False
            if h >= remaining:
                h = remaining
                clamped_end = True
            clamped = h < h_nat
            # Underflow only when the controller shrank the step to nothing;
            # an end-of-interval step may be legitimately tiny.
            if not clamped_end and h < HMIN_REL * max(1.0, abs(t)):
                for ig in range(igrid, nt):
                    for i in range(d):
                        states[ig, i] = complex(np.nan, np.nan)
                return states, nsteps, nrejected, STATUS_UNDERFLOW, t

            for i in range(d):
                tmp[i] = y[i] + h * (A21 * k1[i])
            _rhs_psi(coeffs, rots, shifts, amps, t + C2 * h, tmp, k2)
            for i in range(d):
                tmp[i] = y[i] + h * (A31 * k1[i] + A32 * k2[i])
            _rhs_psi(coeffs, rots, shifts, amps, t + C3 * h, tmp, k3)
            for i in range(d):
                tmp[i] = y[i] + h * (A41 * k1[i] + A42 * k2[i] + A43 * k3[i])
            _rhs_psi(coeffs, rots, shifts, amps, t + C4 * h, tmp, k4)
            for i in range(d):
                tmp[i] = y[i] + h * (A51 * k1[i] + A52 * k2[i] + A53 * k3[i]
                                     + A54 * k4[i])
            _rhs_psi(coeffs, rots, shifts, amps, t + C5 * h, tmp, k5)
            for i in range(d):
                tmp[i] = y[i] + h * (A61 * k1[i] + A62 * k2[i] + A63 * k3[i]
                                     + A64 * k4[i] + A65 * k5[i])
            _rhs_psi(coeffs, rots, shifts, amps, t + h, tmp, k6)
            for i in range(d):
                y_new[i] = y[i] + h * (B1 * k1[i] + B3 * k3[i] + B4 * k4[i]
                                       + B5 * k5[i] + B6 * k6[i])
            _rhs_psi(coeffs, rots, shifts, amps, t + h, y_new, k7)

            err_sum = 0.0
            for i in range(d):
                e = h * (E1 * k1[i] + E3 * k3[i] + E4 * k4[i] + E5 * k5[i]
                         + E6 * k6[i] + E7 * k7[i])
                ay = abs(y[i])
                ayn = abs(y_new[i])
                sc = atol + rtol * (ay if ay > ayn else ayn)
                err_sum += (abs(e) / sc) ** 2
            err = np.sqrt(err_sum / d)
            if err < ERR_FLOOR:
                err = ERR_FLOOR

            if err <= 1.0:
                nsteps += 1
                t = t_next if clamped_end else t + h
                for i in range(d):
                    y[i] = y_new[i]
                    k1[i] = k7[i]
                factor = SAFETY * err ** (-KI) * facold ** KP
                if factor > FAC_MAX:
                    factor = FAC_MAX
                if factor < FAC_MIN:
                    factor = FAC_MIN
                facold = err if err > FACOLD_INIT else FACOLD_INIT
                if clamped:
                    if h * factor > h_nat:
                        h_nat = h * factor
                else:
                    h_nat = h * factor
            else:
                nrejected += 1
                shrink = SAFETY * err ** (-0.2)
                if shrink < 0.1:
                    shrink = 0.1
                h_nat = h * shrink
        for i in range(d):
            states[igrid, i] = y[i]
    return states, nsteps, nrejected, STATUS_OK, t


@njit(cache=True, nogil=True)
def _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags, l_sqs, l_rates,
             deph_rate, deph_amps, deph_rots, nq_op, b_op, b_dag, t, rho):
    d = rho.shape[0]
    h_mat = np.zeros((d, d), np.complex128)
    for k in range(coeffs.shape[0]):
        w = coeffs[k] * np.exp(1j * rots[k] * t)
        off = shifts[k]
        lo = 0 if off >= 0 else -off
        hi = d - off if off >= 0 else d
        if lo < 0:
            lo = 0
        if hi > d:
            hi = d
        for i in range(lo, hi):
            h_mat[i + off, i] += w * amps[k, i]
    out = -1j * (np.dot(h_mat, rho) - np.dot(rho, h_mat))
    for j in range(l_rates.shape[0]):
        rate = l_rates[j]
        if rate == 0.0:
            continue
        op = l_ops[j]
        dag = l_dags[j]
        sq = l_sqs[j]
        out += rate * (np.dot(np.dot(op, rho), dag)
                       - 0.5 * (np.dot(sq, rho) + np.dot(rho, sq)))
    if deph_rate != 0.0:
        xi = 0.0 + 0.0j
        for m in range(deph_amps.shape[0]):
            xi += deph_amps[m] * np.exp(1j * deph_rots[m] * t)
        ld = np.empty((d, d), np.complex128)
        xi_c = np.conj(xi)
        xi_abs2 = (xi * xi_c).real
        for i in range(d):
            for jj in range(d):
                ld[i, jj] = (nq_op[i, jj] - xi * b_dag[i, jj]
                             - xi_c * b_op[i, jj])
            ld[i, i] += xi_abs2
        ld_dag = np.conj(ld).T
        ld_sq = np.dot(ld_dag, ld)
        out += deph_rate * (np.dot(np.dot(ld, rho), ld_dag)
                            - 0.5 * (np.dot(ld_sq, rho) + np.dot(rho, ld_sq)))
    return out


@njit(cache=True, nogil=True)
def propagate_lindblad(coeffs, rots, shifts, amps, rho0, t_grid, rtol, atol,
                       max_step, l_ops, l_rates, deph_rate, deph_amps,
                       deph_rots, nq_op, b_op):
    d = rho0.shape[0]
    nt = t_grid.shape[0]
    states = np.empty((nt, d, d), np.complex128)
    y = rho0.astype(np.complex128)
    states[0] = y
    t = t_grid[0]
    span = t_grid[nt - 1] - t_grid[0]
    if nt == 1 or span == 0.0:
        for ig in range(nt):
            states[ig] = y
        return states, 0, 0, STATUS_OK, t

    b_dag = np.conj(b_op).T.copy()
    n_l = l_ops.shape[0]
    l_dags = np.empty_like(l_ops)
    l_sqs = np.empty_like(l_ops)
    for j in range(n_l):
        l_dags[j] = np.conj(l_ops[j]).T
        l_sqs[j] = np.dot(l_dags[j], l_ops[j])

    k1 = _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags, l_sqs, l_rates,
                  deph_rate, deph_amps, deph_rots, nq_op, b_op, b_dag, t, y)
    d0 = 0.0
    d1 = 0.0
    for i in range(d):
        for jj in range(d):
            sc = atol + rtol * abs(y[i, jj])
            d0 += (abs(y[i, jj]) / sc) ** 2
            d1 += (abs(k1[i, jj]) / sc) ** 2
    d0 = np.sqrt(d0 / (d * d))
    d1 = np.sqrt(d1 / (d * d))
    if d1 > 1e-12 and d0 > 1e-12:
        h_nat = 0.01 * d0 / d1
    else:
        h_nat = span * 1e-3
    if h_nat > max_step:
        h_nat = max_step
    if h_nat > span:
        h_nat = span

    facold = FACOLD_INIT
    nsteps = 0
    nrejected = 0

    for igrid in range(1, nt):
        t_next = t_grid[igrid]
        while t < t_next:
            remaining = t_next - t
            h = h_nat
            if h > max_step:
                h = max_step
            clamped_end = False
            if h >= remaining:
                h = remaining
                clamped_end = True
            clamped = h < h_nat
            if not clamped_end and h < HMIN_REL * max(1.0, abs(t)):
                for ig in range(igrid, nt):
                    for i in range(d):
                        for jj in range(d):
                            states[ig, i, jj] = complex(np.nan, np.nan)
                return states, nsteps, nrejected, STATUS_UNDERFLOW, t

            k2 = _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags, l_sqs,
                          l_rates, deph_rate, deph_amps, deph_rots, nq_op,
                          b_op, b_dag, t + C2 * h, y + h * (A21 * k1))
            k3 = _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags, l_sqs,
                          l_rates, deph_rate, deph_amps, deph_rots, nq_op,
                          b_op, b_dag, t + C3 * h,
                          y + h * (A31 * k1 + A32 * k2))
            k4 = _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags, l_sqs,
                          l_rates, deph_rate, deph_amps, deph_rots, nq_op,
                          b_op, b_dag, t + C4 * h,
                          y + h * (A41 * k1 + A42 * k2 + A43 * k3))
            k5 = _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags, l_sqs,
                          l_rates, deph_rate, deph_amps, deph_rots, nq_op,
                          b_op, b_dag, t + C5 * h,
                          y + h * (A51 * k1 + A52 * k2 + A53 * k3 + A54 * k4))
            k6 = _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags, l_sqs,
                          l_rates, deph_rate, deph_amps, deph_rots, nq_op,
                          b_op, b_dag, t + h,
                          y + h * (A61 * k1 + A62 * k2 + A63 * k3 + A64 * k4
                                   + A65 * k5))
            y_new = y + h * (B1 * k1 + B3 * k3 + B4 * k4 + B5 * k5 + B6 * k6)
            k7 = _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags, l_sqs,
                          l_rates, deph_rate, deph_amps, deph_rots, nq_op,
                          b_op, b_dag, t + h, y_new)
            err_mat = h * (E1 * k1 + E3 * k3 + E4 * k4 + E5 * k5 + E6 * k6
                           + E7 * k7)
            err_sum = 0.0
            for i in range(d):
                for jj in range(d):
                    ay = abs(y[i, jj])
                    ayn = abs(y_new[i, jj])
                    sc = atol + rtol * (ay if ay > ayn else ayn)
                    err_sum += (abs(err_mat[i, jj]) / sc) ** 2
            err = np.sqrt(err_sum / (d * d))
            if err < ERR_FLOOR:
                err = ERR_FLOOR

            if err <= 1.0:
                nsteps += 1
                t = t_next if clamped_end else t + h
                # enforce Hermiticity each accepted step
                y = 0.5 * (y_new + np.conj(y_new).T)
                k1 = _rhs_rho(coeffs, rots, shifts, amps, l_ops, l_dags,
                              l_sqs, l_rates, deph_rate, deph_amps, deph_rots,
                              nq_op, b_op, b_dag, t, y)
                factor = SAFETY * err ** (-KI) * facold ** KP
                if factor > FAC_MAX:
                    factor = FAC_MAX
                if factor < FAC_MIN:
                    factor = FAC_MIN
                facold = err if err > FACOLD_INIT else FACOLD_INIT
                if clamped:
                    if h * factor > h_nat:
                        h_nat = h * factor
                else:
                    h_nat = h * factor
            else:
                nrejected += 1
                shrink = SAFETY * err ** (-0.2)
                if shrink < 0.1:
                    shrink = 0.1
                h_nat = h * shrink
        states[igrid] = y
    return states, nsteps, nrejected, STATUS_OK, t
