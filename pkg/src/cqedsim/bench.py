"""Backend benchmark: numba kernels vs the pure-numpy fallback.

Run with  python -m cqedsim.bench  [--duration US]

Times one closed-system propagation (a two-mode-squeezing working point)
and one short Lindblad run on both backends and reports the speedup and
the worst state deviation between them.
"""

import argparse
import time

import numpy as np

from ._kernels import numba_impl, numpy_impl
from .fockspace import basis_state, build_mode_ops
from .hamiltonian import build_late_rwa
from .model import DriveTone, HilbertSpec, SystemParams, validate_params, validate_tone


def _problem(duration):
    params = validate_params(SystemParams(
        omega_q=5311.0, omega_c=3579.0, alpha=229.9, kerr_c=0.0022,
        chi=1.923))
    hilbert = HilbertSpec(4, 12)
    tones = (
        validate_tone(DriveTone("qubit", 2.8, -20.0), params),
        validate_tone(DriveTone("cavity", 14.0, 20.0 - params.chi), params),
    )
    spec = build_late_rwa(params, tones, hilbert)
    psi0 = basis_state(hilbert, "g0")
    t_grid = np.linspace(0.0, duration, 5)
    return params, hilbert, spec, psi0, t_grid


def _time(fn, repeats=3):
    best = None
    result = None
    for _ in range(repeats):
        t0 = time.perf_counter()
        result = fn()
        dt = time.perf_counter() - t0
        best = dt if best is None else min(best, dt)
    return best, result


def main(argv=None):
    parser = argparse.ArgumentParser(prog="python -m cqedsim.bench")
    parser.add_argument("--duration", type=float, default=1.0,
                        help="propagation window in us (default 1.0)")
    parser.add_argument("--repeats", type=int, default=3)
    args = parser.parse_args(argv)

    params, hilbert, spec, psi0, t_grid = _problem(args.duration)
    arrays = spec.term_arrays()
    rtol, atol, max_step = 1e-8, 1e-10, 1e-3

    print(f"Schrodinger propagation, {args.duration} us, dim = {hilbert.dim}, "
          f"{len(arrays[0])} kernel rows")
    # warm up the jit once so compile time is reported separately
    t0 = time.perf_counter()
    numba_impl.propagate_schrodinger(*arrays, psi0, t_grid[:2], rtol, atol,
                                     max_step)
    print(f"  numba warm-up (compile + first call): "
          f"{time.perf_counter() - t0:.2f} s")

    t_nb, out_nb = _time(lambda: numba_impl.propagate_schrodinger(
        *arrays, psi0, t_grid, rtol, atol, max_step), args.repeats)
    t_np, out_np = _time(lambda: numpy_impl.propagate_schrodinger(
        *arrays, psi0, t_grid, rtol, atol, max_step), args.repeats)
    dev = np.max(np.abs(out_nb[0] - out_np[0]))
    print(f"  numba : {t_nb:.3f} s  ({out_nb[1]} steps)")
    print(f"  numpy : {t_np:.3f} s  ({out_np[1]} steps)")
    print(f"  speedup x{t_np / t_nb:.1f}, max state deviation {dev:.2e}")

    # short Lindblad problem
    ops = build_mode_ops(hilbert)
    dim = hilbert.dim
    l_ops = np.stack([ops.a]).astype(np.complex128)
    l_rates = np.array([2.0 * np.pi * 0.05])
    rho0 = np.outer(psi0, psi0.conj())
    t_rho = np.linspace(0.0, min(args.duration, 0.5), 3)
    lb_args = (rho0, t_rho, 1e-8, 1e-10, max_step, l_ops, l_rates, 0.0,
               np.zeros(1, np.complex128), np.zeros(1),
               ops.n_q_op.astype(np.complex128), ops.b.astype(np.complex128))
    print(f"Lindblad propagation, {t_rho[-1]} us, dim = {dim}")
    t0 = time.perf_counter()
    numba_impl.propagate_lindblad(*arrays, *lb_args)
    print(f"  numba warm-up (compile + first call): "
          f"{time.perf_counter() - t0:.2f} s")
    t_nb, out_nb = _time(lambda: numba_impl.propagate_lindblad(
        *arrays, *lb_args), args.repeats)
    t_np, out_np = _time(lambda: numpy_impl.propagate_lindblad(
        *arrays, *lb_args), args.repeats)
    dev = np.max(np.abs(out_nb[0] - out_np[0]))
    print(f"  numba : {t_nb:.3f} s  ({out_nb[1]} steps)")
    print(f"  numpy : {t_np:.3f} s  ({out_np[1]} steps)")
    print(f"  speedup x{t_np / t_nb:.1f}, max state deviation {dev:.2e}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
