"""Truncated Fock-space operator algebra for the qubit (x) cavity space.

All operators are dense complex matrices. Tensor ordering is qubit-major
and fixed globally: the full-space index of |q=i, c=j> is i * n_c + j.
Ladder monomials b^dag^p b^q a^dag^r a^s are the building blocks of every
Hamiltonian term; in the qubit-major layout each monomial is a single
off-diagonal band with a constant index shift, which is what the
propagation kernels exploit.
"""

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .errors import DimensionError

# Memory cap on the total Hilbert-space dimension (dense matrices).
DEFAULT_DIM_CAP = 4096

# Qubit level letters for state labels: |g>, |e>, |f>, |h>.
QUBIT_LETTERS = "gefh"


def destroy(n):
    """Annihilation operator on an n-level truncated mode."""
    return np.diag(np.sqrt(np.arange(1, n, dtype=float)), k=1).astype(complex)


@dataclass(frozen=True)
class ModeOps:
    """Mode operators embedded in the full qubit (x) cavity space."""

    hilbert: "HilbertSpec"
    a: np.ndarray
    a_dag: np.ndarray
    n_c_op: np.ndarray
    b: np.ndarray
    b_dag: np.ndarray
    n_q_op: np.ndarray
    identity: np.ndarray


def build_mode_ops(hilbert, dim_cap=DEFAULT_DIM_CAP):
    """Embedded ladder operators for the given truncation.

    b acts as identity on the cavity factor and vice versa. Raises
    DimensionError if n_q * n_c exceeds the memory cap.
    """
    dim = hilbert.n_q * hilbert.n_c
    if dim > dim_cap:
        raise DimensionError(
            f"total dimension {dim} exceeds cap {dim_cap} "
            f"(n_q={hilbert.n_q}, n_c={hilbert.n_c})"
        )
    eye_q = np.eye(hilbert.n_q, dtype=complex)
    eye_c = np.eye(hilbert.n_c, dtype=complex)
    a = np.kron(eye_q, destroy(hilbert.n_c))
    b = np.kron(destroy(hilbert.n_q), eye_c)
    return ModeOps(
        hilbert=hilbert,
        a=a,
        a_dag=a.conj().T,
        n_c_op=a.conj().T @ a,
        b=b,
        b_dag=b.conj().T,
        n_q_op=b.conj().T @ b,
        identity=np.eye(dim, dtype=complex),
    )


def basis_index(hilbert, qubit_level, cavity_n):
    """Flat index of |q=qubit_level, c=cavity_n> in qubit-major ordering."""
    if not 0 <= qubit_level < hilbert.n_q:
        raise DimensionError(f"qubit level {qubit_level} outside [0, {hilbert.n_q})")
    if not 0 <= cavity_n < hilbert.n_c:
        raise DimensionError(f"cavity level {cavity_n} outside [0, {hilbert.n_c})")
    return qubit_level * hilbert.n_c + cavity_n


def parse_state_label(label):
    """Parse a bare-state label like 'g0', 'e0', 'f1', 'g12'.

    Returns (qubit_level, cavity_n). The leading letter is the qubit level
    (g, e, f, h); the remaining digits are the cavity photon number.
    """
    label = label.strip()
    if len(label) < 2 or label[0] not in QUBIT_LETTERS or not label[1:].isdigit():
        raise ValueError(f"bad state label {label!r}; expected e.g. 'g0', 'e0', 'f1'")
    return QUBIT_LETTERS.index(label[0]), int(label[1:])


def state_label(qubit_level, cavity_n):
    return f"{QUBIT_LETTERS[qubit_level]}{cavity_n}"


def basis_state(hilbert, label):
    """Unit vector for a bare-state label."""
    q, c = parse_state_label(label)
    psi = np.zeros(hilbert.n_q * hilbert.n_c, dtype=complex)
    psi[basis_index(hilbert, q, c)] = 1.0
    return psi


def expectation(op, state):
    """<psi|op|psi> for a state vector, Tr(op rho) for a density matrix."""
    state = np.asarray(state)
    if op.shape[0] != op.shape[1]:
        raise DimensionError("operator is not square")
    if state.ndim == 1:
        if state.shape[0] != op.shape[0]:
            raise DimensionError("state/operator dimension mismatch")
        value = complex(np.vdot(state, op @ state))
    elif state.ndim == 2:
        if state.shape != op.shape:
            raise DimensionError("density matrix/operator dimension mismatch")
        value = complex(np.trace(op @ state))
    else:
        raise DimensionError("state must be a vector or a square matrix")
    if __debug__ and abs(value.imag) > 1e-10:
        # Only Hermitian observables promise a real expectation value.
        if hermiticity_defect(op) < 1e-12:
            raise AssertionError(
                f"Hermitian expectation developed imaginary part {value.imag:g}"
            )
    return value


def hermiticity_defect(op):
    """Max-norm of (op - op^dag); zero for Hermitian input."""
    return float(np.max(np.abs(op - op.conj().T))) if op.size else 0.0


def _ladder_amplitudes(n_levels, n_raise, n_lower):
    """Per-level amplitude of dag^p low^q on an n-level mode.

    amp[i] = <i - q + p| dag^p low^q |i>, zero where truncation cuts it off.
    """
    amp = np.zeros(n_levels, dtype=float)
    for i in range(n_levels):
        j = i - n_lower
        if j < 0 or j + n_raise > n_levels - 1:
            continue
        value = 1.0
        for m in range(n_lower):
            value *= i - m
        for m in range(n_raise):
            value *= j + 1 + m
        amp[i] = np.sqrt(value)
    return amp


@lru_cache(maxsize=None)
def monomial_band(signature, n_q, n_c):
    """Sparse band form of b^dag^p b^q a^dag^r a^s in the full space.

    signature = (p, q, r, s). Returns (amp, shift): the monomial maps basis
    index i to i + shift with weight amp[i] (amp is zero wherever the
    truncation makes the move invalid).
    """
    p, q, r, s = signature
    amp_q = _ladder_amplitudes(n_q, p, q)
    amp_c = _ladder_amplitudes(n_c, r, s)
    amp = np.kron(amp_q, amp_c)
    shift = (p - q) * n_c + (r - s)
    return amp, shift


def monomial_matrix(signature, hilbert):
    """Dense matrix of a ladder monomial (real entries)."""
    amp, shift = monomial_band(signature, hilbert.n_q, hilbert.n_c)
    dim = hilbert.n_q * hilbert.n_c
    mat = np.zeros((dim, dim), dtype=complex)
    for i in range(dim):
        j = i + shift
        if 0 <= j < dim and amp[i] != 0.0:
            mat[j, i] = amp[i]
    return mat
