import numpy as np
import pytest

from cqedsim.errors import DimensionError
from cqedsim.fockspace import (
    basis_index,
    basis_state,
    build_mode_ops,
    destroy,
    expectation,
    hermiticity_defect,
    monomial_matrix,
    parse_state_label,
)
from cqedsim.model import HilbertSpec


def test_destroy_ladder():
    b = destroy(3)
    assert b[0, 1] == 1.0
    assert b[1, 2] == pytest.approx(np.sqrt(2))
    assert np.count_nonzero(b) == 2


def test_qubit_embedding_positions():
    # qubit-major ordering: the two-level ladder of the qubit factor lands
    # at (0, n_c), (1, n_c + 1), ... ; for n_c = 2 that is (0,2) and (1,3).
    ops = build_mode_ops(HilbertSpec(3, 2))
    b = ops.b
    assert b[0, 2] == 1.0 and b[1, 3] == 1.0
    assert b[2, 4] == pytest.approx(np.sqrt(2))
    assert b[3, 5] == pytest.approx(np.sqrt(2))
    # b acts as identity on the cavity factor
    manual = np.kron(destroy(3), np.eye(2))
    assert np.array_equal(b, manual)
    manual_a = np.kron(np.eye(3), destroy(2))
    assert np.array_equal(ops.a, manual_a)


def test_commutation_defect_confined_to_top_level():
    ops = build_mode_ops(HilbertSpec(4, 12))
    comm = ops.b @ ops.b_dag - ops.b_dag @ ops.b
    defect = comm - np.eye(48)
    # defect only on the highest qubit level (indices 36..47)
    assert np.allclose(defect[:36, :36], 0.0)
    assert np.allclose(np.diag(defect)[36:], -4.0)
    # single-mode statement: [b, b_dag] = I except the last diagonal entry
    b = destroy(4)
    comm1 = b @ b.conj().T - b.conj().T @ b
    assert np.allclose(np.diag(comm1)[:3], 1.0)
    assert np.diag(comm1)[3] == pytest.approx(-3.0)


def test_tensor_factor_locality():
    ops = build_mode_ops(HilbertSpec(4, 5))
    comm = ops.a @ ops.b - ops.b @ ops.a
    assert np.max(np.abs(comm)) == 0.0


def test_dimension_cap():
    with pytest.raises(DimensionError):
        build_mode_ops(HilbertSpec(64, 65))
    build_mode_ops(HilbertSpec(64, 64))  # exactly at the cap is fine


def test_expectation_examples():
    h = HilbertSpec(3, 2)
    ops = build_mode_ops(h)
    one = basis_state(h, "g1")
    assert expectation(ops.n_c_op, one) == pytest.approx(1.0)
    assert expectation(ops.identity, one) == pytest.approx(1.0)
    plus = (basis_state(h, "g0") + basis_state(h, "e0")) / np.sqrt(2)
    assert expectation(ops.n_q_op, plus) == pytest.approx(0.5)
    rho = np.outer(plus, plus.conj())
    assert expectation(ops.n_q_op, rho) == pytest.approx(0.5)


def test_expectation_dimension_errors():
    h = HilbertSpec(3, 2)
    ops = build_mode_ops(h)
    with pytest.raises(DimensionError):
        expectation(ops.b, np.zeros(5, dtype=complex))
    with pytest.raises(DimensionError):
        expectation(ops.b, np.zeros((5, 5), dtype=complex))


def test_hermiticity_defect():
    a = destroy(2)
    assert hermiticity_defect(a + a.conj().T) == 0.0
    assert hermiticity_defect(a) == 1.0


def test_monomial_matrix_against_products():
    h = HilbertSpec(4, 5)
    ops = build_mode_ops(h)
    rng = np.random.default_rng(7)
    mats = {"b": ops.b, "b_dag": ops.b_dag, "a": ops.a, "a_dag": ops.a_dag}
    for _ in range(20):
        p, q, r, s = rng.integers(0, 3, size=4)
        manual = np.linalg.multi_dot([
            np.linalg.matrix_power(mats["b_dag"], p),
            np.linalg.matrix_power(mats["b"], q),
            np.linalg.matrix_power(mats["a_dag"], r),
            np.linalg.matrix_power(mats["a"], s),
            np.eye(h.dim, dtype=complex),
        ])
        assert np.allclose(monomial_matrix((p, q, r, s), h), manual,
                           atol=1e-12)


def test_labels():
    assert parse_state_label("g0") == (0, 0)
    assert parse_state_label("e0") == (1, 0)
    assert parse_state_label("f1") == (2, 1)
    assert parse_state_label("g12") == (0, 12)
    with pytest.raises(ValueError):
        parse_state_label("x0")
    with pytest.raises(ValueError):
        parse_state_label("g")
    h = HilbertSpec(4, 12)
    assert basis_index(h, 1, 0) == 12
    with pytest.raises(DimensionError):
        basis_index(h, 4, 0)
