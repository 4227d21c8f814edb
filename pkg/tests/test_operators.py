import numpy as np
import pytest

from spinmaser.operators import (
    DensityMatrix,
    HilbertDims,
    Operator,
    boson_operators,
    collective_spin,
    embed,
    identity,
    partial_trace,
    spin_operators,
)

rng = np.random.default_rng(7)

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)


def random_density(dims):
    d = dims.total
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    m = g @ g.conj().T
    return DensityMatrix(dims, m / np.trace(m))


def test_spin_half_is_pauli_over_two():
    s = spin_operators(0.5)
    assert np.allclose(s.z.matrix, SZ / 2)
    assert np.allclose(s.x.matrix, SX / 2)
    assert np.allclose(s.y.matrix, SY / 2)


def test_spin_one_matrix_elements():
    s = spin_operators(1)
    assert np.allclose(s.z.matrix, np.diag([1.0, 0.0, -1.0]))
    nz = s.plus.matrix[np.abs(s.plus.matrix) > 0]
    assert np.allclose(nz, np.sqrt(2))


@pytest.mark.parametrize("s", [0.5, 1, 1.5, 2, 2.5, 3, 3.5, 4, 4.5, 5])
def test_su2_commutators(s):
    ops = spin_operators(s)
    for a, b, c in [(ops.x, ops.y, ops.z), (ops.y, ops.z, ops.x), (ops.z, ops.x, ops.y)]:
        comm = a.matrix @ b.matrix - b.matrix @ a.matrix
        assert np.max(np.abs(comm - 1j * c.matrix)) < 1e-12


@pytest.mark.parametrize("s", [0.3, -0.5, 0])
def test_invalid_spin_rejected(s):
    with pytest.raises(ValueError):
        spin_operators(s)


def test_embed_sigma_z_first_of_two_qubits():
    dims = HilbertDims((2, 2))
    sz = Operator(HilbertDims((2,)), SZ)
    assert np.allclose(embed(sz, 0, dims).matrix, np.diag([1, 1, -1, -1]))


def test_embed_identity_is_identity():
    dims = HilbertDims((2, 3, 2))
    for pos, d in enumerate(dims):
        ident = identity(HilbertDims((d,)))
        assert np.allclose(embed(ident, pos, dims).matrix, np.eye(12))


def test_embed_commuting_factors():
    dims = HilbertDims((2, 2))
    sx = Operator(HilbertDims((2,)), SX)
    prod = embed(sx, 0, dims) @ embed(sx, 1, dims)
    assert np.allclose(prod.matrix, np.kron(SX, SX))


def test_embed_is_algebra_homomorphism():
    dims = HilbertDims((2, 3, 2))
    for _ in range(20):
        a = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        b = rng.normal(size=(3, 3)) + 1j * rng.normal(size=(3, 3))
        one = HilbertDims((3,))
        lhs = embed(Operator(one, a @ b), 1, dims).matrix
        rhs = embed(Operator(one, a), 1, dims).matrix @ embed(Operator(one, b), 1, dims).matrix
        assert np.max(np.abs(lhs - rhs)) < 1e-12


def test_embed_errors():
    dims = HilbertDims((2, 2))
    sz = Operator(HilbertDims((2,)), SZ)
    with pytest.raises(ValueError):
        embed(sz, 2, dims)
    with pytest.raises(ValueError):
        embed(Operator(HilbertDims((3,)), np.eye(3)), 0, dims)


def test_collective_spin_single_qubit():
    c = collective_spin(1)
    assert np.allclose(c.x.matrix, SX / 2)
    assert np.allclose(c.z.matrix, SZ / 2)


def test_collective_spin_two_qubit_magnetization():
    c = collective_spin(2)
    assert np.allclose(np.sort(np.diag(c.z.matrix).real), [-1, 0, 0, 1])


def test_collective_spin_three_qubit_sectors():
    # S^2 eigenvalues expose j=3/2 once (dim 4) and j=1/2 twice (dim 2 each)
    c = collective_spin(3)
    s2 = c.x.matrix @ c.x.matrix + c.y.matrix @ c.y.matrix + c.z.matrix @ c.z.matrix
    vals = np.sort(np.linalg.eigvalsh(s2))
    expected = [0.75] * 4 + [3.75] * 4
    assert np.allclose(vals, expected, atol=1e-10)


def test_collective_spin_su2_and_invalid_count():
    c = collective_spin(3)
    comm = c.x.matrix @ c.y.matrix - c.y.matrix @ c.x.matrix
    assert np.max(np.abs(comm - 1j * c.z.matrix)) < 1e-12
    with pytest.raises(ValueError):
        collective_spin(0)


def test_boson_commutator_up_to_truncation():
    b = boson_operators(12)
    comm = b.a.matrix @ b.adag.matrix - b.adag.matrix @ b.a.matrix
    assert np.allclose(np.diag(comm)[:-1], 1.0, atol=1e-13)
    assert np.allclose(b.number.matrix, b.adag.matrix @ b.a.matrix)


def test_density_matrix_validation():
    dims = HilbertDims((2,))
    with pytest.raises(ValueError):
        DensityMatrix(dims, np.array([[0.5, 0.5], [0.1, 0.5]]))  # not Hermitian
    with pytest.raises(ValueError):
        DensityMatrix(dims, np.eye(2))  # trace 2
    with pytest.raises(ValueError):
        DensityMatrix(dims, np.diag([1.5, -0.5]))  # negative eigenvalue


def test_partial_trace_product_state():
    da, db = HilbertDims((2,)), HilbertDims((3,))
    rho_a = random_density(da)
    rho_b = random_density(db)
    joint = DensityMatrix(HilbertDims((2, 3)), np.kron(rho_a.matrix, rho_b.matrix))
    assert np.max(np.abs(partial_trace(joint, [0]).matrix - rho_a.matrix)) < 1e-12
    assert np.max(np.abs(partial_trace(joint, [1]).matrix - rho_b.matrix)) < 1e-12


def test_partial_trace_bell_state():
    psi = np.zeros(4, dtype=complex)
    psi[0] = psi[3] = 1 / np.sqrt(2)
    rho = DensityMatrix(HilbertDims((2, 2)), np.outer(psi, psi.conj()))
    for k in (0, 1):
        assert np.allclose(partial_trace(rho, [k]).matrix, np.eye(2) / 2)


def test_partial_trace_preserves_trace_and_hermiticity():
    dims = HilbertDims((2, 3, 2))
    for _ in range(10):
        rho = random_density(dims)
        red = partial_trace(rho, [0, 2])
        assert abs(np.trace(red.matrix) - 1) < 1e-12
        assert np.max(np.abs(red.matrix - red.matrix.conj().T)) < 1e-12


def test_partial_trace_matches_block_sum_oracle():
    # keep the slow factor: the reduction is a straight diagonal block sum
    dims = HilbertDims((2, 4))
    rho = random_density(dims)
    blocks = rho.matrix.reshape(2, 4, 2, 4)
    oracle = np.einsum("aibi->ab", blocks)
    assert np.max(np.abs(partial_trace(rho, [0]).matrix - oracle)) < 1e-12


def test_partial_trace_errors():
    rho = random_density(HilbertDims((2, 2)))
    with pytest.raises(ValueError):
        partial_trace(rho, [])
    with pytest.raises(ValueError):
        partial_trace(rho, [2])


def test_kron_ordering_leftmost_slowest():
    # the documented convention: dims (2, 3) means kron(on-2, on-3)
    dims = HilbertDims((2, 3))
    sz = Operator(HilbertDims((2,)), SZ)
    m = embed(sz, 0, dims).matrix
    assert np.allclose(m, np.kron(SZ, np.eye(3)))


def test_operator_arithmetic_dimension_check():
    a = identity(HilbertDims((2,)))
    b = identity(HilbertDims((3,)))
    with pytest.raises(ValueError):
        _ = a + b
