import numpy as np
import pytest

from spinmaser.errors import NegativeEfficiencyError, PopulationInversionError
from spinmaser.fuel import (
    CentralSpinState,
    CollectiveModelParams,
    EffectiveTemperature,
    StarModelParams,
    build_collective_hamiltonian,
    build_star_hamiltonian,
    carnot_efficiency,
    central_spin_state,
    effective_temperature,
    gibbs_state,
    partition_function,
    scheme_comparison,
)
from spinmaser.operators import HilbertDims, Operator

SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, -1j], [1j, 0]], dtype=complex)
SZ = np.diag([1.0, -1.0]).astype(complex)
I2 = np.eye(2, dtype=complex)


def kron(*ms):
    out = ms[0]
    for m in ms[1:]:
        out = np.kron(out, m)
    return out


def star_oracle(omega, j, lam, n):
    """Independent spin-star construction with explicit Kronecker chains."""
    d = 2 ** (n + 1)
    h = np.zeros((d, d), dtype=complex)
    for i in range(n + 1):
        facs = [I2] * (n + 1)
        facs[i] = SZ
        h += (omega / 2) * kron(*facs)
    for i in range(1, n + 1):
        for pauli, w in ((SX, 1.0), (SY, 1.0), (SZ, lam)):
            facs = [I2] * (n + 1)
            facs[0] = pauli
            facs[i] = pauli
            h += (j / 4) * w * kron(*facs)
    return h


def test_star_j_zero_is_diagonal_free_spins():
    h = build_star_hamiltonian(StarModelParams(omega=6.0, J=0.0, lam=1.0, N=3)).matrix
    assert np.max(np.abs(h - np.diag(np.diag(h)))) == 0
    # eigenvalues are (omega/2) * total magnetization
    mags = sorted(np.diag(h).real / 3.0)
    assert np.allclose(sorted(set(np.round(mags, 12))), [-4, -2, 0, 2, 4])


def test_star_equals_collective_at_n_one():
    star = build_star_hamiltonian(StarModelParams(6.0, 0.8, 0.75, 1))
    coll = build_collective_hamiltonian(CollectiveModelParams(6.0, 0.8, 0.75, 0.5))
    assert np.max(np.abs(star.matrix - coll.matrix)) == 0


def test_star_spectrum_against_dense_oracle():
    h = build_star_hamiltonian(StarModelParams(6.0, 0.8, 0.75, 2))
    oracle = star_oracle(6.0, 0.8, 0.75, 2)
    assert np.max(np.abs(h.matrix - oracle)) < 1e-13
    assert np.allclose(np.linalg.eigvalsh(h.matrix), np.linalg.eigvalsh(oracle))


def test_star_memory_cap():
    with pytest.raises(ValueError):
        build_star_hamiltonian(StarModelParams(6.0, 0.8, 1.0, 13))


def test_collective_j_zero_spectrum():
    p = CollectiveModelParams(omega=6.0, J=0.0, lam=1.0, S=1.5)
    vals = np.sort(np.linalg.eigvalsh(build_collective_hamiltonian(p).matrix))
    expected = np.sort([
        6.0 / 2 * s + 6.0 * m
        for s in (+1, -1)
        for m in (1.5, 0.5, -0.5, -1.5)
    ])
    assert np.allclose(vals, expected, atol=1e-12)


@pytest.mark.parametrize("lam", [0.0, 0.75, 1.0])
def test_collective_conserves_total_magnetization(lam):
    p = CollectiveModelParams(6.0, 0.8, lam, 2.5)
    h = build_collective_hamiltonian(p).matrix
    d2 = 6
    mz = np.kron(SZ / 2, np.eye(d2)) + np.kron(I2, np.diag(2.5 - np.arange(d2)))
    assert np.max(np.abs(h @ mz - mz @ h)) < 1e-12


def test_gibbs_single_qubit_boltzmann():
    h = Operator(HilbertDims((2,)), 3.0 * SZ)  # omega = 6
    rho = gibbs_state(h, 1.0)
    assert abs(rho.matrix[0, 0].real - 1 / (1 + np.exp(6))) < 1e-15
    assert abs(rho.matrix[0, 0].real - 2.4726e-3) < 1e-7


def test_gibbs_infinite_temperature_limit():
    h = build_collective_hamiltonian(CollectiveModelParams(6.0, 0.8, 1.0, 1.0))
    rho = gibbs_state(h, 1e8)
    assert np.max(np.abs(rho.matrix - np.eye(6) / 6)) < 1e-6


def test_gibbs_eigenvalues_are_boltzmann_weights():
    h = build_collective_hamiltonian(CollectiveModelParams(6.0, 0.8, 0.75, 1.5))
    rho = gibbs_state(h, 1.0)
    energies = np.linalg.eigvalsh(h.matrix)
    weights = np.exp(-(energies - energies[0]))
    weights /= weights.sum()
    assert np.allclose(np.sort(np.linalg.eigvalsh(rho.matrix)), np.sort(weights), atol=1e-13)


def test_gibbs_commutes_with_hamiltonian():
    h = build_star_hamiltonian(StarModelParams(6.0, 0.8, 1.0, 3))
    rho = gibbs_state(h, 1.0).matrix
    assert np.max(np.abs(rho @ h.matrix - h.matrix @ rho)) < 1e-10


def test_gibbs_rejects_non_hermitian():
    m = np.array([[0.0, 1.0], [0.0, 0.0]], dtype=complex)
    with pytest.raises(ValueError):
        gibbs_state(Operator(HilbertDims((2,)), m), 1.0)


def test_partition_function_single_qubit():
    h = Operator(HilbertDims((2,)), 3.0 * SZ)
    assert abs(partition_function(h, 1.0) - 2 * np.cosh(3.0)) < 1e-10


@pytest.mark.parametrize("n,lam", [(1, 0.0), (2, 0.5), (4, 1.0)])
def test_j_zero_recovers_bath_temperature(n, lam):
    c = central_spin_state(StarModelParams(6.0, 0.0, lam, n), 1.0)
    tq = effective_temperature(c).T_q
    assert abs(tq - 1.0) < 1e-10


def test_central_spin_n1_brute_force():
    # independent 4x4 diagonalization of the N=1 star at (6, 0.8, 0.75)
    h = star_oracle(6.0, 0.8, 0.75, 1)
    e, v = np.linalg.eigh(h)
    w = np.exp(-(e - e[0]))
    w /= w.sum()
    rho = (v * w) @ v.conj().T
    p_e_oracle = (rho[0, 0] + rho[1, 1]).real
    c = central_spin_state(StarModelParams(6.0, 0.8, 0.75, 1), 1.0)
    assert abs(c.p_e - p_e_oracle) < 1e-14
    assert abs(c.p_e - 0.0035973281900545306) < 1e-15


def test_central_spin_collective_pin():
    c = central_spin_state(CollectiveModelParams(6.0, 0.8, 1.0, 5.0), 1.0)
    # regression pin from the brute-force oracle
    assert abs(c.p_e - 0.152860565579254) < 1e-12
    assert abs(effective_temperature(c).T_q - 3.5039787884186233) < 1e-10


def test_effective_temperature_inverse_of_boltzmann():
    c = CentralSpinState(p_e=1 / (1 + np.exp(6)), omega=6.0)
    assert abs(effective_temperature(c).T_q - 1.0) < 1e-12


def test_effective_temperature_inversion_error_and_sentinel():
    with pytest.raises(PopulationInversionError):
        effective_temperature(CentralSpinState(p_e=0.5, omega=6.0))
    assert effective_temperature(CentralSpinState(p_e=0.0, omega=6.0)) == \
        EffectiveTemperature(T_q=0.0)


def test_monotone_tq_in_s_at_full_anisotropy():
    grid = [0.5 * k for k in range(1, 11)]
    tqs = []
    for s in grid:
        c = central_spin_state(CollectiveModelParams(6.0, 0.8, 1.0, s), 1.0)
        tqs.append(effective_temperature(c).T_q)
    assert all(b > a for a, b in zip(tqs, tqs[1:]))


def test_carnot_efficiency():
    assert carnot_efficiency(1.0, 1.0) == 0.0
    assert abs(carnot_efficiency(3.28, 1.0) - (1 - 1 / 3.28)) < 1e-15
    etas = [carnot_efficiency(t, 1.0) for t in (2.0, 5.0, 50.0, 5000.0)]
    assert all(b > a for a, b in zip(etas, etas[1:])) and etas[-1] < 1.0
    with pytest.raises(NegativeEfficiencyError):
        carnot_efficiency(0.9, 1.0)


def test_scheme_comparison_report():
    rows = scheme_comparison(6.0, 0.8, 0.75, [1, 2, 4])
    assert [r["N"] for r in rows] == [1, 2, 4]
    # N=1 is an exact matrix identity between the schemes
    assert rows[0]["abs_diff"] < 1e-12
    for r in rows:
        assert r["tq_star"] > 0 and r["tq_collective"] > 0


def test_param_validation():
    with pytest.raises(ValueError):
        StarModelParams(omega=-6.0, J=0.8, lam=1.0, N=2)
    with pytest.raises(ValueError):
        StarModelParams(omega=6.0, J=-0.1, lam=1.0, N=2)
    with pytest.raises(ValueError):
        CollectiveModelParams(omega=6.0, J=0.8, lam=1.0, S=0.7)
    with pytest.raises(ValueError):
        CentralSpinState(p_e=1.2, omega=6.0)
