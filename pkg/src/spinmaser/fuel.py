"""Fuel preparation: thermal spin networks and the central-spin temperature.

Two equivalent initialization schemes. The star scheme couples a central spin
homogeneously to N outer spin-1/2 sites,

    H = (w/2) sum_{i=0..N} sigma_iz
        + (J/4) sum_{i=1..N} (sigma_0x sigma_ix + sigma_0y sigma_iy
                              + lam sigma_0z sigma_iz),

and the collective scheme replaces the outer shell with one spin-S
(S = N/2 via S_alpha = (1/2) sum_i sigma_i_alpha),

    H = (w/2) sigma_0z + w S_z + (J/2)(sigma_0x S_x + sigma_0y S_y
                                       + lam sigma_0z S_z).

Everything here is expressed in units of the bath temperature (k_B = hbar = 1);
physical units enter only on the cavity side.

The network thermalizes to the Gibbs state at T_b. Tracing down to the central
spin gives a diagonal qubit state whose population ratio defines the effective
temperature T_q = -w / ln(p_e / p_g); T_q > T_b whenever the coupling dresses
the populations, which is what makes the spin usable as hot fuel.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ModelViolationError,
    NegativeEfficiencyError,
    PopulationInversionError,
)
from .operators import (
    DensityMatrix,
    HilbertDims,
    Operator,
    collective_spin,
    embed,
    partial_trace,
    spin_operators,
)

# star Hamiltonians are dense 2^(N+1) matrices; 8192^2 is where we stop
STAR_MAX_N = 12

COHERENCE_TOL = 1e-10


def _check_common(omega, j, lam):
    if omega <= 0:
        raise ValueError(f"omega must be positive, got {omega}")
    if j < 0:
        raise ValueError(f"antiferromagnetic coupling J must be >= 0, got {j}")
    if lam < 0:
        raise ValueError(f"anisotropy lambda must be >= 0, got {lam}")


@dataclass(frozen=True)
class StarModelParams:
    """Spin-star fuel parameters, all in units of T_b."""

    omega: float
    J: float
    lam: float
    N: int

    def __post_init__(self):
        _check_common(self.omega, self.J, self.lam)
        if self.N < 1 or self.N != int(self.N):
            raise ValueError(f"outer-spin count N must be an integer >= 1, got {self.N}")


@dataclass(frozen=True)
class CollectiveModelParams:
    """Spin-1/2 x spin-S fuel parameters, all in units of T_b."""

    omega: float
    J: float
    lam: float
    S: float

    def __post_init__(self):
        _check_common(self.omega, self.J, self.lam)
        if 2 * self.S != int(2 * self.S) or self.S <= 0:
            raise ValueError(f"S must be a positive half-integer, got {self.S}")


@dataclass(frozen=True)
class CentralSpinState:
    """Diagonal central-spin state: p_e |e><e| + p_g |g><g|."""

    p_e: float
    omega: float

    def __post_init__(self):
        if not 0.0 <= self.p_e <= 1.0:
            raise ValueError(f"p_e must be a probability, got {self.p_e}")

    @property
    def p_g(self) -> float:
        return 1.0 - self.p_e


@dataclass(frozen=True)
class EffectiveTemperature:
    """Central-spin temperature in units of T_b; requires p_e < 1/2."""

    T_q: float


def build_star_hamiltonian(p: StarModelParams, max_n: int = STAR_MAX_N) -> Operator:
    """Spin-star XXZ Hamiltonian on 2^(N+1); central spin at factor 0."""
    if p.N > max_n:
        raise ValueError(f"N={p.N} exceeds the star-model memory cap {max_n}; "
                         "use the collective scheme instead")
    dims = HilbertDims((2,) * (p.N + 1))
    half = spin_operators(0.5)
    paulis = {ax: 2 * op for ax, op in zip("xyz", (half.x, half.y, half.z))}
    h = np.zeros((dims.total, dims.total), dtype=complex)
    for i in range(p.N + 1):
        h += (p.omega / 2) * embed(paulis["z"], i, dims).matrix
    for i in range(1, p.N + 1):
        for ax, weight in (("x", 1.0), ("y", 1.0), ("z", p.lam)):
            pair = embed(paulis[ax], 0, dims) @ embed(paulis[ax], i, dims)
            h += (p.J / 4) * weight * pair.matrix
    return Operator(dims, h)


def build_collective_hamiltonian(p: CollectiveModelParams) -> Operator:
    """Spin-1/2 x spin-S Hamiltonian on 2(2S+1); tape spin at factor 0."""
    d2 = int(2 * p.S) + 1
    dims = HilbertDims((2, d2))
    half = spin_operators(0.5)
    big = spin_operators(p.S)
    pz = embed(2 * half.z, 0, dims)
    h = (p.omega / 2) * pz + p.omega * embed(big.z, 1, dims)
    for pauli, s_op, weight in (
        (half.x, big.x, 1.0),
        (half.y, big.y, 1.0),
        (half.z, big.z, p.lam),
    ):
        h = h + (p.J / 2) * weight * (embed(2 * pauli, 0, dims) @ embed(s_op, 1, dims))
    return h


def gibbs_state(h: Operator, t_b: float) -> DensityMatrix:
    """Thermal state exp(-H/T_b)/Z by Hermitian eigendecomposition."""
    if t_b <= 0:
        raise ValueError(f"bath temperature must be positive, got {t_b}")
    herm = np.max(np.abs(h.matrix - h.matrix.conj().T))
    if herm > 1e-10:
        raise ValueError(f"Hamiltonian not Hermitian: max |H - H^dag| = {herm:.3e}")
    energies, vectors = np.linalg.eigh(h.matrix)
    # shift by the ground energy before exponentiating; beta*|E0| can reach ~70
    weights = np.exp(-(energies - energies[0]) / t_b)
    weights /= weights.sum()
    rho = (vectors * weights) @ vectors.conj().T
    return DensityMatrix(h.dims, rho)


def partition_function(h: Operator, t_b: float) -> float:
    """Z = Tr exp(-H/T_b), evaluated with the same ground-energy shift."""
    if t_b <= 0:
        raise ValueError(f"bath temperature must be positive, got {t_b}")
    energies = np.linalg.eigvalsh(h.matrix)
    shifted = np.exp(-(energies - energies[0]) / t_b).sum()
    return float(shifted * np.exp(-energies[0] / t_b))


def central_spin_state(model, t_b: float = 1.0) -> CentralSpinState:
    """Thermalize the chosen model and reduce to the central/tape spin."""
    if isinstance(model, StarModelParams):
        h = build_star_hamiltonian(model)
    elif isinstance(model, CollectiveModelParams):
        h = build_collective_hamiltonian(model)
    else:
        raise TypeError(f"unsupported model type {type(model).__name__}")
    rho = gibbs_state(h, t_b)
    red = partial_trace(rho, [0]).matrix
    coherence = max(abs(red[0, 1]), abs(red[1, 0]))
    if coherence > COHERENCE_TOL:
        # the XXZ Gibbs state is strictly diagonal on the central spin;
        # anything else means the reduction itself is broken
        raise ModelViolationError(f"reduced state carries coherence {coherence:.3e}")
    p_e = float(red[0, 0].real)
    return CentralSpinState(p_e=p_e, omega=model.omega)


def effective_temperature(c: CentralSpinState) -> EffectiveTemperature:
    """T_q = -omega / ln(p_e / p_g), defined below inversion only."""
    if c.p_e >= 0.5:
        raise PopulationInversionError(
            f"p_e = {c.p_e} >= 1/2: population inverted, no positive temperature")
    if c.p_e == 0.0:
        return EffectiveTemperature(T_q=0.0)
    return EffectiveTemperature(T_q=-c.omega / np.log(c.p_e / c.p_g))


def carnot_efficiency(t_q: float, t_b: float) -> float:
    """Generalized Carnot efficiency eta = 1 - T_b/T_q of the fuelled engine."""
    if t_b <= 0:
        raise ValueError(f"bath temperature must be positive, got {t_b}")
    # J=0 fuel sits at T_q = T_b up to roundoff; don't reject the boundary
    if t_q < t_b * (1.0 - 1e-12):
        raise NegativeEfficiencyError(
            f"T_q = {t_q} below T_b = {t_b}: engine cannot run")
    return max(0.0, 1.0 - t_b / t_q)


def scheme_comparison(omega: float, j: float, lam: float, n_values, t_b: float = 1.0):
    """Star vs collective T_q at N = 2S, reported point by point.

    The two schemes are exactly identical at N=1; at larger N the star Gibbs
    state populates non-maximal collective-spin sectors, so the comparison is
    reported rather than asserted.
    """
    rows = []
    for n in n_values:
        star = central_spin_state(StarModelParams(omega, j, lam, int(n)), t_b)
        coll = central_spin_state(CollectiveModelParams(omega, j, lam, n / 2), t_b)
        tq_star = effective_temperature(star).T_q
        tq_coll = effective_temperature(coll).T_q
        rows.append({
            "N": int(n),
            "S": n / 2,
            "tq_star": tq_star,
            "tq_collective": tq_coll,
            "abs_diff": abs(tq_star - tq_coll),
        })
    return rows
