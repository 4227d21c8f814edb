"""Time-independent Lindblad generators, finite-time propagators, steady states.

Density matrices are vectorized row-major, vec(rho)[i*d + j] = rho[i, j], so
vec(A rho B) = (A kron B^T) vec(rho) and the generator

    L rho = -i[H, rho] + sum_k r_k (x_k rho x_k^dag - {x_k^dag x_k, rho}/2)

becomes a dense d^2 x d^2 matrix. Exponentials use scipy's scaling-and-squaring
expm and are memoized per generator and duration, since every stage of the
engine is time-independent and gets reapplied many times.

All rates are angular frequencies (rad/s); helpers accepting the nu/2pi and
g/pi conventions live at the interfaces that read configuration.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.linalg import expm

from .errors import AboveThresholdError, ConvergenceError, NonUniqueSteadyStateError
from .operators import DensityMatrix, HilbertDims, Operator, boson_operators

# null-space and residual tolerances are relative to the generator's largest
# entry so that the same code serves rad/s-scale and unit-rate generators
NULLSPACE_RTOL = 1e-10
RESIDUAL_RTOL = 1e-10
TP_TOL = 1e-9
CP_FLOOR = -1e-8


@dataclass(frozen=True)
class Dissipator:
    collapse: Operator
    rate: float

    def __post_init__(self):
        if self.rate < 0:
            raise ValueError(f"dissipator rate must be >= 0, got {self.rate}")


@dataclass(frozen=True, eq=False)
class LindbladGenerator:
    hamiltonian: Operator
    dissipators: tuple[Dissipator, ...]
    dims: HilbertDims
    superoperator: np.ndarray
    _propagator_cache: dict = field(default_factory=dict, repr=False)


@dataclass(frozen=True, eq=False)
class Propagator:
    """exp(L t): a trace-preserving, completely positive map on vec'd states."""

    generator: LindbladGenerator
    duration: float
    matrix: np.ndarray

    def __post_init__(self):
        d = self.generator.dims.total
        vec_id = np.eye(d, dtype=complex).reshape(-1)
        tp = np.max(np.abs(vec_id @ self.matrix - vec_id))
        if tp > TP_TOL:
            raise ValueError(f"propagator is not trace-preserving: deviation {tp:.3e}")
        rng = np.random.default_rng(1234)
        for _ in range(3):
            g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
            rho = g @ g.conj().T
            rho /= np.trace(rho)
            out = (self.matrix @ rho.reshape(-1)).reshape(d, d)
            low = float(np.linalg.eigvalsh((out + out.conj().T) / 2)[0])
            if low < CP_FLOOR:
                raise ValueError(f"propagator violates positivity: eigenvalue {low:.3e}")

    def apply(self, rho: DensityMatrix) -> DensityMatrix:
        if rho.dims != self.generator.dims:
            raise ValueError("state dimensions do not match the propagator")
        d = rho.dims.total
        out = (self.matrix @ rho.matrix.reshape(-1)).reshape(d, d)
        return DensityMatrix(rho.dims, (out + out.conj().T) / 2)


def build_generator(h: Operator, ds) -> LindbladGenerator:
    """Assemble the dense superoperator for -i[H, .] plus the dissipators."""
    herm = np.max(np.abs(h.matrix - h.matrix.conj().T))
    if herm > 1e-10:
        raise ValueError(f"Hamiltonian not Hermitian: max |H - H^dag| = {herm:.3e}")
    ds = tuple(ds)
    for dis in ds:
        if dis.collapse.dims != h.dims:
            raise ValueError("dissipator dimensions do not match the Hamiltonian")
    d = h.dims.total
    ident = np.eye(d, dtype=complex)
    sup = -1j * (np.kron(h.matrix, ident) - np.kron(ident, h.matrix.T))
    for dis in ds:
        x = dis.collapse.matrix
        xdx = x.conj().T @ x
        sup += dis.rate * (
            np.kron(x, x.conj())
            - 0.5 * np.kron(xdx, ident)
            - 0.5 * np.kron(ident, xdx.T)
        )
    return LindbladGenerator(hamiltonian=h, dissipators=ds, dims=h.dims, superoperator=sup)


def propagator(gen: LindbladGenerator, t: float) -> Propagator:
    """exp(L t), memoized on the generator; t is in the generator's time units."""
    if t < 0:
        raise ValueError(f"duration must be >= 0, got {t}")
    cached = gen._propagator_cache.get(t)
    if cached is None:
        cached = Propagator(gen, t, expm(gen.superoperator * t))
        gen._propagator_cache[t] = cached
    return cached


def apply(prop: Propagator, rho: DensityMatrix) -> DensityMatrix:
    return prop.apply(rho)


def trace_distance(a: DensityMatrix, b: DensityMatrix) -> float:
    diff = a.matrix - b.matrix
    return 0.5 * float(np.sum(np.abs(np.linalg.eigvalsh(diff))))


def _unvec_state(v: np.ndarray, dims: HilbertDims) -> DensityMatrix:
    d = dims.total
    rho = v.reshape(d, d)
    rho = (rho + rho.conj().T) / 2
    tr = np.trace(rho).real
    if abs(tr) < 1e-14:
        raise NonUniqueSteadyStateError("null vector has vanishing trace")
    return DensityMatrix(dims, rho / tr)


def steady_state(gen: LindbladGenerator, method: str = "eig") -> DensityMatrix:
    """Stationary state of L, by null-space eigensolve or power iteration.

    The eigensolve checks that the null space is one-dimensional (relative
    tolerance NULLSPACE_RTOL on eigenvalue magnitudes); power iteration is the
    fallback for spaces too large to eig directly.
    """
    sup = gen.superoperator
    scale = float(np.max(np.abs(sup)))
    if scale == 0.0:
        raise NonUniqueSteadyStateError("zero generator: every state is stationary")
    if method == "eig":
        vals, vecs = np.linalg.eig(sup)
        null = np.flatnonzero(np.abs(vals) <= NULLSPACE_RTOL * scale)
        if len(null) != 1:
            raise NonUniqueSteadyStateError(
                f"null space dimension {len(null)}, expected 1")
        rho = _unvec_state(vecs[:, null[0]], gen.dims)
    elif method == "power":
        rho = _steady_state_power(gen, scale)
    else:
        raise ValueError(f"unknown method {method!r}")
    residual = float(np.max(np.abs(sup @ rho.matrix.reshape(-1))))
    if residual > RESIDUAL_RTOL * max(1.0, scale):
        raise NonUniqueSteadyStateError(
            f"candidate steady state has residual {residual:.3e}")
    return rho


def _steady_state_power(gen: LindbladGenerator, scale: float,
                        tol: float = 1e-10, max_iter: int = 1_000_000) -> DensityMatrix:
    d = gen.dims.total
    prop = propagator(gen, 1.0 / scale)
    rho = DensityMatrix(gen.dims, np.eye(d, dtype=complex) / d)
    for _ in range(max_iter):
        nxt = prop.apply(rho)
        if trace_distance(nxt, rho) < tol:
            return nxt
        rho = nxt
    raise ConvergenceError(f"power iteration did not converge in {max_iter} steps")


@dataclass(frozen=True)
class CoarseGrainedParams:
    """Effective pump: gain a^dag at alpha*p_e, loss a at alpha*(1-p_e)."""

    alpha: float
    p_e: float

    def __post_init__(self):
        if self.alpha <= 0:
            raise ValueError(f"alpha must be positive, got {self.alpha}")
        if not 0.0 <= self.p_e < 1.0:
            raise ValueError(f"p_e must lie in [0, 1), got {self.p_e}")


def coarse_grained_generator(p: CoarseGrainedParams, n_max: int) -> LindbladGenerator:
    """The coarse-grained engine bath on a truncated Fock space (free frame)."""
    b = boson_operators(n_max)
    zero = Operator(b.a.dims, np.zeros((n_max + 1, n_max + 1), dtype=complex))
    return build_generator(zero, [
        Dissipator(b.adag, p.alpha * p.p_e),
        Dissipator(b.a, p.alpha * (1.0 - p.p_e)),
    ])


def coarse_grained_steady_field(p: CoarseGrainedParams, omega: float):
    """Closed-form steady field below threshold: n_bar and T_f.

    Detailed balance fixes a geometric photon distribution with ratio
    p_e/(1-p_e), so n_bar = p_e/(1-2 p_e) and T_f = -omega/ln[p_e/(1-p_e)],
    independent of alpha (alpha only sets the relaxation speed).
    """
    if p.p_e >= 0.5:
        raise AboveThresholdError(
            f"p_e = {p.p_e} >= 1/2: maser threshold reached, no thermal steady state")
    if p.p_e == 0.0:
        return 0.0, 0.0
    nbar = p.p_e / (1.0 - 2.0 * p.p_e)
    t_f = -omega / np.log(p.p_e / (1.0 - p.p_e))
    return float(nbar), float(t_f)
