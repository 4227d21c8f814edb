"""Two-stage micromaser engine pumped by thermal central spins.

Each cycle injects one fuel atom (diagonal state p_e|e><e| + p_g|g><g|) into
the cavity for a transit time tau, then lets the empty cavity ring down for
tau0 = 1/r - tau, where r = N_ex * kappa is the injection rate.

Stage 1 evolves atom+field under the resonant Jaynes-Cummings interaction with
losses,

    d rho/dt = -i[H_I, rho] + gamma D[sigma_-] rho + kappa D[a] rho,
    H_I = g (sigma_+ a + sigma_- a^dag),

and stage 2 is the bare cavity decay kappa D[a]. Both stages are written in
the frame rotating at the common frequency Omega: on resonance the free part
Omega(a^dag a + sigma_z/2) commutes with H_I and both dissipators are
invariant under the rotation, so populations and n_bar are frame-independent,
while integrating 50 GHz phases over microsecond spans would be numerically
hopeless. The cold bath enters the dissipators at zero temperature
(n_bar_b ~ 0.002); the bath temperature only sets the initial cavity state.

The composed per-cycle cavity map is cached as a dense (n_max+1)^2 square
matrix: the joint stage-1 exponential is the one expensive object (side
(2(n_max+1))^2), and contracting the atom out of it once makes every later
cycle, N_ex variant, and sweep point cheap.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from functools import lru_cache

import numpy as np
from scipy.linalg import lu_factor, lu_solve

from .errors import (
    ConvergenceError,
    CutoffError,
    InfeasibleScheduleError,
    ModelViolationError,
    PhysicsError,
    PopulationInversionError,
)
from .fuel import (
    CentralSpinState,
    CollectiveModelParams,
    carnot_efficiency,
    central_spin_state,
    effective_temperature,
)
from .lindblad import (
    Dissipator,
    Propagator,
    build_generator,
    propagator,
    trace_distance,
)
from .operators import (
    DensityMatrix,
    HilbertDims,
    Operator,
    boson_operators,
    embed,
    spin_operators,
)

TAIL_TOL = 1e-8


@dataclass(frozen=True)
class MicromaserParams:
    """Physical cavity/atom rates, all angular frequencies in rad/s.

    omega_over_tb fixes the bath temperature relative to the common resonant
    frequency (fuel side works in units of T_b); kappa = 0 is the lossless
    limit in which stage 2 collapses to the identity.
    """

    Omega: float
    g: float
    kappa: float
    gamma: float
    tau: float
    N_ex: float
    n_max: int = 30
    omega_over_tb: float = 6.0

    def __post_init__(self):
        if self.Omega <= 0:
            raise ValueError(f"Omega must be positive, got {self.Omega}")
        if self.g < 0 or self.kappa < 0 or self.gamma < 0:
            raise ValueError("rates g, kappa, gamma must be >= 0")
        if self.tau <= 0:
            raise ValueError(f"transit time must be positive, got {self.tau}")
        if self.N_ex < 1:
            raise ValueError(f"N_ex must be >= 1, got {self.N_ex}")
        if self.n_max < 10:
            raise ValueError(f"n_max must be >= 10, got {self.n_max}")
        if self.omega_over_tb <= 0:
            raise ValueError("omega_over_tb must be positive")
        if self.kappa > 0:
            injection_schedule(self.N_ex, self.kappa, self.tau)  # feasibility

    @classmethod
    def from_paper_units(cls, omega_2pi_hz, q, gamma_2pi_hz, g_pi_hz, tau_s, n_ex,
                         n_max=30, omega_over_tb=6.0):
        """Constructor in the nu/2pi, Q, g/pi conventions to avoid 2pi slips."""
        omega = 2 * math.pi * omega_2pi_hz
        return cls(
            Omega=omega,
            g=math.pi * g_pi_hz,
            kappa=omega / q,
            gamma=2 * math.pi * gamma_2pi_hz,
            tau=tau_s,
            N_ex=n_ex,
            n_max=n_max,
            omega_over_tb=omega_over_tb,
        )

    @property
    def r(self) -> float:
        if self.kappa == 0:
            return 1.0 / self.tau
        return injection_schedule(self.N_ex, self.kappa, self.tau)[0]

    @property
    def tau0(self) -> float:
        if self.kappa == 0:
            return 0.0
        return injection_schedule(self.N_ex, self.kappa, self.tau)[1]

    @property
    def cycle_period(self) -> float:
        return self.tau + self.tau0


@dataclass(frozen=True)
class CycleState:
    """Cavity state after a cycle; construction enforces the cutoff invariant."""

    cavity: DensityMatrix
    cycle_index: int
    elapsed: float

    def __post_init__(self):
        tail = float(self.cavity.matrix[-1, -1].real)
        if tail > TAIL_TOL:
            raise CutoffError(
                f"top Fock state holds {tail:.3e} at cycle {self.cycle_index}; "
                "raise n_max")


@dataclass(frozen=True)
class TemperatureTrace:
    """Per-cycle history of (elapsed seconds, n_bar_c, T_f/T_b)."""

    samples: tuple
    converged: bool
    steady_T_f: float
    steady_nbar: float

    def __post_init__(self):
        times = [s[0] for s in self.samples]
        if any(b <= a for a, b in zip(times, times[1:])):
            raise ValueError("sample times must be strictly increasing")
        for _, nbar, tf in self.samples:
            if nbar > 0 and not math.isfinite(tf):
                raise ValueError("T_f must be finite whenever n_bar > 0")


def injection_schedule(n_ex, kappa, tau):
    """r = N_ex * kappa and idle time tau0 = 1/r - tau."""
    if n_ex < 1:
        raise ValueError(f"N_ex must be >= 1, got {n_ex}")
    if kappa <= 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if tau <= 0:
        raise ValueError(f"tau must be positive, got {tau}")
    r = n_ex * kappa
    tau0 = 1.0 / r - tau
    if tau0 <= 0:
        raise InfeasibleScheduleError(
            f"1/r = {1.0 / r:.3e} s does not exceed the transit time {tau:.3e} s; "
            f"N_ex = {n_ex} atoms per lifetime cannot be injected")
    return r, tau0


def thermal_field(n_max: int, nbar: float) -> DensityMatrix:
    """Thermal (geometric) Fock state, renormalized on the truncated space."""
    if nbar < 0:
        raise ValueError(f"nbar must be >= 0, got {nbar}")
    dims = HilbertDims((n_max + 1,))
    if nbar == 0:
        w = np.zeros(n_max + 1)
        w[0] = 1.0
    else:
        w = (nbar / (1 + nbar)) ** np.arange(n_max + 1)
        w = w / w.sum()
    return DensityMatrix(dims, np.diag(w).astype(complex))


def mean_photons(rho_c: DensityMatrix) -> float:
    return float(np.arange(rho_c.dims.total) @ np.diag(rho_c.matrix).real)


def field_temperature(rho_c: DensityMatrix, omega: float) -> float:
    """T_f = Omega / ln(1 + 1/n_bar), in omega's units; 0 for an empty field."""
    nbar = mean_photons(rho_c)
    if nbar <= 0:
        return 0.0
    return omega / math.log(1.0 + 1.0 / nbar)


def temperature_ratio(nbar: float, omega_over_tb: float) -> float:
    if nbar <= 0:
        return 0.0
    return omega_over_tb / math.log(1.0 + 1.0 / nbar)


@lru_cache(maxsize=1)
def _stage1_generator(g, kappa, gamma, n_max):
    dims = HilbertDims((2, n_max + 1))
    half = spin_operators(0.5)
    b = boson_operators(n_max)
    sp = embed(half.plus, 0, dims)
    sm = embed(half.minus, 0, dims)
    a = embed(b.a, 1, dims)
    h_i = g * (sp @ a + sm @ a.dag())
    ds = []
    if gamma > 0:
        ds.append(Dissipator(sm, gamma))
    if kappa > 0:
        ds.append(Dissipator(a, kappa))
    return build_generator(h_i, ds)


@lru_cache(maxsize=2)
def _stage2_generator(kappa, n_max):
    b = boson_operators(n_max)
    zero = Operator(b.a.dims, np.zeros((n_max + 1, n_max + 1), dtype=complex))
    ds = [Dissipator(b.a, kappa)] if kappa > 0 else []
    return build_generator(zero, ds)


def stage_propagators(p: MicromaserParams, fuel: CentralSpinState):
    """Cached finite-time maps: joint atom+field transit, then empty ringdown."""
    _check_fuel(p, fuel)
    p1 = propagator(_stage1_generator(p.g, p.kappa, p.gamma, p.n_max), p.tau)
    p2 = propagator(_stage2_generator(p.kappa, p.n_max), p.tau0)
    _probe_cutoff(p, fuel, p1)
    return p1, p2


def _check_fuel(p: MicromaserParams, fuel: CentralSpinState):
    if fuel.p_e >= 0.5:
        raise PopulationInversionError(
            f"fuel p_e = {fuel.p_e} >= 1/2: pump inverted, engine analysis invalid")
    if abs(fuel.omega - p.omega_over_tb) > 1e-9:
        raise ValueError(
            f"fuel omega/T_b = {fuel.omega} does not match params "
            f"omega_over_tb = {p.omega_over_tb}")


def _probe_cutoff(p: MicromaserParams, fuel: CentralSpinState, p1: Propagator):
    # one transit from the initial thermal field must not reach the top state
    f = p.n_max + 1
    field0 = thermal_field(p.n_max, _bath_nbar(p))
    atom = np.diag([fuel.p_e, fuel.p_g]).astype(complex)
    joint = np.kron(atom, field0.matrix)
    out = (p1.matrix @ joint.reshape(-1)).reshape(2, f, 2, f)
    tail = out[0, -1, 0, -1].real + out[1, -1, 1, -1].real
    if tail > TAIL_TOL:
        raise CutoffError(f"one transit already puts {tail:.3e} in the top Fock state")


def _bath_nbar(p: MicromaserParams) -> float:
    return 1.0 / (math.exp(p.omega_over_tb) - 1.0)


@lru_cache(maxsize=2)
def _stage1_contraction(g, kappa, gamma, tau, n_max):
    """Atom-traced stage-1 tensor K[a, b, p, q, r, s].

    K contracts the joint propagator with an atom input pair (a, b) and the
    outgoing atom traced out, leaving a map on field index pairs (r, s) ->
    (p, q). The joint superoperator is only needed transiently here.
    """
    gen = _stage1_generator(g, kappa, gamma, n_max)
    p1 = propagator(gen, tau)
    f = n_max + 1
    e8 = p1.matrix.reshape(2, f, 2, f, 2, f, 2, f)
    return np.ascontiguousarray(np.einsum("xpxqarbs->abpqrs", e8))


def cycle_map(p: MicromaserParams, fuel: CentralSpinState) -> np.ndarray:
    """Dense per-cycle map on the vectorized cavity state."""
    _check_fuel(p, fuel)
    f = p.n_max + 1
    k = _stage1_contraction(p.g, p.kappa, p.gamma, p.tau, p.n_max)
    atom = np.diag([fuel.p_e, fuel.p_g]).astype(complex)
    m1 = np.einsum("ab,abpqrs->pqrs", atom, k).reshape(f * f, f * f)
    p2 = propagator(_stage2_generator(p.kappa, p.n_max), p.tau0)
    return p2.matrix @ m1


def _cavity_from_vec(v: np.ndarray, n_max: int, cycle_index: int, elapsed: float) -> CycleState:
    f = n_max + 1
    rho = v.reshape(f, f)
    rho = (rho + rho.conj().T) / 2
    return CycleState(DensityMatrix(HilbertDims((f,)), rho), cycle_index, elapsed)


def run_cycles(p: MicromaserParams, fuel: CentralSpinState,
               tol: float = 1e-8, window: int = 50,
               max_cycles: int = 1_000_000) -> TemperatureTrace:
    """Iterate the engine from a cavity thermalized at T_b.

    Records (elapsed seconds, n_bar, T_f/T_b) every cycle and stops once the
    relative change of T_f stays below tol for `window` consecutive cycles.
    A trace that hits max_cycles is returned with converged=False.
    """
    m = cycle_map(p, fuel)
    f = p.n_max + 1
    numbers = np.arange(f)
    period = p.cycle_period

    state = thermal_field(p.n_max, _bath_nbar(p))
    vec = state.matrix.reshape(-1).copy()
    nbar = mean_photons(state)
    samples = [(0.0, nbar, temperature_ratio(nbar, p.omega_over_tb))]

    converged = False
    quiet = 0
    last_tf = samples[0][2]
    for cycle in range(1, max_cycles + 1):
        vec = m @ vec
        elapsed = cycle * period
        cs = _cavity_from_vec(vec, p.n_max, cycle, elapsed)  # enforces invariants
        nbar = float(numbers @ np.diag(cs.cavity.matrix).real)
        tf = temperature_ratio(nbar, p.omega_over_tb)
        samples.append((elapsed, nbar, tf))
        if last_tf != 0 and abs(tf - last_tf) <= tol * abs(last_tf):
            quiet += 1
            if quiet >= window:
                converged = True
                break
        else:
            quiet = 0
        last_tf = tf

    steady_tf = samples[-1][2]
    t_q = effective_temperature(fuel).T_q
    if steady_tf > t_q * (1 + 1e-9):
        raise ModelViolationError(
            f"steady T_f/T_b = {steady_tf} exceeds the pump T_q/T_b = {t_q}")
    return TemperatureTrace(tuple(samples), converged, steady_tf, samples[-1][1])


def fixed_point(m: np.ndarray, n_max: int, method: str = "eigen",
                start: DensityMatrix | None = None) -> DensityMatrix:
    """Fixed point of a per-cycle cavity map.

    "eigen" runs shifted inverse iteration targeting the eigenvalue 1 of the
    trace-preserving map (a null-space eigensolve in disguise); "power" simply
    iterates the map from a thermal start. Both end validated.
    """
    f = n_max + 1
    if start is None:
        start = thermal_field(n_max, 0.1)
    if method == "eigen":
        lu = lu_factor(m - (1.0 + 1e-9) * np.eye(m.shape[0]))
        v = start.matrix.reshape(-1).copy()
        for _ in range(100):
            w = lu_solve(lu, v)
            w /= np.linalg.norm(w)
            if np.max(np.abs(m @ w - w)) < 1e-12:
                break
            v = w
        else:
            raise ConvergenceError("inverse iteration stalled on the cycle map")
        rho = w.reshape(f, f)
        rho = (rho + rho.conj().T) / 2
        rho /= np.trace(rho).real
    elif method == "power":
        vec = start.matrix.reshape(-1).copy()
        for _ in range(1_000_000):
            nxt = m @ vec
            if np.max(np.abs(nxt - vec)) < 1e-13:
                vec = nxt
                break
            vec = nxt
        else:
            raise ConvergenceError("power iteration stalled on the cycle map")
        rho = vec.reshape(f, f)
        rho = (rho + rho.conj().T) / 2
        rho /= np.trace(rho).real
    else:
        raise ValueError(f"unknown method {method!r}")
    state = DensityMatrix(HilbertDims((f,)), rho)
    CycleState(state, -1, 0.0)  # runs the tail check
    return state


def steady_cavity_state(p: MicromaserParams, fuel: CentralSpinState,
                        method: str = "eigen") -> DensityMatrix:
    return fixed_point(cycle_map(p, fuel), p.n_max, method)


def steady_field_ratio(p: MicromaserParams, fuel: CentralSpinState) -> float:
    """Steady T_f/T_b of the engine at these parameters."""
    return temperature_ratio(mean_photons(steady_cavity_state(p, fuel)),
                             p.omega_over_tb)


def cutoff_convergence(p: MicromaserParams, fuel: CentralSpinState,
                       factor: int = 2) -> float:
    """Relative steady-T_f change when the Fock cutoff is multiplied by factor."""
    base = steady_field_ratio(p, fuel)
    wide = steady_field_ratio(replace(p, n_max=factor * p.n_max), fuel)
    return abs(wide - base) / base


def steady_sweep(omega: float, j: float, lam_values, s_values, columns,
                 t_b: float = 1.0):
    """Steady T_f/T_b over a fuel grid for several loss settings.

    columns maps a label to MicromaserParams, or to None for the coarse-grained
    (lossless) reference where T_f = T_q. Rows come out in deterministic grid
    order (lambda outer, S inner); per-point physics failures are recorded in
    the row's errors list and the sweep continues.
    """
    rows = []
    for lam in lam_values:
        for s in s_values:
            fuel = central_spin_state(CollectiveModelParams(omega, j, lam, s), t_b)
            # the engine consumes the pump in units of T_b
            pump = CentralSpinState(p_e=fuel.p_e, omega=omega / t_b)
            row = {"lambda": lam, "S": s, "p_e": fuel.p_e, "errors": []}
            try:
                t_q = effective_temperature(fuel).T_q
                row["tq_over_tb"] = t_q / t_b
                row["eta"] = carnot_efficiency(t_q, t_b)
            except PhysicsError as exc:
                row.setdefault("tq_over_tb", None)
                row["eta"] = None
                row["errors"].append(f"fuel: {exc}")
            for label, mp in columns.items():
                try:
                    if mp is None:
                        row[label] = row["tq_over_tb"]  # coarse-grained: T_f = T_q
                    else:
                        row[label] = steady_field_ratio(mp, pump)
                except Exception as exc:  # record, keep sweeping
                    row[label] = None
                    row["errors"].append(f"{label}: {exc}")
            rows.append(row)
    return rows
