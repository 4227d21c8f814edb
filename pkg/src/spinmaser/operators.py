"""Spin and bosonic operator algebra on finite composite Hilbert spaces.

Everything is a dense complex matrix tagged with the ordered tuple of factor
dimensions it acts on. Kronecker ordering is fixed once: the leftmost factor is
the slowest index, i.e. kron(A, B) acts on dims (dim A, dim B). The largest
space in scope is a few thousand dimensions, where sparse formats buy nothing.

Bosonic ladder operators live here too (on a Fock space truncated at n_max)
because the cavity composite reuses embed/partial_trace.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

HERMITICITY_TOL = 1e-10
TRACE_TOL = 1e-10
# eigenvalue floor below exact zero absorbs round-off from repeated propagation
POSITIVITY_FLOOR = -1e-9


@dataclass(frozen=True)
class HilbertDims:
    """Ordered subsystem dimensions; total dimension is their product."""

    factors: tuple[int, ...]

    def __post_init__(self):
        fs = tuple(int(f) for f in self.factors)
        if not fs:
            raise ValueError("composite space needs at least one factor")
        if any(f < 2 for f in fs):
            raise ValueError(f"factor dimensions must be >= 2, got {fs}")
        object.__setattr__(self, "factors", fs)

    @property
    def total(self) -> int:
        return math.prod(self.factors)

    def __len__(self):
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __getitem__(self, i):
        return self.factors[i]


def _square(matrix, total: int) -> np.ndarray:
    m = np.asarray(matrix, dtype=complex)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {m.shape}")
    if m.shape[0] != total:
        raise ValueError(f"matrix side {m.shape[0]} does not match dims total {total}")
    m = np.ascontiguousarray(m)
    m.setflags(write=False)
    return m


@dataclass(frozen=True)
class Operator:
    """A complex square matrix on a composite space."""

    dims: HilbertDims
    matrix: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "matrix", _square(self.matrix, self.dims.total))

    def dag(self) -> "Operator":
        return Operator(self.dims, self.matrix.conj().T)

    def _check_dims(self, other: "Operator"):
        if self.dims != other.dims:
            raise ValueError(f"dimension mismatch: {self.dims.factors} vs {other.dims.factors}")

    def __add__(self, other: "Operator") -> "Operator":
        self._check_dims(other)
        return Operator(self.dims, self.matrix + other.matrix)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_dims(other)
        return Operator(self.dims, self.matrix - other.matrix)

    def __mul__(self, scalar) -> "Operator":
        return Operator(self.dims, self.matrix * complex(scalar))

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_dims(other)
        return Operator(self.dims, self.matrix @ other.matrix)


@dataclass(frozen=True)
class DensityMatrix:
    """Hermitian, unit-trace, positive matrix; the universal state carrier.

    Positivity is enforced down to POSITIVITY_FLOOR rather than exact zero so
    that states surviving long propagator chains still validate.
    """

    dims: HilbertDims
    matrix: np.ndarray

    def __post_init__(self):
        m = _square(self.matrix, self.dims.total)
        object.__setattr__(self, "matrix", m)
        herm = np.max(np.abs(m - m.conj().T))
        if herm > HERMITICITY_TOL:
            raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = np.trace(m)
        if abs(tr - 1.0) > TRACE_TOL:
            raise ValueError(f"trace {tr} differs from 1 beyond {TRACE_TOL}")
        low = float(np.linalg.eigvalsh(m)[0])
        if low < POSITIVITY_FLOOR:
            raise ValueError(f"negative eigenvalue {low:.3e} below floor {POSITIVITY_FLOOR}")


class SpinSet(NamedTuple):
    x: Operator
    y: Operator
    z: Operator
    plus: Operator
    minus: Operator


class BosonSet(NamedTuple):
    a: Operator
    adag: Operator
    number: Operator


def identity(dims: HilbertDims) -> Operator:
    return Operator(dims, np.eye(dims.total, dtype=complex))


def spin_operators(s) -> SpinSet:
    """Standard angular-momentum matrices for spin magnitude s.

    Basis ordered by decreasing magnetic quantum number, so S_z is
    diag(s, s-1, ..., -s) and the excited level of a spin-1/2 sits at index 0.
    """
    twos = 2 * s
    if twos != int(twos) or twos < 1:
        raise ValueError(f"spin must be a positive half-integer, got s={s}")
    d = int(twos) + 1
    m = s - np.arange(d)
    dims = HilbertDims((d,))
    sz = np.diag(m.astype(complex))
    sp = np.zeros((d, d), dtype=complex)
    # S+ |s,m> = sqrt(s(s+1) - m(m+1)) |s,m+1>; row k-1 holds m+1 = m[k]+1
    sp[np.arange(d - 1), np.arange(1, d)] = np.sqrt(s * (s + 1) - m[1:] * (m[1:] + 1))
    sm = sp.conj().T
    return SpinSet(
        x=Operator(dims, (sp + sm) / 2),
        y=Operator(dims, (sp - sm) / 2j),
        z=Operator(dims, sz),
        plus=Operator(dims, sp),
        minus=Operator(dims, sm),
    )


def boson_operators(n_max: int) -> BosonSet:
    """Annihilation, creation, and number operators on Fock space cut at n_max.

    [a, a^dag] = I holds everywhere except the last diagonal entry, the usual
    truncation artifact.
    """
    if n_max < 1:
        raise ValueError(f"n_max must be >= 1, got {n_max}")
    d = n_max + 1
    dims = HilbertDims((d,))
    a = np.zeros((d, d), dtype=complex)
    a[np.arange(d - 1), np.arange(1, d)] = np.sqrt(np.arange(1, d))
    return BosonSet(
        a=Operator(dims, a),
        adag=Operator(dims, a.conj().T),
        number=Operator(dims, np.diag(np.arange(d).astype(complex))),
    )


def embed(op: Operator, position: int, dims: HilbertDims) -> Operator:
    """Extend an operator on one factor to the composite by tensoring identities."""
    if not 0 <= position < len(dims):
        raise ValueError(f"position {position} out of range for {len(dims)} factors")
    if op.dims.total != dims[position]:
        raise ValueError(
            f"operator dimension {op.dims.total} does not match factor {position} "
            f"of size {dims[position]}"
        )
    pre = math.prod(dims.factors[:position])
    post = math.prod(dims.factors[position + 1:])
    m = np.kron(np.eye(pre), np.kron(op.matrix, np.eye(post)))
    return Operator(dims, m)


def collective_spin(n: int) -> SpinSet:
    """Collective spin S_alpha = (1/2) sum_i sigma_i_alpha on n qubits."""
    if n < 1:
        raise ValueError(f"need at least one spin, got n={n}")
    dims = HilbertDims((2,) * n)
    half = spin_operators(0.5)
    out = []
    for single in (half.x, half.y, half.z, half.plus, half.minus):
        total = np.zeros((dims.total, dims.total), dtype=complex)
        for i in range(n):
            total += embed(single, i, dims).matrix
        out.append(Operator(dims, total))
    return SpinSet(*out)


def partial_trace(state: DensityMatrix, keep) -> DensityMatrix:
    """Trace out every factor not in `keep`; kept factors stay in original order."""
    fs = state.dims.factors
    n = len(fs)
    kept = sorted(set(int(k) for k in keep))
    if not kept:
        raise ValueError("keep set must be nonempty")
    if kept[0] < 0 or kept[-1] >= n:
        raise ValueError(f"keep indices {kept} out of range for {n} factors")
    rho = state.matrix.reshape(fs + fs)
    # row axis i and column axis i share a letter when factor i is traced out
    rows = [chr(ord("a") + i) for i in range(n)]
    cols = [chr(ord("A") + i) if i in kept else rows[i] for i in range(n)]
    out = "".join(rows[i] for i in kept) + "".join(cols[i] for i in kept)
    red = np.einsum("".join(rows) + "".join(cols) + "->" + out, rho)
    d = math.prod(fs[i] for i in kept)
    return DensityMatrix(HilbertDims(tuple(fs[i] for i in kept)), red.reshape(d, d))
