"""Truncated Fock-space primitives for the joint cavity-mirror Hilbert space.

Conventions fixed here and imported everywhere else:

* joint index: ``i = k * mirror_dim + m`` (field-major; mirror index fast),
  so a joint state reshapes to ``(field_dim, mirror_dim)`` with C order;
* operators are sparse, built from ladder-operator triplets;
* coherent states are truncated Poisson series, renormalized to unit norm,
  and refuse to be built when the truncation loss exceeds 1e-8.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np
import scipy.sparse as sp

from .errors import TruncationError

# Joint dimensions above this allocate too much for a desk-scale run
# (states are fine, but dense reduced density matrices go quadratic).
MAX_JOINT_DIM = 1_000_000

HERMITICITY_ATOL = 1e-10
TRACE_ATOL = 1e-9
COHERENT_LOSS_TOL = 1e-8


@dataclass(frozen=True)
class FockDims:
    """Truncation sizes of the two oscillators; joint dimension is checked here."""

    field_dim: int
    mirror_dim: int

    def __post_init__(self):
        if self.field_dim < 2 or self.mirror_dim < 2:
            raise ValueError(f"each dimension must be >= 2, got {self}")
        if self.joint > MAX_JOINT_DIM:
            raise ValueError(
                f"joint dimension {self.joint} exceeds the memory budget {MAX_JOINT_DIM}"
            )

    @property
    def joint(self) -> int:
        return self.field_dim * self.mirror_dim


@dataclass
class JointState:
    """Pure state on the joint space, unit norm, field-major amplitude layout."""

    dims: FockDims
    amps: np.ndarray
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        self.amps = np.asarray(self.amps, dtype=np.complex128)
        if self.amps.shape != (self.dims.joint,):
            raise ValueError(
                f"amplitude length {self.amps.shape} does not match joint dim {self.dims.joint}"
            )
        nrm = np.linalg.norm(self.amps)
        if abs(nrm - 1.0) > 1e-6:
            raise ValueError(f"state norm {nrm} is not 1 within 1e-6")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    def as_matrix(self) -> np.ndarray:
        """View with shape (field_dim, mirror_dim)."""
        return self.amps.reshape(self.dims.field_dim, self.dims.mirror_dim)

    @classmethod
    def from_product(cls, dims: FockDims, field_vec, mirror_vec) -> "JointState":
        amps = np.kron(np.asarray(field_vec, dtype=np.complex128),
                       np.asarray(mirror_vec, dtype=np.complex128))
        return cls(dims, amps)


@dataclass
class DensityMatrix:
    """Hermitian, unit-trace matrix for one subsystem."""

    data: np.ndarray

    def __post_init__(self):
        self.data = np.asarray(self.data, dtype=np.complex128)
        if self.data.ndim != 2 or self.data.shape[0] != self.data.shape[1]:
            raise ValueError(f"density matrix must be square, got {self.data.shape}")
        herm = np.max(np.abs(self.data - self.data.conj().T))
        if herm > HERMITICITY_ATOL:
            raise ValueError(f"not Hermitian: max |rho - rho^dag| = {herm:.3e}")
        tr = self.data.trace()
        if abs(tr - 1.0) > TRACE_ATOL:
            raise ValueError(f"trace {tr} is not 1 within {TRACE_ATOL}")

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def purity(self) -> float:
        # Tr[rho^2] = sum |rho_ij|^2 for Hermitian rho
        return float(np.sum(np.abs(self.data) ** 2))


class SparseOperator:
    """Sparse matrix on one Fock space (or the joint one), triplet-backed.

    Thin wrapper over a scipy CSR matrix; the triplet constructor rejects
    duplicate (row, col) pairs and out-of-range indices so that hand-built
    operators fail loudly.
    """

    def __init__(self, dim: int, mat):
        if mat.shape != (dim, dim):
            raise ValueError(f"matrix shape {mat.shape} does not match dim {dim}")
        self.dim = dim
        self.mat = sp.csr_matrix(mat, dtype=np.complex128)

    @classmethod
    def from_triplets(cls, dim: int, entries) -> "SparseOperator":
        rows, cols, vals = [], [], []
        seen = set()
        for r, c, v in entries:
            if not (0 <= r < dim and 0 <= c < dim):
                raise ValueError(f"entry ({r}, {c}) outside dimension {dim}")
            if (r, c) in seen:
                raise ValueError(f"duplicate entry at ({r}, {c})")
            seen.add((r, c))
            rows.append(r)
            cols.append(c)
            vals.append(v)
        mat = sp.coo_matrix((vals, (rows, cols)), shape=(dim, dim), dtype=np.complex128)
        return cls(dim, mat)

    def to_triplets(self):
        coo = self.mat.tocoo()
        return list(zip(coo.row.tolist(), coo.col.tolist(), coo.data.tolist()))

    def dagger(self) -> "SparseOperator":
        return SparseOperator(self.dim, self.mat.conj().T)

    def apply(self, vec: np.ndarray) -> np.ndarray:
        return self.mat @ vec

    def expectation(self, vec: np.ndarray) -> complex:
        return complex(np.vdot(vec, self.mat @ vec))

    def __add__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(self.dim, self.mat + other.mat)

    def __sub__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(self.dim, self.mat - other.mat)

    def __mul__(self, scalar) -> "SparseOperator":
        return SparseOperator(self.dim, self.mat * scalar)

    __rmul__ = __mul__

    def __matmul__(self, other: "SparseOperator") -> "SparseOperator":
        return SparseOperator(self.dim, self.mat @ other.mat)


class LadderOps(NamedTuple):
    lower: SparseOperator
    raise_: SparseOperator
    number: SparseOperator


def ladder_ops(dim: int) -> LadderOps:
    """Truncated lowering, raising and number operators on a dim-level space.

    On the truncated space raise_ @ lower equals the number operator exactly,
    while the commutator [lower, raise_] deviates from identity in the top
    level only (a -dim term at (dim-1, dim-1)).
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    sq = np.sqrt(np.arange(1, dim))
    lower = sp.diags(sq, 1, shape=(dim, dim))
    number = sp.diags(np.arange(dim, dtype=float), 0)
    return LadderOps(
        lower=SparseOperator(dim, lower),
        raise_=SparseOperator(dim, lower.T),
        number=SparseOperator(dim, number),
    )


def coherent_amplitudes(dim: int, amp: complex):
    """Truncated coherent-state series and its norm loss, without renormalizing.

    Amplitudes follow c_k = c_{k-1} * amp / sqrt(k) from c_0 = e^{-|amp|^2/2},
    which stays bounded for any |amp| (each c_k is a Poisson amplitude).
    """
    c = np.zeros(dim, dtype=np.complex128)
    c[0] = math.exp(-abs(amp) ** 2 / 2.0)
    for k in range(1, dim):
        c[k] = c[k - 1] * amp / math.sqrt(k)
    loss = 1.0 - float(np.sum(np.abs(c) ** 2))
    return c, max(loss, 0.0)


def coherent_required_dim(amp: complex, loss_tol: float = COHERENT_LOSS_TOL) -> int:
    """Smallest dimension whose Poisson tail beyond it stays under loss_tol."""
    mu = abs(amp) ** 2
    # walk the Poisson tail; start from a safe underestimate
    d = max(2, int(mu))
    log_term = -mu  # log of Poisson pmf at k=0
    acc = math.exp(log_term)
    k = 0
    while k < d - 1:
        k += 1
        log_term += math.log(mu / k) if mu > 0 else -math.inf
        acc += math.exp(log_term)
    while 1.0 - acc > loss_tol:
        d += 1
        k += 1
        log_term += math.log(mu / k)
        acc += math.exp(log_term)
    return d


def coherent_state(dim: int, amp: complex) -> np.ndarray:
    """Normalized truncated coherent state |amp> on a dim-level space.

    Raises TruncationError (with the smallest adequate dimension) when the
    truncation loss exceeds 1e-8.
    """
    if dim < 2:
        raise ValueError(f"dim must be >= 2, got {dim}")
    c, loss = coherent_amplitudes(dim, amp)
    if loss > COHERENT_LOSS_TOL:
        need = coherent_required_dim(amp)
        raise TruncationError(
            f"coherent amplitude |{amp}| needs dim >= {need}, got {dim} "
            f"(truncation loss {loss:.3e})",
            required_dim=need,
        )
    return c / np.linalg.norm(c)


def tensor(op_field: SparseOperator, op_mirror: SparseOperator) -> SparseOperator:
    """Kronecker product in the fixed field-major convention."""
    return SparseOperator(op_field.dim * op_mirror.dim,
                          sp.kron(op_field.mat, op_mirror.mat, format="csr"))


def partial_trace_field(state: JointState) -> DensityMatrix:
    """Trace out the field, returning the mirror density matrix.

    rho_m[i, j] = sum_k psi[k, i] psi*[k, j]; note psi.T @ psi.conj(), not
    psi^dag @ psi, which would transpose the result and flip the momentum
    sign of anything computed from it.
    """
    psi = state.as_matrix()
    return DensityMatrix(psi.T @ psi.conj())


def partial_trace_mirror(state: JointState) -> DensityMatrix:
    """Trace out the mirror, returning the field density matrix."""
    psi = state.as_matrix()
    return DensityMatrix(psi @ psi.conj().T)


def recommend_mirror_dim(gamma_abs: float, g_ratio: float, k_max: int) -> int:
    """Mirror truncation covering every conditional displacement up to k_max.

    The k-th field level drags the mirror to |Gamma_k| <= |Gamma| + 2 k g, a
    Poisson state of mean x^2; mean + 5 sqrt(mean) covers its tail.
    """
    x = gamma_abs + 2.0 * k_max * g_ratio
    return int(math.ceil(x * x + 5.0 * x))


def recommend_field_dim(mu: float) -> int:
    """Field truncation for a coherent-scale mean photon number mu."""
    return max(16, int(math.ceil(mu + 5.0 * math.sqrt(mu) + 8.0)))
