"""Dense multi-index tensor mechanics for finite-dimensional multipartite systems.

Parties are labelled 1..n in every public function. Flat indices are row-major
with party 1 as the most significant digit, so ``|j1 j2 ... jn>`` maps to
``j1*d2*...*dn + ... + jn``.
"""
import logging
from dataclasses import dataclass, field
from functools import reduce
from math import prod
from typing import Iterable, Sequence

import numpy as np

from errors import ArgumentError, PartyIndexError, ValidationError
from settings import SETTINGS

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class SubsystemDims:
    dims: tuple[int, ...]

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        if len(dims) < 1:
            raise ArgumentError("at least one party is required")
        if any(d < 1 for d in dims):
            raise ArgumentError(f"local dimensions must be positive, got {dims}")
        object.__setattr__(self, "dims", dims)

    @classmethod
    def of(cls, dims: "Sequence[int] | SubsystemDims") -> "SubsystemDims":
        if isinstance(dims, SubsystemDims):
            return dims
        return cls(tuple(dims))

    @property
    def n_parties(self) -> int:
        return len(self.dims)

    @property
    def total_dim(self) -> int:
        return prod(self.dims)

    def __len__(self) -> int:
        return len(self.dims)

    def __iter__(self):
        return iter(self.dims)

    def __getitem__(self, party: int) -> int:
        # 1-based, like every party label in this package
        return self.dims[self.axis(party)]

    def axis(self, party: int) -> int:
        if not 1 <= party <= len(self.dims):
            raise PartyIndexError(f"party {party} is not in 1..{len(self.dims)}")
        return party - 1

    def subset_dim(self, parties: Iterable[int]) -> int:
        return prod(self[p] for p in parties)

    def doubled(self) -> "SubsystemDims":
        return SubsystemDims(self.dims + self.dims)


@dataclass(frozen=True, eq=False)
class PureState:
    amplitudes: np.ndarray
    dims: SubsystemDims

    def __post_init__(self):
        dims = SubsystemDims.of(self.dims)
        amplitudes = np.array(self.amplitudes, dtype=np.complex128).reshape(-1)
        if amplitudes.size != dims.total_dim:
            raise ArgumentError(f"{amplitudes.size} amplitudes do not fit dims {dims.dims}")
        norm = np.linalg.norm(amplitudes)
        if abs(norm - 1.0) > SETTINGS.norm_tol:
            raise ValidationError(f"state is not normalized (norm {norm:.3e})")
        amplitudes.setflags(write=False)
        object.__setattr__(self, "amplitudes", amplitudes)
        object.__setattr__(self, "dims", dims)

    @classmethod
    def normalized(cls, amplitudes, dims) -> "PureState":
        amplitudes = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        norm = np.linalg.norm(amplitudes)
        if norm == 0.0:
            raise ArgumentError("cannot normalize the zero vector")
        return cls(amplitudes / norm, dims)

    def tensor(self) -> np.ndarray:
        return self.amplitudes.reshape(self.dims.dims)


@dataclass(frozen=True, eq=False)
class DensityOperator:
    matrix: np.ndarray
    dims: SubsystemDims

    def __post_init__(self):
        dims = SubsystemDims.of(self.dims)
        matrix = np.array(self.matrix, dtype=np.complex128)
        size = dims.total_dim
        if matrix.shape != (size, size):
            raise ArgumentError(f"density matrix of shape {matrix.shape} does not fit dims {dims.dims}")
        if np.max(np.abs(matrix - matrix.conj().T), initial=0.0) > SETTINGS.herm_tol:
            raise ValidationError("density operator is not Hermitian")
        if abs(np.trace(matrix) - 1.0) > SETTINGS.norm_tol:
            raise ValidationError(f"density operator has trace {np.trace(matrix).real:.12f}")
        if np.linalg.eigvalsh(matrix)[0] < -SETTINGS.psd_tol:
            raise ValidationError("density operator is not positive semidefinite")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "dims", dims)


@dataclass(frozen=True, eq=False)
class GateMatrix:
    matrix: np.ndarray
    dims: SubsystemDims
    tol: float = field(default=SETTINGS.unitary_tol, repr=False)

    def __post_init__(self):
        dims = SubsystemDims.of(self.dims)
        matrix = np.array(self.matrix, dtype=np.complex128)
        size = dims.total_dim
        if matrix.shape != (size, size):
            raise ArgumentError(f"gate of shape {matrix.shape} does not fit dims {dims.dims}")
        residual = unitarity_residual(matrix)
        if residual > self.tol:
            raise ValidationError(f"gate is not unitary (||U^dag U - I||_F = {residual:.3e})")
        matrix.setflags(write=False)
        object.__setattr__(self, "matrix", matrix)
        object.__setattr__(self, "dims", dims)

    @property
    def n_parties(self) -> int:
        return self.dims.n_parties


def unitarity_residual(matrix: np.ndarray) -> float:
    matrix = np.asarray(matrix)
    return float(np.linalg.norm(matrix.conj().T @ matrix - np.eye(matrix.shape[0])))


def validate_unitary(matrix, dims) -> GateMatrix:
    return GateMatrix(np.asarray(matrix), SubsystemDims.of(dims))


def flatten_index(multi_index: Sequence[int], dims) -> int:
    dims = SubsystemDims.of(dims)
    if len(multi_index) != dims.n_parties:
        raise PartyIndexError(f"expected {dims.n_parties} components, got {len(multi_index)}")
    for party, (j, d) in enumerate(zip(multi_index, dims), start=1):
        if not 0 <= j < d:
            raise PartyIndexError(f"index {j} of party {party} is outside 0..{d - 1}")
    return int(np.ravel_multi_index(tuple(int(j) for j in multi_index), dims.dims))


def unflatten_index(flat: int, dims) -> list[int]:
    dims = SubsystemDims.of(dims)
    if not 0 <= flat < dims.total_dim:
        raise PartyIndexError(f"flat index {flat} is outside 0..{dims.total_dim - 1}")
    return [int(j) for j in np.unravel_index(int(flat), dims.dims)]


def basis_state(multi_index: Sequence[int], dims) -> PureState:
    dims = SubsystemDims.of(dims)
    amplitudes = np.zeros(dims.total_dim, dtype=np.complex128)
    amplitudes[flatten_index(multi_index, dims)] = 1.0
    return PureState(amplitudes, dims)


def _check_parties(parties: Iterable[int], dims: SubsystemDims) -> tuple[int, ...]:
    parties = tuple(sorted(set(int(p) for p in parties)))
    for p in parties:
        if not 1 <= p <= dims.n_parties:
            raise ArgumentError(f"party {p} is not in 1..{dims.n_parties}")
    return parties


def _split_matrix(amplitudes: np.ndarray, dims: SubsystemDims, side: tuple[int, ...]) -> np.ndarray:
    """Reshape (batch, D) amplitudes into (batch, d_side, d_rest) with side parties as rows."""
    rest = tuple(p for p in range(1, dims.n_parties + 1) if p not in side)
    batch = amplitudes.shape[0]
    tensor = amplitudes.reshape((batch, *dims.dims))
    order = (0, *side, *rest)
    return tensor.transpose(order).reshape(batch, dims.subset_dim(side), dims.subset_dim(rest))


def _trace_out(rho: DensityOperator, kept: tuple[int, ...], traced: tuple[int, ...]) -> np.ndarray:
    dims = rho.dims
    n = dims.n_parties
    rows = [p - 1 for p in kept + traced]
    tensor = rho.matrix.reshape(dims.dims * 2).transpose(rows + [n + r for r in rows])
    d_kept, d_traced = dims.subset_dim(kept), dims.subset_dim(traced)
    return np.einsum("atbt->ab", tensor.reshape(d_kept, d_traced, d_kept, d_traced))


def partial_trace(state: PureState | DensityOperator, traced: Iterable[int]) -> DensityOperator:
    """Reduced density operator on the parties not in ``traced``.

    The result labels its parties 1..k in their original order, so a further
    trace of a reduced operator uses the new labels.
    """
    traced = _check_parties(traced, state.dims)
    kept = tuple(p for p in range(1, state.dims.n_parties + 1) if p not in traced)

    if isinstance(state, DensityOperator):
        rho = _trace_out(state, kept, traced)
    else:
        # Rows over kept parties, columns over traced ones: rho = A A^dag
        a = _split_matrix(state.amplitudes[np.newaxis, :], state.dims, kept)[0]
        rho = a @ a.conj().T

    kept_dims = SubsystemDims(tuple(state.dims[p] for p in kept)) if kept else SubsystemDims((1,))
    return DensityOperator(rho, kept_dims)


def purity(rho: DensityOperator) -> float:
    # tr(rho^2) = ||rho||_F^2 for Hermitian rho
    return float(np.sum(np.abs(rho.matrix) ** 2))


def purity_of_split(amplitudes: np.ndarray, dims, side: Iterable[int]) -> np.ndarray | float:
    """Purity of the reduction of pure state(s) onto ``side``.

    ``amplitudes`` is either a single vector of length D or a stack of shape
    (N, D); the result is a float or an array of N purities. The smaller of
    the two Gram matrices is formed, both have the same nonzero spectrum.
    """
    dims = SubsystemDims.of(dims)
    side = _check_parties(side, dims)
    amplitudes = np.asarray(amplitudes, dtype=np.complex128)
    single = amplitudes.ndim == 1
    stack = amplitudes[np.newaxis, :] if single else amplitudes

    a = _split_matrix(stack, dims, side)
    a_dag = a.conj().transpose(0, 2, 1)
    gram = a @ a_dag if a.shape[1] <= a.shape[2] else a_dag @ a
    values = np.sum(np.abs(gram) ** 2, axis=(1, 2))
    return float(values[0]) if single else values


def apply_gate(gate: GateMatrix, state: PureState) -> PureState:
    if gate.dims.total_dim != state.dims.total_dim:
        raise ArgumentError(
            f"gate acts on dimension {gate.dims.total_dim}, state has dimension {state.dims.total_dim}"
        )
    return PureState.normalized(gate.matrix @ state.amplitudes, state.dims)


def kron_all(factors: Sequence[np.ndarray]) -> np.ndarray:
    for k, factor in enumerate(factors):
        factor = np.asarray(factor)
        if factor.ndim != 2 or factor.shape[0] != factor.shape[1]:
            raise ArgumentError(f"factor {k} is not a square matrix (shape {factor.shape})")
    return reduce(np.kron, factors, np.eye(1, dtype=np.complex128))
