"""Random gate ensembles and the Monte Carlo oracle for the defining average.

Haar samples come from QR of a Ginibre matrix with the diagonal of R folded
back into Q, so that the factorization is unique and Q is Haar distributed.
Every sampler takes an explicit ``numpy.random.Generator``; ``RngSeed``
builds one over the counter-based Philox bit generator.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import permutations
from math import factorial
from typing import Callable, Iterator, Literal

import numpy as np

from entanglement import one_tangle_batch
from errors import ArgumentError, UnsupportedInputError
from settings import SETTINGS
from tensor_core import GateMatrix, PureState, SubsystemDims

logger = logging.getLogger(__name__)

MAX_PERMUTATION_DIM = 10
MC_CHUNK = 4096

Ensemble = Literal["cue", "cre", "cpe"]


@dataclass(frozen=True)
class RngSeed:
    seed: int = 0
    stream_id: int = 0

    def __post_init__(self):
        for name in ("seed", "stream_id"):
            value = getattr(self, name)
            if not 0 <= value < 2 ** 64:
                raise ArgumentError(f"{name} must be an unsigned 64-bit integer, got {value}")

    def spawn(self, offset: int) -> "RngSeed":
        return RngSeed(self.seed, self.stream_id + offset)


def rng_from_seed(seed: RngSeed) -> np.random.Generator:
    sequence = np.random.SeedSequence(seed.seed, spawn_key=(seed.stream_id,))
    return np.random.Generator(np.random.Philox(sequence))


@dataclass(frozen=True)
class MonteCarloEstimate:
    estimate: float
    std_error: float
    n_samples: int

    @classmethod
    def from_values(cls, values: np.ndarray) -> "MonteCarloEstimate":
        n = len(values)
        std_error = float(np.sqrt(np.var(values, ddof=1) / n)) if n > 1 else float("nan")
        return cls(estimate=float(np.mean(values)), std_error=std_error, n_samples=n)


def _ginibre(d: int, size: int, rng: np.random.Generator, complex_entries: bool) -> np.ndarray:
    z = rng.standard_normal((size, d, d))
    if complex_entries:
        z = (z + 1j * rng.standard_normal((size, d, d))) / np.sqrt(2)
    return z


def _fold_diagonal(q: np.ndarray, r: np.ndarray, complex_entries: bool) -> np.ndarray:
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    if complex_entries:
        phases = diag / np.abs(diag)
    else:
        phases = np.where(diag < 0, -1.0, 1.0)
    # scales column k of Q by the phase of R_kk
    return q * phases[..., np.newaxis, :]


def haar_unitary_stack(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if d < 1:
        raise ArgumentError(f"need d >= 1, got {d}")
    q, r = np.linalg.qr(_ginibre(d, size, rng, complex_entries=True))
    return _fold_diagonal(q, r, complex_entries=True)


def haar_orthogonal_stack(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if d < 1:
        raise ArgumentError(f"need d >= 1, got {d}")
    q, r = np.linalg.qr(_ginibre(d, size, rng, complex_entries=False))
    return _fold_diagonal(q, r, complex_entries=False)


def random_diagonal_stack(d: int, size: int, rng: np.random.Generator) -> np.ndarray:
    if d < 1:
        raise ArgumentError(f"need d >= 1, got {d}")
    phases = rng.uniform(0.0, 2.0 * np.pi, size=(size, d))
    stack = np.zeros((size, d, d), dtype=np.complex128)
    idx = np.arange(d)
    stack[:, idx, idx] = np.exp(1j * phases)
    return stack


def _as_gate(matrix: np.ndarray, d: int, dims) -> GateMatrix:
    return GateMatrix(matrix, SubsystemDims.of(dims) if dims is not None else SubsystemDims((d,)))


def haar_unitary(d: int, rng: np.random.Generator, dims=None) -> GateMatrix:
    return _as_gate(haar_unitary_stack(d, 1, rng)[0], d, dims)


def haar_orthogonal(d: int, rng: np.random.Generator, dims=None) -> GateMatrix:
    return _as_gate(haar_orthogonal_stack(d, 1, rng)[0], d, dims)


def random_diagonal_unitary(d: int, rng: np.random.Generator, dims=None) -> GateMatrix:
    return _as_gate(random_diagonal_stack(d, 1, rng)[0], d, dims)


def ensemble_sampler(name: Ensemble) -> Callable[[int, int, np.random.Generator], np.ndarray]:
    match name:
        case "cue":
            return haar_unitary_stack
        case "cre":
            return haar_orthogonal_stack
        case "cpe":
            return random_diagonal_stack
        case _:
            raise ArgumentError(f"unknown ensemble {name!r}, expected cue, cre or cpe")


def _check_permutation_dim(d: int) -> None:
    if d < 1:
        raise ArgumentError(f"need d >= 1, got {d}")
    if d > MAX_PERMUTATION_DIM:
        raise UnsupportedInputError(f"{d}! permutations is too many to enumerate (limit d <= {MAX_PERMUTATION_DIM})")


def permutation_matrix(word) -> np.ndarray:
    # column k carries a single 1 in row word[k], i.e. P|k> = |word[k]>
    word = np.asarray(word, dtype=np.intp)
    d = word.size
    matrix = np.zeros((d, d), dtype=np.complex128)
    matrix[word, np.arange(d)] = 1.0
    return matrix


def enumerate_permutation_matrices(d: int, dims=None) -> Iterator[GateMatrix]:
    _check_permutation_dim(d)
    for word in permutations(range(d)):
        yield _as_gate(permutation_matrix(word), d, dims)


def permutation_stack(d: int) -> np.ndarray:
    """All d! permutation matrices in lexicographic order of their words."""
    _check_permutation_dim(d)
    words = np.array(list(permutations(range(d))), dtype=np.intp)
    stack = np.zeros((factorial(d), d, d), dtype=np.complex128)
    stack[np.arange(len(words))[:, np.newaxis], words, np.arange(d)[np.newaxis, :]] = 1.0
    return stack


def random_product_states(dims, size: int, rng: np.random.Generator) -> np.ndarray:
    """(size, D) stack of product states, each local factor a normalized complex Gaussian."""
    dims = SubsystemDims.of(dims)
    states = np.ones((size, 1), dtype=np.complex128)
    for d in dims:
        local = rng.standard_normal((size, d)) + 1j * rng.standard_normal((size, d))
        local /= np.linalg.norm(local, axis=1, keepdims=True)
        states = (states[:, :, np.newaxis] * local[:, np.newaxis, :]).reshape(size, -1)
    return states


def random_product_state(dims, rng: np.random.Generator) -> PureState:
    dims = SubsystemDims.of(dims)
    return PureState.normalized(random_product_states(dims, 1, rng)[0], dims)


def _tangles(gate: GateMatrix, n_samples: int, rng: np.random.Generator) -> np.ndarray:
    parts = []
    done = 0
    while done < n_samples:
        chunk = min(MC_CHUNK, n_samples - done)
        states = random_product_states(gate.dims, chunk, rng) @ gate.matrix.T
        parts.append(one_tangle_batch(states, gate.dims))
        done += chunk
    return np.concatenate(parts) if parts else np.empty(0)


def _shard_sizes(n_samples: int, shards: int) -> list[int]:
    base, extra = divmod(n_samples, shards)
    return [base + (1 if k < extra else 0) for k in range(shards)]


def mc_entangling_power(
    gate: GateMatrix,
    n_samples: int,
    rng: np.random.Generator | RngSeed,
    shards: int = 1,
    workers: int | None = None,
) -> MonteCarloEstimate:
    """Sample mean and standard error of the one-tangle of U|psi_sep>.

    With an ``RngSeed`` the samples are split over ``shards`` independent
    streams (shard k uses stream_id + k) and merged in shard order, so the
    result depends on the seed and shard count but not on ``workers``.
    """
    if n_samples < 2:
        raise ArgumentError(f"need at least 2 samples, got {n_samples}")
    if gate.dims.n_parties < 2:
        raise ArgumentError("entangling power needs at least two parties")

    if isinstance(rng, np.random.Generator):
        if shards != 1:
            raise ArgumentError("sharding needs an RngSeed, not a shared generator")
        parts = [_tangles(gate, n_samples, rng)]
    else:
        if shards < 1:
            raise ArgumentError(f"shard count must be positive, got {shards}")
        sizes = _shard_sizes(n_samples, shards)
        generators = [rng_from_seed(rng.spawn(k)) for k in range(shards)]
        workers = SETTINGS.workers if workers is None else workers
        logger.debug("MC oracle: %d samples over %d shards, %d workers", n_samples, shards, workers)
        with ThreadPoolExecutor(max_workers=max(1, min(workers, shards))) as pool:
            parts = list(pool.map(lambda job: _tangles(gate, *job), zip(sizes, generators)))

    return MonteCarloEstimate.from_values(np.concatenate(parts))
