"""Entangling power with respect to the one-tangle.

The default path is the Choi-state (geometric) form: for a cut p|q of the
physical parties,

    eps_{p|q}(U) = 2 [1 - prod_i d_i/(d_i+1) * sum_{x'} tr(tr_{p x'} |U><U|)^2]

where x' runs over all 2^n subsets of the primed parties, trivial ones
included. The basis-explicit contraction is kept as an independent oracle for
small tripartite gates.

Analytic means and bounds are exact ``Fraction`` values; callers convert to
float where they print or compare against sampled numbers.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, prod

import numpy as np

from entanglement import Bipartition, bipartitions, enumerate_bipartitions, ExtendedBipartition
from errors import ArgumentError, UnsupportedInputError
from tensor_core import GateMatrix, PureState, SubsystemDims, purity_of_split

logger = logging.getLogger(__name__)

INDEXFORM_MAX_DIM = 16


@dataclass(frozen=True)
class EPowerReport:
    per_bipartition: dict[Bipartition, float]
    total: float
    dims: SubsystemDims

    def as_dict(self) -> dict:
        return {
            "dims": list(self.dims.dims),
            "per_bipartition": {split.label(): value for split, value in self.per_bipartition.items()},
            "total": self.total,
        }


@dataclass(frozen=True)
class GroupMeanInputs:
    dims: SubsystemDims
    A: Fraction | None
    B: Fraction
    C: Fraction
    D: Fraction


@dataclass(frozen=True)
class BoundGap:
    extended: ExtendedBipartition
    weight: float
    max_tangle: Fraction
    tangle: float

    @property
    def gap(self) -> float:
        return float(self.max_tangle) - self.tangle


def _local_weight(dims: SubsystemDims) -> float:
    return float(prod(Fraction(d, d + 1) for d in dims))


def _choi_amplitudes(matrices: np.ndarray) -> np.ndarray:
    matrices = np.asarray(matrices, dtype=np.complex128)
    size = matrices.shape[-1]
    return matrices.reshape(matrices.shape[0], size * size) / np.sqrt(size)


def choi_state(gate: GateMatrix) -> PureState:
    amplitudes = _choi_amplitudes(gate.matrix[np.newaxis])[0]
    # renormalize: unitarity is only checked to UNITARY_TOL, looser than NORM_TOL
    return PureState.normalized(amplitudes, gate.dims.doubled())


def _check_split(dims: SubsystemDims, split: Bipartition) -> None:
    if split.n_parties != dims.n_parties:
        raise ArgumentError(f"bipartition over {split.n_parties} parties used on a {dims.n_parties}-party gate")
    if split.is_trivial():
        raise ArgumentError(f"bipartition {split.label()} is trivial")


def _split_epower_batch(choi: np.ndarray, dims: SubsystemDims, split: Bipartition) -> np.ndarray:
    doubled = dims.doubled()
    weight = _local_weight(dims)
    total = np.zeros(choi.shape[0])
    # fixed ascending-bitmask order of x' keeps sums bitwise reproducible
    for primed in enumerate_bipartitions(dims.n_parties, "ordered_with_trivial"):
        side = ExtendedBipartition(split, primed).side()
        total += purity_of_split(choi, doubled, side)
    return 2.0 * (1.0 - weight * total)


def epower_bipartition(gate: GateMatrix, split: Bipartition) -> float:
    _check_split(gate.dims, split)
    choi = _choi_amplitudes(gate.matrix[np.newaxis])
    return float(_split_epower_batch(choi, gate.dims, split)[0])


def epower_one_tangle(gate: GateMatrix) -> EPowerReport:
    dims = gate.dims
    if dims.n_parties < 2:
        raise ArgumentError("entangling power needs at least two parties")
    choi = _choi_amplitudes(gate.matrix[np.newaxis])
    per_split = {split: float(_split_epower_batch(choi, dims, split)[0]) for split in bipartitions(dims.n_parties)}
    total = sum(per_split.values()) / len(per_split)
    return EPowerReport(per_bipartition=per_split, total=total, dims=dims)


def epower_one_tangle_batch(matrices: np.ndarray, dims) -> np.ndarray:
    """eps_1 of every gate in an (N, D, D) stack. Unitarity is not re-checked."""
    dims = SubsystemDims.of(dims)
    if dims.n_parties < 2:
        raise ArgumentError("entangling power needs at least two parties")
    matrices = np.asarray(matrices, dtype=np.complex128)
    size = dims.total_dim
    if matrices.ndim != 3 or matrices.shape[1:] != (size, size):
        raise ArgumentError(f"expected an (N, {size}, {size}) stack, got shape {matrices.shape}")

    choi = _choi_amplitudes(matrices)
    splits = bipartitions(dims.n_parties)
    total = np.zeros(matrices.shape[0])
    for split in splits:
        total += _split_epower_batch(choi, dims, split)
    return total / len(splits)


def epower_bipartition_indexform(gate: GateMatrix, split: Bipartition) -> float:
    """Basis-explicit form for a tripartite gate and cut ab|c.

    Contracts U, U^dag, U, U^dag with the six Kronecker deltas of the cut and
    the pairings u_r = delta(r1,r2) delta(r3,r4) + delta(r1,r4) delta(r3,r2)
    for every party; the prefactor is prod_i 1/(d_i(d_i+1)).
    """
    dims = gate.dims
    if dims.n_parties != 3:
        raise UnsupportedInputError(f"the index form is tripartite only, got {dims.n_parties} parties")
    if dims.total_dim > INDEXFORM_MAX_DIM:
        raise UnsupportedInputError(f"the index form is limited to total dimension {INDEXFORM_MAX_DIM}")
    _check_split(dims, split)

    single = split.left if len(split.left) == 1 else split.right
    (c,) = single
    c -= 1

    u6 = gate.matrix.reshape(dims.dims + dims.dims)
    letters = iter("abcdefghijklmnopqrstuvwxyz")
    big_i = [next(letters) for _ in range(3)]
    big_k = [next(letters) for _ in range(3)]
    r_first = [next(letters) for _ in range(3)]
    r_second = [next(letters) for _ in range(3)]

    # deltas of the cut: l_a=i_a, l_b=i_b, j_c=i_c, j_a=k_a, j_b=k_b, l_c=k_c
    out_i = big_i
    out_k = big_k
    out_j = [big_i[m] if m == c else big_k[m] for m in range(3)]
    out_l = [big_k[m] if m == c else big_i[m] for m in range(3)]

    total = 0.0 + 0.0j
    for crossed in product((False, True), repeat=3):
        r1, r2, r3, r4 = [], [], [], []
        for m in range(3):
            x, y = r_first[m], r_second[m]
            r1.append(x)
            r3.append(y)
            if crossed[m]:
                r2.append(y)
                r4.append(x)
            else:
                r2.append(x)
                r4.append(y)
        subscripts = ",".join(
            "".join(out) + "".join(inn)
            for out, inn in ((out_i, r1), (out_j, r2), (out_k, r3), (out_l, r4))
        )
        total += np.einsum(f"{subscripts}->", u6, u6.conj(), u6, u6.conj(), optimize=True)

    prefactor = float(prod(Fraction(1, d * (d + 1)) for d in dims))
    return float(2.0 * (1.0 - prefactor * total.real))


def bound_gap_terms(gate: GateMatrix, split: Bipartition) -> list[BoundGap]:
    """Per-x' terms whose weighted sum is upper_bound_bipartition - epower_bipartition."""
    dims = gate.dims
    _check_split(dims, split)
    choi = choi_state(gate)
    doubled = dims.doubled()
    weight = _local_weight(dims)

    gaps = []
    for primed in enumerate_bipartitions(dims.n_parties, "ordered_with_trivial"):
        extended = ExtendedBipartition(split, primed)
        side = extended.side()
        m = _min_side_dim(dims, split, primed)
        tangle = 2.0 * (1.0 - purity_of_split(choi.amplitudes, doubled, side))
        gaps.append(BoundGap(extended=extended, weight=weight, max_tangle=Fraction(2 * (m - 1), m), tangle=tangle))
    return gaps


def _min_side_dim(dims: SubsystemDims, split: Bipartition, primed: frozenset[int]) -> int:
    unprimed = frozenset(range(1, dims.n_parties + 1)) - primed
    d_px = dims.subset_dim(split.left) * dims.subset_dim(primed)
    d_qy = dims.subset_dim(split.right) * dims.subset_dim(unprimed)
    return min(d_px, d_qy)


def upper_bound_bipartition(dims, split: Bipartition) -> Fraction:
    dims = SubsystemDims.of(dims)
    if split.n_parties != dims.n_parties:
        raise ArgumentError(f"bipartition over {split.n_parties} parties used on a {dims.n_parties}-party system")
    n = dims.n_parties
    weight = prod(Fraction(d, d + 1) for d in dims)
    saturated = sum(
        Fraction(m - 1, m)
        for m in (_min_side_dim(dims, split, primed) for primed in enumerate_bipartitions(n, "ordered_with_trivial"))
    )
    return 2 - 2 * weight * (2 ** n - saturated)


def upper_bound(dims) -> Fraction:
    dims = SubsystemDims.of(dims)
    if dims.n_parties < 2:
        raise ArgumentError("the bound needs at least two parties")
    splits = bipartitions(dims.n_parties)
    return sum((upper_bound_bipartition(dims, split) for split in splits), Fraction(0)) / len(splits)


def upper_bound_qudit(n: int, d: int) -> Fraction:
    _check_qudit(n, d)
    inner = Fraction(0)
    for j in range(n + 1):
        for l in range(1, n // 2 + 1):
            m = d ** (n - abs(l - j))
            halving = 2 if 2 * l == n else 1
            inner += comb(n, j) * comb(n, l) * Fraction(m - 1, m * halving)
    return 2 - Fraction(2 * d ** n, (d + 1) ** n) * (2 ** n - inner / (2 ** (n - 1) - 1))


def group_mean_inputs(dims) -> GroupMeanInputs:
    dims = SubsystemDims.of(dims)
    n = dims.n_parties
    if n < 2:
        raise ArgumentError("group means need at least two parties")
    # B = sum over all subsets S of prod_{i in S} d_i
    big_b = Fraction(prod(1 + d for d in dims))
    big_c = Fraction(sum(dims.subset_dim(s.left) + dims.subset_dim(s.right) for s in bipartitions(n)))
    big_d = Fraction(dims.total_dim)
    big_a = None
    if n == 3:
        d1, d2, d3 = dims.dims
        big_a = Fraction(3 - d1 - d2 - d3 - d1 * d2 - d1 * d3 - d2 * d3 + 3 * d1 * d2 * d3)
    return GroupMeanInputs(dims=dims, A=big_a, B=big_b, C=big_c, D=big_d)


def mean_unitary(dims) -> Fraction:
    g = group_mean_inputs(dims)
    n = g.dims.n_parties
    local = prod(Fraction(1, d + 1) for d in g.dims)
    return 2 * (1 - local * g.B * g.C / ((2 ** (n - 1) - 1) * (g.D + 1)))


def mean_orthogonal(dims) -> Fraction:
    g = group_mean_inputs(dims)
    n = g.dims.n_parties
    if g.D < 2:
        raise ArgumentError("the orthogonal mean needs total dimension at least 2")
    local = prod(Fraction(1, d + 1) for d in g.dims)
    numerator = 2 ** n * (g.D + 1) - 2 * g.B + (g.B * g.D - 2 ** n) * g.C / (2 ** (n - 1) - 1)
    return 2 * (1 - local * numerator / ((g.D - 1) * (g.D + 2)))


def mean_unitary_tripartite(d1: int, d2: int, d3: int) -> Fraction:
    g = group_mean_inputs((d1, d2, d3))
    return 2 * g.A / (3 * (g.D + 1))


def mean_orthogonal_tripartite(d1: int, d2: int, d3: int) -> Fraction:
    g = group_mean_inputs((d1, d2, d3))
    if g.D < 2:
        raise ArgumentError("the orthogonal mean needs total dimension at least 2")
    local_full = prod(d * (d + 1) for d in (d1, d2, d3))
    local_plus = prod(d + 1 for d in (d1, d2, d3))
    return 2 * g.A * (local_full - 8) / (3 * (g.D - 1) * (g.D + 2) * local_plus)


def _check_qudit(n: int, d: int) -> None:
    if n < 2:
        raise ArgumentError(f"need n >= 2 parties, got {n}")
    if d < 2:
        raise ArgumentError(f"need local dimension d >= 2, got {d}")


def mean_qudit_unitary(n: int, d: int) -> Fraction:
    _check_qudit(n, d)
    return Fraction(2 ** n * (d ** n + 1) - 2 * (d + 1) ** n, (2 ** (n - 1) - 1) * (d ** n + 1))


def mean_qudit_orthogonal(n: int, d: int) -> Fraction:
    _check_qudit(n, d)
    numerator = (2 ** n * (d ** n + 1) - 2 * (d + 1) ** n) * (d ** n * (d + 1) ** n - 2 ** n)
    denominator = (2 ** (n - 1) - 1) * (d ** (2 * n) + d ** n - 2) * (d + 1) ** n
    return Fraction(numerator, denominator)


def max_tau_one(d: int) -> Fraction:
    if d < 1:
        raise ArgumentError(f"need d >= 1, got {d}")
    return Fraction(2 * (d - 1), d)
