import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import combinations
from typing import Iterable, Literal

import numpy as np

from errors import ArgumentError
from settings import SETTINGS
from tensor_core import PureState, SubsystemDims, purity_of_split

logger = logging.getLogger(__name__)

BipartitionMode = Literal["unordered_nontrivial", "ordered_with_trivial"]


@dataclass(frozen=True)
class Bipartition:
    left: frozenset[int]
    n_parties: int

    def __post_init__(self):
        left = frozenset(int(p) for p in self.left)
        if self.n_parties < 1:
            raise ArgumentError("a bipartition needs at least one party")
        if not left <= frozenset(range(1, self.n_parties + 1)):
            raise ArgumentError(f"parties {sorted(left)} are not all in 1..{self.n_parties}")
        object.__setattr__(self, "left", left)

    @classmethod
    def of(cls, left: Iterable[int], n_parties: int) -> "Bipartition":
        return cls(frozenset(left), n_parties)

    @property
    def right(self) -> frozenset[int]:
        return frozenset(range(1, self.n_parties + 1)) - self.left

    def complement(self) -> "Bipartition":
        return Bipartition(self.right, self.n_parties)

    def canonical(self) -> "Bipartition":
        return self if 1 in self.left else self.complement()

    def is_trivial(self) -> bool:
        return not self.left or not self.right

    def label(self) -> str:
        # e.g. "12|3"; parties above 9 are comma separated
        sep = "," if self.n_parties > 9 else ""
        left = sep.join(str(p) for p in sorted(self.left))
        right = sep.join(str(p) for p in sorted(self.right))
        return f"{left}|{right}"


@dataclass(frozen=True)
class ExtendedBipartition:
    """A physical cut p|q together with an ordered cut x'|y' of the primed copy.

    ``primed_left`` holds primed labels written as 1..n (meaning 1'..n').
    """
    base: Bipartition
    primed_left: frozenset[int]

    def __post_init__(self):
        primed = frozenset(int(p) for p in self.primed_left)
        if not primed <= frozenset(range(1, self.base.n_parties + 1)):
            raise ArgumentError(f"primed parties {sorted(primed)} are not all in 1..{self.base.n_parties}")
        object.__setattr__(self, "primed_left", primed)

    def side(self) -> frozenset[int]:
        """The set p ∪ x' as party labels of the 2n-party extended space."""
        n = self.base.n_parties
        return self.base.left | frozenset(n + j for j in self.primed_left)


def _subset_from_mask(mask: int, n: int) -> frozenset[int]:
    return frozenset(p for p in range(1, n + 1) if mask >> (p - 1) & 1)


def enumerate_bipartitions(n: int, mode: BipartitionMode = "unordered_nontrivial") -> list[frozenset[int]]:
    if n < 1:
        raise ArgumentError(f"need at least one party, got {n}")
    full = (1 << n) - 1
    match mode:
        case "unordered_nontrivial":
            # canonical side holds party 1 (lowest bit); the full set is trivial
            masks = [m for m in range(1, full) if m & 1]
        case "ordered_with_trivial":
            masks = list(range(full + 1))
        case _:
            raise ArgumentError(f"unknown enumeration mode {mode!r}")
    return [_subset_from_mask(m, n) for m in masks]


def bipartitions(n: int) -> list[Bipartition]:
    return [Bipartition(left, n) for left in enumerate_bipartitions(n, "unordered_nontrivial")]


def _check_split(dims: SubsystemDims, split: Bipartition) -> None:
    if split.n_parties != dims.n_parties:
        raise ArgumentError(f"bipartition over {split.n_parties} parties used on a {dims.n_parties}-party system")


def generalized_concurrence(state: PureState, split: Bipartition) -> float:
    _check_split(state.dims, split)
    return 2.0 * (1.0 - purity_of_split(state.amplitudes, state.dims, split.left))


def one_tangle(state: PureState) -> float:
    n = state.dims.n_parties
    if n < 2:
        raise ArgumentError("the one-tangle needs at least two parties")
    splits = bipartitions(n)
    return sum(generalized_concurrence(state, split) for split in splits) / len(splits)


def one_tangle_batch(amplitudes: np.ndarray, dims) -> np.ndarray:
    """One-tangle of every row of an (N, D) stack of normalized states."""
    dims = SubsystemDims.of(dims)
    if dims.n_parties < 2:
        raise ArgumentError("the one-tangle needs at least two parties")
    amplitudes = np.asarray(amplitudes, dtype=np.complex128)
    if amplitudes.ndim != 2 or amplitudes.shape[1] != dims.total_dim:
        raise ArgumentError(f"expected an (N, {dims.total_dim}) stack, got shape {amplitudes.shape}")

    sides = enumerate_bipartitions(dims.n_parties, "unordered_nontrivial")
    total = np.zeros(amplitudes.shape[0])
    for side in sides:
        total += 2.0 * (1.0 - purity_of_split(amplitudes, dims, side))
    return total / len(sides)


def concurrence_upper_bound(dims, split: Bipartition) -> Fraction:
    dims = SubsystemDims.of(dims)
    _check_split(dims, split)
    m = min(dims.subset_dim(split.left), dims.subset_dim(split.right))
    return Fraction(2 * (m - 1), m)


@dataclass(frozen=True)
class AmeReport:
    is_ame: bool
    worst_deviation: float
    worst_side: frozenset[int] | None


def is_ame(state: PureState, tol: float | None = None) -> AmeReport:
    tol = SETTINGS.ame_tol if tol is None else tol
    dims = state.dims
    d = dims.dims[0]
    if any(di != d for di in dims):
        raise ArgumentError(f"AME states need equal local dimensions, got {dims.dims}")

    n = dims.n_parties
    worst, worst_side = 0.0, None
    # complementary reductions of a pure state share their purity, so k <= n/2 suffices
    for k in range(1, n // 2 + 1):
        target = float(d) ** (-k)
        for side in combinations(range(1, n + 1), k):
            deviation = abs(purity_of_split(state.amplitudes, dims, side) - target)
            if deviation > worst:
                worst, worst_side = deviation, frozenset(side)

    logger.debug("AME check on %d parties: worst purity deviation %.3e", n, worst)
    return AmeReport(is_ame=worst <= tol, worst_deviation=worst, worst_side=worst_side)


def ghz_state(n: int = 3, d: int = 2) -> PureState:
    dims = SubsystemDims((d,) * n)
    amplitudes = np.zeros(dims.total_dim, dtype=np.complex128)
    # |k...k> sits at k * (d^{n-1} + ... + 1)
    stride = sum(d ** j for j in range(n))
    amplitudes[[k * stride for k in range(d)]] = 1.0 / np.sqrt(d)
    return PureState(amplitudes, dims)


def w_state(n: int = 3) -> PureState:
    dims = SubsystemDims((2,) * n)
    amplitudes = np.zeros(dims.total_dim, dtype=np.complex128)
    amplitudes[[1 << j for j in range(n)]] = 1.0 / np.sqrt(n)
    return PureState(amplitudes, dims)
