"""Exact low-order Haar moments (Weingarten calculus) and their MC counterparts.

Unitary, second order:

    E[U_{i1 j1} U_{i2 j2} conj(U_{i1' j1'}) conj(U_{i2' j2'})]
        = sum_{s, t in S_2} delta(i_k, i'_{s(k)}) delta(j_k, j'_{t(k)}) Wg(s t^-1)

with Wg(id) = 1/(d^2-1) and Wg(swap) = -1/(d(d^2-1)).

Orthogonal, fourth order: sum over the three pair partitions q, r of {1,2,3,4}
with Wg(q, r) = (d+1)/(d(d-1)(d+2)) when q == r and -1/(d(d-1)(d+2)) otherwise.
These are the values that reproduce E[O_11^4] = 3/(d(d+2)); the expanded form
printed alongside them in the literature carries d(d-1) and d(d-1)(d+1)
denominators and does not.
"""
import logging
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations
from typing import Literal

import numpy as np

from ensembles import MonteCarloEstimate, haar_orthogonal_stack, haar_unitary_stack
from errors import ArgumentError, UnsupportedInputError

logger = logging.getLogger(__name__)

Group = Literal["unitary", "orthogonal"]
Entry = tuple[int, int]

PAIRINGS = (((0, 1), (2, 3)), ((0, 2), (1, 3)), ((0, 3), (1, 2)))
MOMENT_CHUNK = 10000


@dataclass(frozen=True)
class MomentSpec:
    """Which product of matrix entries to average.

    ``entries`` are (row, column) pairs of the plain factors; ``conjugated``
    are the entries of the conjugated factors (unitary only). A unitary spec
    has two of each, an orthogonal spec four plain entries.
    """
    group: Group
    d: int
    entries: tuple[Entry, ...]
    conjugated: tuple[Entry, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "entries", tuple(tuple(e) for e in self.entries))
        object.__setattr__(self, "conjugated", tuple(tuple(e) for e in self.conjugated))
        if self.d < 1:
            raise ArgumentError(f"need d >= 1, got {self.d}")
        match self.group:
            case "unitary":
                if len(self.entries) != 2 or len(self.conjugated) != 2:
                    raise ArgumentError("a unitary moment pairs two U factors with two conjugated factors")
            case "orthogonal":
                if len(self.entries) != 4 or self.conjugated:
                    raise ArgumentError("an orthogonal moment has exactly four O factors")
            case _:
                raise ArgumentError(f"unknown group {self.group!r}")
        for i, j in self.entries + self.conjugated:
            if not (0 <= i < self.d and 0 <= j < self.d):
                raise ArgumentError(f"entry ({i}, {j}) is outside a {self.d}x{self.d} matrix")


def _delta(a: int, b: int) -> int:
    return 1 if a == b else 0


def unitary_second_moment(spec: MomentSpec) -> Fraction:
    if spec.group != "unitary":
        raise ArgumentError("unitary_second_moment needs a unitary spec")
    d = spec.d
    if d == 1:
        # U is a single phase; the product is |U|^4 = 1
        return Fraction(1)

    weingarten = {True: Fraction(1, d * d - 1), False: Fraction(-1, d * (d * d - 1))}
    (i1, j1), (i2, j2) = spec.entries
    rows, cols = (i1, i2), (j1, j2)
    rows_c = tuple(e[0] for e in spec.conjugated)
    cols_c = tuple(e[1] for e in spec.conjugated)

    total = Fraction(0)
    for s in permutations(range(2)):
        row_match = _delta(rows[0], rows_c[s[0]]) * _delta(rows[1], rows_c[s[1]])
        if not row_match:
            continue
        for t in permutations(range(2)):
            col_match = _delta(cols[0], cols_c[t[0]]) * _delta(cols[1], cols_c[t[1]])
            if col_match:
                total += weingarten[s == t]
    return total


def _pairing_holds(indices: tuple[int, ...], pairing) -> bool:
    return all(indices[a] == indices[b] for a, b in pairing)


def orthogonal_fourth_moment(spec: MomentSpec) -> Fraction:
    if spec.group != "orthogonal":
        raise ArgumentError("orthogonal_fourth_moment needs an orthogonal spec")
    d = spec.d
    if d < 3:
        raise UnsupportedInputError(f"orthogonal Weingarten weights are evaluated for d >= 3, got {d}")

    denominator = d * (d - 1) * (d + 2)
    same, different = Fraction(d + 1, denominator), Fraction(-1, denominator)
    rows = tuple(e[0] for e in spec.entries)
    cols = tuple(e[1] for e in spec.entries)

    total = Fraction(0)
    for q in PAIRINGS:
        if not _pairing_holds(rows, q):
            continue
        for r in PAIRINGS:
            if _pairing_holds(cols, r):
                total += same if q == r else different
    return total


def exact_moment(spec: MomentSpec) -> Fraction:
    if spec.group == "unitary":
        return unitary_second_moment(spec)
    return orthogonal_fourth_moment(spec)


def _entry_products(spec: MomentSpec, stack: np.ndarray) -> np.ndarray:
    values = np.ones(stack.shape[0], dtype=stack.dtype)
    for i, j in spec.entries:
        values = values * stack[:, i, j]
    for i, j in spec.conjugated:
        values = values * stack[:, i, j].conj()
    return values.real


def mc_moment(spec: MomentSpec, n_samples: int, rng: np.random.Generator) -> MonteCarloEstimate:
    if n_samples < 2:
        raise ArgumentError(f"need at least 2 samples, got {n_samples}")
    sampler = haar_unitary_stack if spec.group == "unitary" else haar_orthogonal_stack

    parts = []
    done = 0
    while done < n_samples:
        chunk = min(MOMENT_CHUNK, n_samples - done)
        parts.append(_entry_products(spec, sampler(spec.d, chunk, rng)))
        done += chunk
    return MonteCarloEstimate.from_values(np.concatenate(parts))
