"""Named three-qubit gates, the G_n phase family and diagonal gates.

Basis order is |000>, |001>, ..., |111> with party 1 the most significant bit.
Phases of diagonal gates are stored 0-based; formulas below keep the 1-based
labels phi_1..phi_8 so they read the same as the usual c^{ij}_{kl} notation.
"""
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from ensembles import permutation_matrix
from entanglement import bipartitions
from errors import ArgumentError
from tensor_core import GateMatrix, SubsystemDims

QUBITS3 = SubsystemDims((2, 2, 2))

PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)

# (i, j, k, l) label c^{ij}_{kl} = cos(phi_i + phi_j - phi_k - phi_l), 1-based
STRONG_TERMS = ((1, 4, 2, 3), (1, 6, 2, 5), (1, 7, 3, 5), (2, 8, 4, 6), (3, 8, 4, 7), (5, 8, 6, 7))
WEAK_TERMS = ((3, 6, 4, 5), (2, 7, 4, 5), (2, 7, 3, 6), (1, 8, 4, 5), (1, 8, 3, 6), (1, 8, 2, 7))

H_U8_SIGNS = np.array([
    [-1, -1, -1,  1, -1,  1,  1,  1],
    [-1, -1, -1,  1,  1, -1, -1, -1],
    [-1, -1,  1, -1, -1,  1, -1, -1],
    [ 1,  1, -1,  1, -1,  1, -1, -1],
    [-1,  1, -1, -1, -1, -1,  1, -1],
    [ 1, -1,  1,  1, -1, -1,  1, -1],
    [ 1, -1, -1, -1,  1,  1,  1, -1],
    [ 1, -1, -1, -1, -1, -1, -1,  1],
])


@dataclass(frozen=True)
class DiagonalParams:
    """Either eight phases, or four omegas plus three deltas."""
    phis: tuple[float, ...] | None = None
    omegas: tuple[float, ...] | None = None
    deltas: tuple[float, ...] | None = None

    def __post_init__(self):
        if self.phis is not None:
            if self.omegas is not None or self.deltas is not None:
                raise ArgumentError("give either phis or (omegas, deltas), not both")
            if len(self.phis) != 8:
                raise ArgumentError(f"need 8 phases, got {len(self.phis)}")
        else:
            if self.omegas is None or self.deltas is None:
                raise ArgumentError("need phis, or both omegas and deltas")
            if len(self.omegas) != 4 or len(self.deltas) != 3:
                raise ArgumentError("need 4 omegas and 3 deltas")

    def to_phis(self) -> np.ndarray:
        if self.phis is not None:
            return np.asarray(self.phis, dtype=float)
        return phis_from_reparametrization(self.omegas, self.deltas)


def phis_from_reparametrization(omegas, deltas) -> np.ndarray:
    w1, w2, w3, w4 = omegas
    d1, d2, d3 = deltas
    return np.array([
        w1,
        w1 + w2 + d1,
        w3,
        w2 + w3,
        -w2 - w3 + w4 + d2,
        -w3 + w4 - d3,
        -w1 - w2 + w4 - d1,
        -w1 + w4,
    ], dtype=float)


def identity(dims=QUBITS3) -> GateMatrix:
    dims = SubsystemDims.of(dims)
    return GateMatrix(np.eye(dims.total_dim), dims)


def swap(d: int = 2) -> GateMatrix:
    matrix = np.zeros((d * d, d * d), dtype=np.complex128)
    for a in range(d):
        for b in range(d):
            matrix[b * d + a, a * d + b] = 1.0
    return GateMatrix(matrix, SubsystemDims((d, d)))


def controlled(target: np.ndarray, n_controls: int) -> np.ndarray:
    """Qubit controls on the leading parties; ``target`` acts when all are 1."""
    target = np.asarray(target, dtype=np.complex128)
    size = 2 ** n_controls * target.shape[0]
    matrix = np.eye(size, dtype=np.complex128)
    matrix[-target.shape[0]:, -target.shape[0]:] = target
    return matrix


def toffoli() -> GateMatrix:
    return GateMatrix(controlled(PAULI_X, 2), QUBITS3)


def fredkin() -> GateMatrix:
    # controlled SWAP of parties 2 and 3: |101> <-> |110>
    matrix = np.eye(8, dtype=np.complex128)
    matrix[[5, 6]] = matrix[[6, 5]]
    return GateMatrix(matrix, QUBITS3)


def deutsch(theta: float) -> GateMatrix:
    # target block i cos(theta) I + sin(theta) X
    block = 1j * np.cos(theta) * np.eye(2) + np.sin(theta) * PAULI_X
    return GateMatrix(controlled(block, 2), QUBITS3)


def g_n(n: int, alpha: float) -> GateMatrix:
    if n < 2:
        raise ArgumentError(f"G_n needs n >= 2 qubits, got {n}")
    diagonal = np.ones(2 ** n, dtype=np.complex128)
    diagonal[-1] = np.exp(1j * alpha)
    return GateMatrix(np.diag(diagonal), SubsystemDims((2,) * n))


def gn_coefficient(n: int) -> Fraction:
    """c_n in eps_1(G_n(alpha)) = c_n (1 - cos alpha).

    The normalization is 1/(2^{n-1}-1), the number of cuts; this is what gives
    G_3(pi) = 10/27. A 1/(2^n-1) prefactor also appears in print and is off.
    """
    if n < 2:
        raise ArgumentError(f"G_n needs n >= 2 qubits, got {n}")
    total = 0
    for split in bipartitions(n):
        n_p, n_q = len(split.left), len(split.right)
        total += (3 ** n_p - 2 ** n_p) * (3 ** n_q - 2 ** n_q)
    return Fraction(8 * total, 6 ** n * (2 ** (n - 1) - 1))


def epower_gn_closed(n: int, alpha: float) -> float:
    return float(gn_coefficient(n)) * (1.0 - np.cos(alpha))


def diagonal_gate(params: DiagonalParams) -> GateMatrix:
    return GateMatrix(np.diag(np.exp(1j * params.to_phis())), QUBITS3)


def diagonal_from_omegas(omegas) -> GateMatrix:
    """The D_omega family; every member reaches the diagonal maximum 16/27."""
    return diagonal_gate(DiagonalParams(omegas=tuple(omegas), deltas=(np.pi, 0.0, 0.0)))


def h_d8() -> GateMatrix:
    return GateMatrix(np.diag([1, 1, 1, -1, 1, -1, -1, -1]).astype(np.complex128), QUBITS3)


def h_u8() -> GateMatrix:
    return GateMatrix(H_U8_SIGNS / np.sqrt(8), QUBITS3)


def _cosine_sum(phis: np.ndarray, terms) -> np.ndarray:
    return sum(np.cos(phis[..., i - 1] + phis[..., j - 1] - phis[..., k - 1] - phis[..., l - 1]) for i, j, k, l in terms)


def epower_diagonal_closed(phis) -> float | np.ndarray:
    """eps_1 of diag(e^{i phi_1}, ..., e^{i phi_8}); accepts a trailing axis of 8."""
    phis = np.asarray(phis, dtype=float)
    if phis.shape[-1] != 8:
        raise ArgumentError(f"need 8 phases, got {phis.shape[-1]}")
    value = 10 / 27 - 4 / 81 * _cosine_sum(phis, STRONG_TERMS) - 1 / 81 * _cosine_sum(phis, WEAK_TERMS)
    return float(value) if np.ndim(value) == 0 else value


def epower_diagonal_deltas(deltas) -> float | np.ndarray:
    deltas = np.asarray(deltas, dtype=float)
    if deltas.shape[-1] != 3:
        raise ArgumentError(f"need 3 deltas, got {deltas.shape[-1]}")
    d1, d2, d3 = deltas[..., 0], deltas[..., 1], deltas[..., 2]
    value = (
        29
        - 8 * np.cos(d1) - 2 * np.cos(d2) - 2 * np.cos(d3)
        - 8 * np.cos(d1 + d2 + d3)
        - 4 * np.cos(d1 + d2) - 4 * np.cos(d1 + d3) - np.cos(d2 + d3)
    ) / 81
    return float(value) if np.ndim(value) == 0 else value


def epower_diagonal_deltas_gradient(deltas) -> np.ndarray:
    d1, d2, d3 = np.asarray(deltas, dtype=float)
    s_all = np.sin(d1 + d2 + d3)
    s12, s13, s23 = np.sin(d1 + d2), np.sin(d1 + d3), np.sin(d2 + d3)
    return np.array([
        8 * np.sin(d1) + 8 * s_all + 4 * s12 + 4 * s13,
        2 * np.sin(d2) + 8 * s_all + 4 * s12 + s23,
        2 * np.sin(d3) + 8 * s_all + 4 * s13 + s23,
    ]) / 81


def permutation_from_word(word) -> GateMatrix:
    word = [int(w) for w in word]
    if sorted(word) != list(range(len(word))):
        raise ArgumentError(f"{word} is not a permutation of 0..{len(word) - 1}")
    dims = QUBITS3 if len(word) == 8 else SubsystemDims((len(word),))
    return GateMatrix(permutation_matrix(word), dims)

