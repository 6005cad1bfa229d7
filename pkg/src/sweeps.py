"""Computations behind the command-line subcommands.

Each function returns plain data (dataclasses, exact ``Fraction`` values where
the quantity is analytic); formatting and file output live in ``experiments``.
Sampled sweeps are split into fixed-size shards, shard k drawing from stream
``seed.stream_id + k``, and merged in shard order, so results depend on the
seed but never on the worker count.
"""
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.optimize import minimize

from ensembles import Ensemble, MonteCarloEstimate, RngSeed, ensemble_sampler, permutation_stack, rng_from_seed
from epower import (
    epower_one_tangle_batch,
    max_tau_one,
    mean_orthogonal,
    mean_qudit_orthogonal,
    mean_qudit_unitary,
    mean_unitary,
    upper_bound,
    upper_bound_qudit,
)
from errors import ArgumentError, FormulaResidualError, NonConvergenceError, UnsupportedInputError
from gate_catalog import (
    QUBITS3,
    DiagonalParams,
    epower_diagonal_closed,
    epower_diagonal_deltas,
    epower_diagonal_deltas_gradient,
)
from settings import SETTINGS
from tensor_core import SubsystemDims

logger = logging.getLogger(__name__)

CLASS_SCALE = 162
SHARD_SIZE = 2048
DIAGONAL_MAXIMUM = Fraction(16, 27)
HISTOGRAM_RANGE = (0.0, 8 / 9)
FIGURE_DIMS = (2, 4, 16)

HistogramEnsemble = Literal["cue", "cre", "cpe", "perm"]


def _map_ordered(func: Callable, jobs: Sequence, workers: int | None) -> list:
    workers = SETTINGS.workers if workers is None else workers
    if workers < 1:
        raise ArgumentError(f"worker count must be positive, got {workers}")
    if workers == 1 or len(jobs) <= 1:
        return [func(job) for job in jobs]
    with ThreadPoolExecutor(max_workers=min(workers, len(jobs))) as pool:
        return list(pool.map(func, jobs))


def _chunks(total: int, size: int) -> list[tuple[int, int]]:
    return [(start, min(start + size, total)) for start in range(0, total, size)]


# ====== Permutation census ======

@dataclass(frozen=True)
class ClassTable:
    """Rows of (162 * eps_1, number of permutation gates), ascending."""
    rows: tuple[tuple[int, int], ...]
    max_residual: float

    @property
    def total(self) -> int:
        return sum(count for _, count in self.rows)

    def mean(self) -> Fraction:
        weighted = sum(key * count for key, count in self.rows)
        return Fraction(weighted, CLASS_SCALE * self.total)

    def minimum(self) -> Fraction:
        return Fraction(self.rows[0][0], CLASS_SCALE)

    def maximum(self) -> Fraction:
        return Fraction(self.rows[-1][0], CLASS_SCALE)


def permutation_epowers(workers: int | None = None) -> np.ndarray:
    """eps_1 of all 8! three-qubit permutation gates, in lexicographic word order."""
    stack = permutation_stack(QUBITS3.total_dim)
    jobs = _chunks(len(stack), SHARD_SIZE)
    logger.info("permutation census: %d gates in %d chunks", len(stack), len(jobs))
    parts = _map_ordered(lambda job: epower_one_tangle_batch(stack[job[0]:job[1]], QUBITS3), jobs, workers)
    return np.concatenate(parts)


def classify_epowers(values: np.ndarray, tol: float | None = None) -> ClassTable:
    """Groups eps_1 values by the integer 162 * eps_1."""
    tol = SETTINGS.class_residual_tol if tol is None else tol
    scaled = CLASS_SCALE * np.asarray(values, dtype=float)
    keys = np.rint(scaled)
    residual = float(np.max(np.abs(scaled - keys)))
    if residual >= tol:
        raise FormulaResidualError(f"162*eps_1 is {residual:.3e} away from an integer (limit {tol:.0e})")

    classes, counts = np.unique(keys.astype(np.int64), return_counts=True)
    logger.info("%d classes, max residual %.2e", len(classes), residual)
    return ClassTable(rows=tuple(zip(classes.tolist(), counts.tolist())), max_residual=residual)


def permutation_census(qubits: int = 3, workers: int | None = None, tol: float | None = None) -> ClassTable:
    if qubits != 3:
        raise UnsupportedInputError(f"the permutation census is defined for 3 qubits, got {qubits}")
    return classify_epowers(permutation_epowers(workers), tol)


# ====== Sampled ensembles ======

def sample_epowers(ensemble: Ensemble, dims, n_samples: int, seed: RngSeed, workers: int | None = None) -> np.ndarray:
    """eps_1 of ``n_samples`` gates drawn from cue, cre or cpe on ``dims``."""
    dims = SubsystemDims.of(dims)
    if n_samples < 1:
        raise ArgumentError(f"need at least one sample, got {n_samples}")
    sampler = ensemble_sampler(ensemble)
    jobs = list(enumerate(_chunks(n_samples, SHARD_SIZE)))

    def shard(job):
        k, (start, stop) = job
        matrices = sampler(dims.total_dim, stop - start, rng_from_seed(seed.spawn(k)))
        return epower_one_tangle_batch(matrices, dims)

    logger.debug("%s: %d samples on dims %s in %d shards", ensemble, n_samples, dims.dims, len(jobs))
    return np.concatenate(_map_ordered(shard, jobs, workers))


@dataclass(frozen=True)
class HistogramData:
    ensemble: str
    edges: np.ndarray
    probabilities: np.ndarray
    sample: MonteCarloEstimate
    minimum: float
    maximum: float


def ensemble_histogram(
    ensemble: HistogramEnsemble,
    n_samples: int | None = None,
    bins: int | None = None,
    seed: RngSeed = RngSeed(),
    workers: int | None = None,
) -> HistogramData:
    """Normalized histogram of eps_1 over three-qubit gates.

    ``perm`` is always the exhaustive set of 8! permutation gates. Bins span
    [0, 8/9], the largest value any three-qubit gate reaches.
    """
    bins = SETTINGS.bins if bins is None else bins
    if bins < 1:
        raise ArgumentError(f"need at least one bin, got {bins}")
    if ensemble == "perm":
        values = permutation_epowers(workers)
    else:
        n_samples = SETTINGS.mc_samples if n_samples is None else n_samples
        values = sample_epowers(ensemble, QUBITS3, n_samples, seed, workers)

    clipped = np.clip(values, *HISTOGRAM_RANGE)
    counts, edges = np.histogram(clipped, bins=bins, range=HISTOGRAM_RANGE)
    return HistogramData(
        ensemble=ensemble,
        edges=edges,
        probabilities=counts / len(values),
        sample=MonteCarloEstimate.from_values(values),
        minimum=float(np.min(values)),
        maximum=float(np.max(values)),
    )


# ====== Scaling tables ======

@dataclass(frozen=True)
class QuditDRow:
    d: int
    mean_unitary: Fraction
    upper_bound: Fraction
    max_tau_one: Fraction


@dataclass(frozen=True)
class QuditNRow:
    n: int
    d: int
    unitary_over_bound: Fraction
    orthogonal_over_unitary: Fraction


def scaling_qudit_d(d_values: Sequence[int], n: int = 3) -> list[QuditDRow]:
    return [QuditDRow(d, mean_qudit_unitary(n, d), upper_bound_qudit(n, d), max_tau_one(d)) for d in d_values]


def scaling_qudit_n(n_values: Sequence[int], d_values: Sequence[int] = FIGURE_DIMS) -> list[QuditNRow]:
    rows = []
    for d in d_values:
        for n in n_values:
            unitary = mean_qudit_unitary(n, d)
            rows.append(QuditNRow(
                n=n,
                d=d,
                unitary_over_bound=unitary / upper_bound_qudit(n, d),
                orthogonal_over_unitary=mean_qudit_orthogonal(n, d) / unitary,
            ))
    return rows


# ====== Diagonal maximization ======

@dataclass(frozen=True)
class DiagonalMaximum:
    deltas: tuple[float, float, float]
    value: float
    gradient_norm: float
    grid: int
    restarts_used: int
    closed_form_value: float

    @property
    def gap(self) -> float:
        return abs(self.value - float(DIAGONAL_MAXIMUM))

    def maximizer_params(self, omegas=(0.0, 0.0, 0.0, 0.0)) -> DiagonalParams:
        return DiagonalParams(omegas=tuple(omegas), deltas=self.deltas)


def _refine(start: np.ndarray):
    return minimize(
        lambda x: -epower_diagonal_deltas(x),
        start,
        jac=lambda x: -epower_diagonal_deltas_gradient(x),
        method="BFGS",
        options={"gtol": 1e-14, "maxiter": 500},
    )


def maximize_diagonal(
    grid: int | None = None,
    seed: RngSeed = RngSeed(),
    restarts: int = 8,
    grad_tol: float | None = None,
) -> DiagonalMaximum:
    """Coarse grid over delta in [0, 2pi)^3, then BFGS with the analytic gradient.

    The best grid point is refined first; seeded random restarts are tried
    only while no refinement reaches a gradient norm below ``grad_tol``.
    """
    grid = SETTINGS.grid if grid is None else grid
    grad_tol = SETTINGS.grad_tol if grad_tol is None else grad_tol
    if grid < 1:
        raise ArgumentError(f"grid size must be positive, got {grid}")

    axis = np.linspace(0.0, 2.0 * np.pi, grid, endpoint=False)
    mesh = np.stack(np.meshgrid(axis, axis, axis, indexing="ij"), axis=-1)
    values = epower_diagonal_deltas(mesh)
    best = np.unravel_index(np.argmax(values), values.shape)
    starts = [mesh[best]]
    logger.debug("diagonal grid %d^3: best %.12f at %s", grid, values[best], starts[0])

    rng = rng_from_seed(seed)
    attempts = []
    for attempt in range(restarts + 1):
        if attempt > 0:
            starts.append(rng.uniform(0.0, 2.0 * np.pi, size=3))
        result = _refine(starts[-1])
        x = np.mod(result.x, 2.0 * np.pi)
        norm = float(np.linalg.norm(epower_diagonal_deltas_gradient(x)))
        attempts.append((epower_diagonal_deltas(x), norm, x))
        if norm < grad_tol:
            break
    else:
        raise NonConvergenceError(
            f"no refinement reached gradient norm < {grad_tol:.0e}",
            diagnostics={
                "grid": grid,
                "attempts": [{"value": v, "gradient_norm": g, "deltas": x.tolist()} for v, g, x in attempts],
            },
        )

    value, norm, x = attempts[-1]
    deltas = tuple(float(v) for v in x)
    closed = epower_diagonal_closed(DiagonalParams(omegas=(0.0, 0.0, 0.0, 0.0), deltas=deltas).to_phis())
    logger.debug("diagonal maximum %.15f after %d restarts", value, len(attempts) - 1)
    return DiagonalMaximum(
        deltas=deltas,
        value=float(value),
        gradient_norm=norm,
        grid=grid,
        restarts_used=len(attempts) - 1,
        closed_form_value=float(closed),
    )


# ====== Means ======

@dataclass(frozen=True)
class MeansReport:
    dims: SubsystemDims
    mean_unitary: Fraction
    mean_orthogonal: Fraction
    upper_bound: Fraction
    sampled: dict[str, MonteCarloEstimate] = field(default_factory=dict)


def _bound(dims: SubsystemDims) -> Fraction:
    # the general bound visits 2^n primed subsets per split; equal dims have a closed form
    d = dims.dims[0]
    if dims.n_parties >= 2 and d >= 2 and all(x == d for x in dims):
        return upper_bound_qudit(dims.n_parties, d)
    return upper_bound(dims)


def means_report(dims, mc_samples: int = 0, seed: RngSeed = RngSeed(), workers: int | None = None) -> MeansReport:
    dims = SubsystemDims.of(dims)
    report = MeansReport(
        dims=dims,
        mean_unitary=mean_unitary(dims),
        mean_orthogonal=mean_orthogonal(dims),
        upper_bound=_bound(dims),
    )
    if mc_samples > 0:
        # separate stream ranges so the two ensembles never share draws
        unitary = sample_epowers("cue", dims, mc_samples, seed, workers)
        orthogonal = sample_epowers("cre", dims, mc_samples, seed.spawn(_shard_count(mc_samples)), workers)
        report.sampled["unitary"] = MonteCarloEstimate.from_values(unitary)
        report.sampled["orthogonal"] = MonteCarloEstimate.from_values(orthogonal)
    return report


def _shard_count(n_samples: int) -> int:
    return len(_chunks(n_samples, SHARD_SIZE))


# ====== Three-qubit summary ======

@dataclass(frozen=True)
class SummaryRow:
    ensemble: str
    analytic_mean: Fraction
    analytic_max: Fraction
    sample: MonteCarloEstimate
    sample_min: float
    sample_max: float


def three_qubit_summary(n_samples: int | None = None, seed: RngSeed = RngSeed(), workers: int | None = None) -> list[SummaryRow]:
    """Min, mean and max of eps_1 over D(8), P(8), O(8) and U(8).

    P(8) is exhaustive, so its analytic columns come from the census itself.
    """
    n_samples = SETTINGS.mc_samples if n_samples is None else n_samples
    perm_values = permutation_epowers(workers)
    census = classify_epowers(perm_values)

    rows = []
    for label, ensemble, mean, maximum, offset in (
        ("D(8)", "cpe", Fraction(10, 27), DIAGONAL_MAXIMUM, 0),
        ("O(8)", "cre", mean_orthogonal(QUBITS3), upper_bound(QUBITS3), 1),
        ("U(8)", "cue", mean_unitary(QUBITS3), upper_bound(QUBITS3), 2),
    ):
        values = sample_epowers(ensemble, QUBITS3, n_samples, seed.spawn(offset * _shard_count(n_samples)), workers)
        sample = MonteCarloEstimate.from_values(values)
        rows.append(SummaryRow(label, mean, maximum, sample, float(np.min(values)), float(np.max(values))))

    rows.insert(1, SummaryRow(
        "P(8)",
        census.mean(),
        census.maximum(),
        MonteCarloEstimate.from_values(perm_values),
        float(census.minimum()),
        float(census.maximum()),
    ))
    return rows
