from fractions import Fraction

import numpy as np
import pytest

import sweeps
from ensembles import RngSeed
from epower import mean_orthogonal, mean_unitary
from errors import ArgumentError, FormulaResidualError, NonConvergenceError, UnsupportedInputError
from gate_catalog import epower_diagonal_deltas

TABLE_B1 = (
    (0, 48), (48, 288), (60, 864), (64, 288), (72, 192), (79, 2304), (80, 1440),
    (84, 1728), (87, 1536), (88, 2304), (92, 4608), (95, 3456), (96, 4896), (99, 2304),
    (100, 2880), (104, 3456), (107, 2304), (108, 3744), (111, 384), (112, 1152), (128, 144),
)


def test_classify_epowers():
    values = np.array([0.0, 10 / 27, 10 / 27, 64 / 81])
    table = sweeps.classify_epowers(values)
    assert table.rows == ((0, 1), (60, 2), (128, 1))
    assert table.total == 4
    assert table.maximum() == Fraction(64, 81)
    with pytest.raises(FormulaResidualError):
        sweeps.classify_epowers(np.array([0.5 / 162]))


@pytest.mark.slow
def test_permutation_census_matches_table():
    table = sweeps.permutation_census(workers=2)
    assert table.rows == TABLE_B1
    assert table.total == 40320
    assert table.mean() == Fraction(184, 315)
    assert table.maximum() == Fraction(64, 81)


def test_permutation_census_qubit_guard():
    with pytest.raises(UnsupportedInputError):
        sweeps.permutation_census(qubits=4)


def test_sampling_is_independent_of_workers():
    seed = RngSeed(3)
    serial = sweeps.sample_epowers("cue", (2, 2, 2), 5000, seed, workers=1)
    parallel = sweeps.sample_epowers("cue", (2, 2, 2), 5000, seed, workers=3)
    assert np.array_equal(serial, parallel)


@pytest.mark.parametrize("ensemble,mean", [
    ("cue", Fraction(2, 3)),
    ("cre", Fraction(208, 315)),
    ("cpe", Fraction(10, 27)),
])
def test_ensemble_means(ensemble, mean):
    values = sweeps.sample_epowers(ensemble, (2, 2, 2), 2000, RngSeed(11))
    std_error = values.std(ddof=1) / np.sqrt(len(values))
    assert abs(values.mean() - float(mean)) < 4 * std_error
    assert values.max() <= 8 / 9 + 1e-10


def test_histogram(seed):
    data = sweeps.ensemble_histogram("cpe", 4000, 20, seed)
    assert len(data.edges) == 21
    assert abs(data.probabilities.sum() - 1) < 1e-12
    assert data.maximum <= 16 / 27 + 1e-9
    assert abs(data.sample.estimate - 10 / 27) < 4 * data.sample.std_error
    with pytest.raises(ArgumentError):
        sweeps.ensemble_histogram("cue", 100, 0, seed)


@pytest.mark.slow
@pytest.mark.parametrize("ensemble,mean", [
    ("cue", 2 / 3),
    ("cre", 208 / 315),
    ("cpe", 10 / 27),
])
def test_histogram_full_size(seed, ensemble, mean):
    data = sweeps.ensemble_histogram(ensemble, 40320, 40, seed)
    assert abs(data.sample.estimate - mean) < 4 * data.sample.std_error


@pytest.mark.slow
def test_permutation_histogram():
    data = sweeps.ensemble_histogram("perm", bins=162)
    assert data.sample.n_samples == 40320
    assert abs(data.sample.estimate - 184 / 315) < 1e-12
    assert abs(data.maximum - 64 / 81) < 1e-12


def test_scaling_qudit_d():
    rows = sweeps.scaling_qudit_d(range(2, 17))
    assert (rows[0].mean_unitary, rows[0].upper_bound, rows[0].max_tau_one) == (Fraction(2, 3), Fraction(8, 9), 1)
    last = rows[-1]
    assert 2 - float(last.mean_unitary) < 0.2
    assert 2 - float(last.upper_bound) < 0.2
    assert 2 - float(last.max_tau_one) < 0.2


def test_scaling_qudit_n():
    rows = sweeps.scaling_qudit_n(range(2, 9))
    assert len(rows) == 3 * 7
    for d in (2, 4, 16):
        curve = [r for r in rows if r.d == d]
        to_bound = [r.unitary_over_bound for r in curve]
        orthogonal = [r.orthogonal_over_unitary for r in curve]
        assert to_bound == sorted(to_bound)
        assert orthogonal == sorted(orthogonal)
        assert all(value < 1 for value in to_bound + orthogonal)
        assert 1 - float(orthogonal[-1]) < 1e-3


def test_maximize_diagonal():
    result = sweeps.maximize_diagonal(seed=RngSeed(0))
    assert result.gap < 1e-8
    assert result.gradient_norm < 1e-10
    assert abs(result.closed_form_value - result.value) < 1e-12
    assert abs(epower_diagonal_deltas(result.deltas) - 16 / 27) < 1e-8


def test_maximize_diagonal_coarse_grid():
    result = sweeps.maximize_diagonal(grid=8, seed=RngSeed(1))
    assert result.gap < 1e-8


def test_maximize_diagonal_off_grid():
    # a 7-point grid misses delta_1 = pi, so the refinement has to do the work
    result = sweeps.maximize_diagonal(grid=7, seed=RngSeed(2))
    assert result.gap < 1e-8


def test_maximize_diagonal_reports_non_convergence():
    with pytest.raises(NonConvergenceError) as info:
        sweeps.maximize_diagonal(grid=4, restarts=1, grad_tol=0.0)
    assert len(info.value.diagnostics["attempts"]) == 2


def test_means_report():
    report = sweeps.means_report((2, 2, 2))
    assert (report.mean_unitary, report.mean_orthogonal, report.upper_bound) == (
        Fraction(2, 3), Fraction(208, 315), Fraction(8, 9)
    )
    assert report.sampled == {}


def test_means_report_sampled():
    dims = (2, 3)
    report = sweeps.means_report(dims, mc_samples=3000, seed=RngSeed(5))
    for name, exact in (("unitary", mean_unitary(dims)), ("orthogonal", mean_orthogonal(dims))):
        estimate = report.sampled[name]
        assert abs(estimate.estimate - float(exact)) < 4 * estimate.std_error


@pytest.mark.slow
def test_three_qubit_summary():
    rows = sweeps.three_qubit_summary(2000, RngSeed(0))
    assert [r.ensemble for r in rows] == ["D(8)", "P(8)", "O(8)", "U(8)"]
    assert [r.analytic_mean for r in rows] == [Fraction(10, 27), Fraction(184, 315), Fraction(208, 315), Fraction(2, 3)]
    assert [r.analytic_max for r in rows] == [Fraction(16, 27), Fraction(64, 81), Fraction(8, 9), Fraction(8, 9)]
    for row in rows:
        assert row.sample_max <= float(row.analytic_max) + 1e-9
