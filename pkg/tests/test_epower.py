from fractions import Fraction

import numpy as np
import pytest

import gate_catalog
from ensembles import RngSeed, haar_unitary, haar_unitary_stack, mc_entangling_power
from entanglement import Bipartition, bipartitions, is_ame
from epower import (
    bound_gap_terms,
    choi_state,
    epower_bipartition,
    epower_bipartition_indexform,
    epower_one_tangle,
    epower_one_tangle_batch,
    group_mean_inputs,
    max_tau_one,
    mean_orthogonal,
    mean_orthogonal_tripartite,
    mean_qudit_orthogonal,
    mean_qudit_unitary,
    mean_unitary,
    mean_unitary_tripartite,
    upper_bound,
    upper_bound_bipartition,
    upper_bound_qudit,
)
from errors import ArgumentError, UnsupportedInputError
from tensor_core import GateMatrix, kron_all

QUBITS3 = (2, 2, 2)


def test_named_gates():
    assert abs(epower_one_tangle(gate_catalog.toffoli()).total - 10 / 27) < 1e-10
    assert abs(epower_one_tangle(gate_catalog.fredkin()).total - 10 / 27) < 1e-10
    assert abs(epower_one_tangle(gate_catalog.identity(QUBITS3)).total) < 1e-12


@pytest.mark.parametrize("theta", np.linspace(0.0, np.pi, 10))
def test_deutsch_family(theta):
    expected = (7 - 3 * np.cos(2 * theta)) / 27
    assert abs(epower_one_tangle(gate_catalog.deutsch(theta)).total - expected) < 1e-10


def test_two_qubit_gates():
    # SWAP maps product states to product states
    assert abs(epower_one_tangle(gate_catalog.swap(2)).total) < 1e-12
    assert abs(epower_one_tangle(gate_catalog.swap(3)).total) < 1e-12
    cz = gate_catalog.g_n(2, np.pi)
    assert abs(epower_one_tangle(cz).total - 4 / 9) < 1e-12


def test_local_gates_do_not_entangle(rng):
    factors = haar_unitary_stack(2, 3, rng)
    gate = GateMatrix(kron_all(list(factors)), QUBITS3)
    assert abs(epower_one_tangle(gate).total) < 1e-10


@pytest.mark.parametrize("dims", [QUBITS3, (2, 3)])
def test_local_invariance(rng, dims):
    total = int(np.prod(dims))
    u = haar_unitary(total, rng, dims=dims)
    before = kron_all([haar_unitary_stack(d, 1, rng)[0] for d in dims])
    after = kron_all([haar_unitary_stack(d, 1, rng)[0] for d in dims])
    dressed = GateMatrix(after @ u.matrix @ before, dims)
    assert abs(epower_one_tangle(dressed).total - epower_one_tangle(u).total) < 1e-10


def test_h_u8_is_maximal():
    gate = gate_catalog.h_u8()
    assert abs(epower_one_tangle(gate).total - 8 / 9) < 1e-10
    assert is_ame(choi_state(gate), tol=1e-8).is_ame
    assert upper_bound(QUBITS3) == Fraction(8, 9)
    for split in bipartitions(3):
        assert all(abs(term.gap) < 1e-10 for term in bound_gap_terms(gate, split))


def test_random_gates_respect_the_bound(rng):
    values = epower_one_tangle_batch(haar_unitary_stack(8, 500, rng), QUBITS3)
    assert values.max() <= 8 / 9 + 1e-10
    assert values.min() >= -1e-12


def test_batch_matches_single(rng):
    dims = (2, 3)
    stack = haar_unitary_stack(6, 4, rng)
    batch = epower_one_tangle_batch(stack, dims)
    for k in range(4):
        assert abs(batch[k] - epower_one_tangle(GateMatrix(stack[k], dims)).total) < 1e-12


def test_report_as_dict():
    payload = epower_one_tangle(gate_catalog.toffoli()).as_dict()
    assert set(payload["per_bipartition"]) == {"1|23", "12|3", "13|2"}
    assert payload["dims"] == [2, 2, 2]


def test_trivial_split_rejected():
    with pytest.raises(ArgumentError):
        epower_bipartition(gate_catalog.toffoli(), Bipartition.of({1, 2, 3}, 3))
    with pytest.raises(ArgumentError):
        epower_bipartition(gate_catalog.toffoli(), Bipartition.of({1}, 2))


def test_index_form_matches_geometric_form(rng):
    for _ in range(50):
        gate = haar_unitary(8, rng, dims=QUBITS3)
        for split in bipartitions(3):
            assert abs(epower_bipartition_indexform(gate, split) - epower_bipartition(gate, split)) < 1e-9


def test_index_form_unequal_dims(rng):
    gate = haar_unitary(12, rng, dims=(2, 2, 3))
    for split in bipartitions(3):
        assert abs(epower_bipartition_indexform(gate, split) - epower_bipartition(gate, split)) < 1e-9


def test_index_form_limits(rng):
    with pytest.raises(UnsupportedInputError):
        epower_bipartition_indexform(gate_catalog.g_n(4, 1.0), bipartitions(4)[0])
    with pytest.raises(UnsupportedInputError):
        epower_bipartition_indexform(haar_unitary(18, rng, dims=(2, 3, 3)), bipartitions(3)[0])


def test_bound_gap_terms_sum_to_slack(rng):
    gate = haar_unitary(12, rng, dims=(2, 2, 3))
    for split in bipartitions(3):
        terms = bound_gap_terms(gate, split)
        assert len(terms) == 8
        assert min(term.gap for term in terms) > -1e-12
        slack = float(upper_bound_bipartition(gate.dims, split)) - epower_bipartition(gate, split)
        assert abs(sum(term.weight * term.gap for term in terms) - slack) < 1e-12


def test_three_qubit_means():
    assert mean_unitary(QUBITS3) == Fraction(2, 3)
    assert mean_orthogonal(QUBITS3) == Fraction(208, 315)
    assert mean_unitary_tripartite(2, 2, 2) == Fraction(2, 3)
    assert mean_orthogonal_tripartite(2, 2, 2) == Fraction(208, 315)


@pytest.mark.parametrize("dims", [(2, 2, 3), (2, 3, 4), (3, 3, 3), (2, 5, 2)])
def test_tripartite_forms_agree(dims):
    assert mean_unitary(dims) == mean_unitary_tripartite(*dims)
    assert mean_orthogonal(dims) == mean_orthogonal_tripartite(*dims)


def test_group_mean_inputs():
    g = group_mean_inputs((2, 3, 4))
    assert g.B == 3 * 4 * 5
    assert g.D == 24
    assert g.C == (2 + 12) + (3 + 8) + (4 + 6)
    assert g.A is not None
    assert group_mean_inputs((2, 2)).A is None


@pytest.mark.parametrize("n", [2, 3, 4, 5])
@pytest.mark.parametrize("d", [2, 3, 4])
def test_qudit_forms_agree(n, d):
    dims = (d,) * n
    assert mean_qudit_unitary(n, d) == mean_unitary(dims)
    assert mean_qudit_orthogonal(n, d) == mean_orthogonal(dims)
    assert abs(float(upper_bound_qudit(n, d)) - float(upper_bound(dims))) < 1e-12


@pytest.mark.parametrize("n,d", [(2, 10**10), (16, 16)])
def test_means_beyond_int64(n, d):
    dims = (d,) * n
    assert d ** n > 2 ** 63
    assert mean_unitary(dims) == mean_qudit_unitary(n, d)
    assert mean_orthogonal(dims) == mean_qudit_orthogonal(n, d)
    assert 0 < mean_unitary(dims) < 2


def test_qudit_values():
    assert mean_qudit_unitary(2, 2) == Fraction(2, 5)
    assert mean_qudit_unitary(3, 3) == Fraction(8, 7)
    for d in range(2, 17):
        assert mean_qudit_unitary(3, d) == Fraction(2 * (d - 1) ** 2, d * d - d + 1)
        assert upper_bound_qudit(3, d) == Fraction(2 * (d * d + d - 2), (1 + d) ** 2)
        assert max_tau_one(d) == Fraction(2 * (d - 1), d)


def test_qubit_ratios():
    ratios = [float(mean_qudit_orthogonal(n, 2) / mean_qudit_unitary(n, 2)) for n in (2, 3, 4)]
    assert np.abs(np.array(ratios) - [0.98765, 0.990476, 0.99497]).max() < 1e-5
    assert ratios == sorted(ratios)
    ratios = [float(mean_qudit_unitary(n, 2) / upper_bound_qudit(n, 2)) for n in (2, 3, 4)]
    assert np.abs(np.array(ratios) - [0.6, 0.75, 0.848]).max() < 1e-3


@pytest.mark.parametrize("d", range(2, 11))
def test_hierarchy(d):
    n = 3
    assert mean_qudit_orthogonal(n, d) < mean_qudit_unitary(n, d) < upper_bound_qudit(n, d) <= max_tau_one(d)


def test_mean_unitary_needs_two_parties():
    with pytest.raises(ArgumentError):
        mean_unitary((4,))
    with pytest.raises(ArgumentError):
        mean_qudit_unitary(3, 1)


def test_closed_form_matches_oracle(seed):
    gate = gate_catalog.toffoli()
    estimate = mc_entangling_power(gate, 20000, seed, shards=4, workers=2)
    assert estimate.std_error < 0.01
    assert abs(estimate.estimate - 10 / 27) < 4 * estimate.std_error


@pytest.mark.slow
@pytest.mark.parametrize("dims,count", [(QUBITS3, 20), ((2, 3), 10), ((2, 2, 3), 10)])
def test_closed_form_matches_oracle_random_gates(rng, dims, count):
    size = int(np.prod(dims))
    for k in range(count):
        gate = haar_unitary(size, rng, dims=dims)
        estimate = mc_entangling_power(gate, 20000, RngSeed(seed=99, stream_id=100 * k))
        assert estimate.std_error < 0.01
        assert abs(estimate.estimate - epower_one_tangle(gate).total) < 4 * estimate.std_error
