import numpy as np
import pytest

import gate_catalog
from ensembles import haar_unitary_stack, random_product_state
from entanglement import ghz_state
from errors import ArgumentError, PartyIndexError, ValidationError
from tensor_core import (
    DensityOperator,
    GateMatrix,
    PureState,
    SubsystemDims,
    apply_gate,
    basis_state,
    flatten_index,
    kron_all,
    partial_trace,
    purity,
    purity_of_split,
    unflatten_index,
    validate_unitary,
)


def test_subsystem_dims():
    dims = SubsystemDims((2, 3, 4))
    assert dims.n_parties == 3
    assert dims.total_dim == 24
    assert dims[2] == 3
    assert dims.subset_dim({1, 3}) == 8
    assert dims.doubled().dims == (2, 3, 4, 2, 3, 4)
    with pytest.raises(PartyIndexError):
        dims[0]
    with pytest.raises(ArgumentError):
        SubsystemDims((2, 0))
    with pytest.raises(ArgumentError):
        SubsystemDims(())


def test_flatten_index_row_major():
    dims = (2, 3, 4)
    assert flatten_index([1, 2, 3], dims) == 1 * 12 + 2 * 4 + 3
    assert flatten_index([0, 0, 0], dims) == 0
    for flat in range(24):
        assert flatten_index(unflatten_index(flat, dims), dims) == flat


@pytest.mark.parametrize("multi_index", [[2, 0], [0, -1], [0, 0, 0]])
def test_flatten_index_rejects_bad_components(multi_index):
    with pytest.raises(PartyIndexError):
        flatten_index(multi_index, (2, 2))


def test_unflatten_index_out_of_range():
    with pytest.raises(PartyIndexError):
        unflatten_index(8, (2, 2, 2))


def test_basis_state():
    state = basis_state([1, 0, 1], (2, 2, 2))
    assert state.amplitudes[5] == 1.0
    assert np.count_nonzero(state.amplitudes) == 1


def test_pure_state_validation():
    with pytest.raises(ValidationError):
        PureState(np.array([1.0, 1.0]), (2,))
    with pytest.raises(ArgumentError):
        PureState(np.array([1.0, 0.0, 0.0]), (2,))
    state = PureState.normalized([1.0, 1.0j], (2,))
    assert abs(np.linalg.norm(state.amplitudes) - 1) < 1e-14


def test_density_operator_validation():
    with pytest.raises(ValidationError):
        DensityOperator(np.diag([1.5, -0.5]), (2,))
    with pytest.raises(ValidationError):
        DensityOperator(np.array([[0.5, 0.5], [0.0, 0.5]]), (2,))
    with pytest.raises(ValidationError):
        DensityOperator(np.eye(2), (2,))


def test_gate_matrix_validation():
    with pytest.raises(ValidationError):
        GateMatrix(np.array([[1.0, 1.0], [0.0, 1.0]]), (2,))
    with pytest.raises(ArgumentError):
        GateMatrix(np.eye(4), (2, 3))
    gate = validate_unitary(np.eye(6), (2, 3))
    assert gate.n_parties == 2


def test_partial_trace_of_product_state(rng):
    dims = (2, 3, 2)
    state = random_product_state(dims, rng)
    rho = partial_trace(state, [2])
    assert rho.dims.dims == (2, 2)
    assert abs(purity(rho) - 1) < 1e-12
    assert abs(np.trace(rho.matrix) - 1) < 1e-12


def test_partial_trace_everything():
    state = basis_state([0, 1], (2, 2))
    rho = partial_trace(state, [1, 2])
    assert rho.matrix.shape == (1, 1)
    assert abs(rho.matrix[0, 0] - 1) < 1e-14


def test_partial_trace_bell_pair():
    bell = PureState.normalized([1, 0, 0, 1], (2, 2))
    rho = partial_trace(bell, [2])
    assert np.abs(rho.matrix - np.eye(2) / 2).max() < 1e-14


def test_purity_of_split_matches_partial_trace(rng):
    dims = SubsystemDims((2, 3, 2, 2))
    vectors = rng.standard_normal((5, dims.total_dim)) + 1j * rng.standard_normal((5, dims.total_dim))
    vectors /= np.linalg.norm(vectors, axis=1, keepdims=True)
    batch = purity_of_split(vectors, dims, {1, 3})
    for k in range(5):
        state = PureState(vectors[k], dims)
        expected = purity(partial_trace(state, [2, 4]))
        assert abs(batch[k] - expected) < 1e-12
        # complementary sides of a pure state share the purity
        assert abs(purity_of_split(vectors[k], dims, {2, 4}) - expected) < 1e-12


def test_apply_gate_and_kron_all(rng):
    u = haar_unitary_stack(2, 2, rng)
    gate = GateMatrix(kron_all([u[0], u[1]]), (2, 2))
    state = apply_gate(gate, basis_state([0, 0], (2, 2)))
    # a local gate keeps a product state unentangled
    assert abs(purity_of_split(state.amplitudes, state.dims, {1}) - 1) < 1e-12
    with pytest.raises(ArgumentError):
        kron_all([np.ones((2, 3))])


def test_partial_trace_ghz():
    rho = partial_trace(ghz_state(3), [3])
    expected = np.zeros((4, 4))
    expected[0, 0] = expected[3, 3] = 0.5
    assert np.abs(rho.matrix - expected).max() < 1e-14


@pytest.mark.parametrize("first,then,together", [
    ([2], [3], [2, 4]),
    ([1, 3], [1], [1, 2, 3]),
    ([4], [], [4]),
    ([], [1, 2], [1, 2]),
])
def test_partial_trace_composes(rng, first, then, together):
    dims = (2, 3, 2, 2)
    vector = rng.standard_normal(24) + 1j * rng.standard_normal(24)
    state = PureState.normalized(vector, dims)
    # labels of the second trace refer to the parties that survived the first
    twice = partial_trace(partial_trace(state, first), then)
    once = partial_trace(state, together)
    assert twice.dims == once.dims
    assert np.abs(twice.matrix - once.matrix).max() < 1e-12


def test_purity_is_local_unitary_invariant(rng):
    dims = (2, 3, 2)
    vector = rng.standard_normal(12) + 1j * rng.standard_normal(12)
    state = PureState.normalized(vector, dims)
    rho = partial_trace(state, [3])
    local = kron_all([haar_unitary_stack(2, 1, rng)[0], haar_unitary_stack(3, 1, rng)[0]])
    rotated = DensityOperator(local @ rho.matrix @ local.conj().T, rho.dims)
    assert abs(purity(rotated) - purity(rho)) < 1e-10


def test_apply_gate_examples():
    swapped = apply_gate(gate_catalog.swap(2), basis_state([0, 1], (2, 2)))
    assert np.abs(swapped.amplitudes - basis_state([1, 0], (2, 2)).amplitudes).max() < 1e-15
    flipped = apply_gate(gate_catalog.toffoli(), basis_state([1, 1, 0], (2, 2, 2)))
    assert np.abs(flipped.amplitudes - basis_state([1, 1, 1], (2, 2, 2)).amplitudes).max() < 1e-15


def test_kron_all_index_convention():
    x = np.array([[0, 1], [1, 0]])
    gate = GateMatrix(kron_all([x, np.eye(2)]), (2, 2))
    state = apply_gate(gate, basis_state([0, 0], (2, 2)))
    assert np.abs(state.amplitudes - basis_state([1, 0], (2, 2)).amplitudes).max() < 1e-15
    assert np.array_equal(kron_all([np.eye(2), np.eye(2)]), np.eye(4))
    assert kron_all([np.eye(2), np.eye(3), np.eye(4)]).shape == (24, 24)
