#!/usr/bin/env python3
"""
Tests for the dense state-vector simulator
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

# Add src directory to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.core.errors import InvalidState, InvalidSubset, NonUnitaryOperator, ProbabilityLeak
from src.core.qsim import (
    DensityMatrix,
    MeasurementBasis,
    PauliLabel,
    StateVector,
    apply_on_subset,
    complete_unitary,
    computational_basis,
    fidelity,
    is_unitary,
    measure_in_basis,
    partial_trace,
    pauli_product,
    permute_qubits,
    plus_minus_basis,
    random_state,
    schmidt_coefficients,
    tensor,
    von_neumann_entropy,
)

SQRT_HALF = 1 / np.sqrt(2)
PLUS = StateVector(np.array([SQRT_HALF, SQRT_HALF]))
BELL = StateVector(np.array([SQRT_HALF, 0, 0, SQRT_HALF]))


def test_tensor_is_msb_first():
    """Qubit 1 is the most significant bit"""
    state = tensor(StateVector.basis("1"), StateVector.basis("0"))
    assert state.amplitude("10") == 1
    assert state.amplitude(2) == 1
    print("✓ tensor places qubit 1 on the most significant bit")


def test_unnormalized_state_rejected():
    with pytest.raises(InvalidState):
        StateVector(np.array([1.0, 1.0]))
    with pytest.raises(InvalidState):
        StateVector(np.array([1.0, 0.0, 0.0]))
    print("✓ unnormalized and non power-of-two registers rejected")


def test_apply_on_subset_targets_labels():
    state = apply_on_subset(StateVector.basis("000"), PauliLabel.X.matrix, (2,))
    assert state.amplitude("010") == 1
    with pytest.raises(NonUnitaryOperator):
        apply_on_subset(StateVector.basis("00"), np.array([[1, 1], [0, 1]]), (1,))
    with pytest.raises(InvalidSubset):
        apply_on_subset(StateVector.basis("00"), PauliLabel.X.matrix, (3,))
    print("✓ apply_on_subset acts on the named qubit and validates its inputs")


def test_measurement_follows_draw():
    basis = computational_basis((1,))
    low = measure_in_basis(PLUS, basis, 0.3)
    high = measure_in_basis(PLUS, basis, 0.7)
    assert (low.label, high.label) == ("0", "1")
    assert_allclose(low.probabilities, [0.5, 0.5], atol=1e-12)
    assert low.residual.n_qubits == 0
    print("✓ inverse-CDF outcome selection")


def test_measurement_remainder():
    partial = MeasurementBasis((1,), np.array([[1, 0]]), ("zero",))
    with pytest.raises(ProbabilityLeak):
        measure_in_basis(PLUS, partial, 0.2)

    allowed = MeasurementBasis((1,), np.array([[1, 0]]), ("zero",), remainder_allowed=True)
    result = measure_in_basis(PLUS, allowed, 0.9)
    assert result.is_remainder
    assert result.label == "remainder"
    assert fidelity(result.collapsed, StateVector.basis("1")) == pytest.approx(1.0)
    print("✓ incomplete bases leak unless a remainder outcome is allowed")


def test_measurement_post_state_on_subset():
    result = measure_in_basis(tensor(BELL, StateVector.basis("1")), computational_basis((1,)), 0.1)
    assert result.label == "0"
    assert fidelity(result.post_state, StateVector.basis("01")) == pytest.approx(1.0)
    print("✓ post-measurement residual on the remaining qubits")


def test_partial_trace_and_entropy():
    rho = partial_trace(BELL, (1,))
    assert_allclose(rho.entries, np.eye(2) / 2, atol=1e-12)
    assert von_neumann_entropy(rho) == pytest.approx(1.0)
    assert von_neumann_entropy(partial_trace(StateVector.basis("01"), (2,))) == pytest.approx(0.0)
    print("✓ partial trace of a Bell pair is maximally mixed")


def test_density_matrix_validation():
    with pytest.raises(InvalidState):
        DensityMatrix(np.array([[0.5, 0.5], [0.0, 0.5]]))
    with pytest.raises(InvalidState):
        DensityMatrix(np.eye(2))
    print("✓ density matrices must be Hermitian with unit trace")


def test_fidelity_ignores_global_phase():
    rotated = StateVector(-1j * BELL.amplitudes)
    assert fidelity(BELL, rotated) == pytest.approx(1.0)
    print("✓ fidelity is phase insensitive")


def test_permute_qubits():
    moved = permute_qubits(StateVector.basis("100"), (3, 1, 2))
    assert moved.amplitude("001") == 1
    with pytest.raises(InvalidSubset):
        permute_qubits(StateVector.basis("10"), (1, 1))
    print("✓ permute_qubits moves qubit i to perm(i)")


def test_pauli_labels():
    assert PauliLabel.parse("s1") is PauliLabel.X
    assert PauliLabel.parse("is2") is PauliLabel.Y_SIGNED
    assert_allclose(PauliLabel.Y_SIGNED.matrix, [[0, 1], [-1, 0]])
    assert pauli_product([PauliLabel.Z, PauliLabel.X]).shape == (4, 4)
    with pytest.raises(ValueError):
        PauliLabel.parse("s4")
    print("✓ Pauli labels and aliases")


def test_complete_unitary_maps_sources():
    sources = np.array([[1], [0], [0], [0]], dtype=complex)
    targets = BELL.amplitudes.reshape(4, 1)
    u = complete_unitary(sources, targets)
    assert is_unitary(u)
    assert_allclose(u @ sources[:, 0], BELL.amplitudes, atol=1e-12)
    print("✓ complete_unitary extends a partial isometry")


def test_bases_and_schmidt():
    assert plus_minus_basis((1, 2)).labels == ("++", "+-", "-+", "--")
    assert_allclose(schmidt_coefficients(BELL, (1,)), [SQRT_HALF, SQRT_HALF], atol=1e-12)
    print("✓ ± basis labels and Schmidt coefficients")


def test_random_state_reproducible():
    a = random_state(3, np.random.default_rng(11))
    b = random_state(3, np.random.default_rng(11))
    assert_allclose(a.amplitudes, b.amplitudes)
    assert np.linalg.norm(a.amplitudes) == pytest.approx(1.0)
    print("✓ seeded random states repeat")


def test_state_json():
    state = StateVector.from_json(BELL.to_json())
    assert fidelity(state, BELL) == pytest.approx(1.0)
    with pytest.raises(InvalidState):
        StateVector.from_json({"n": 2, "amps": [[1, 0]]})
    print("✓ state JSON is re-validated on read")


def main():
    """Run all simulator tests"""
    print("=" * 60)
    print("Simulator Core Tests")
    print("=" * 60)

    tests = [
        test_tensor_is_msb_first,
        test_unnormalized_state_rejected,
        test_apply_on_subset_targets_labels,
        test_measurement_follows_draw,
        test_measurement_remainder,
        test_measurement_post_state_on_subset,
        test_partial_trace_and_entropy,
        test_density_matrix_validation,
        test_fidelity_ignores_global_phase,
        test_permute_qubits,
        test_pauli_labels,
        test_complete_unitary_maps_sources,
        test_bases_and_schmidt,
        test_random_state_reproducible,
        test_state_json,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"✗ Test {test.__name__} failed: {e}")

    print("\n" + "=" * 60)
    print(f"SIMULATOR TEST RESULTS: {passed}/{len(tests)} tests passed")
    print("=" * 60)
    return passed == len(tests)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
