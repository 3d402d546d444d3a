#!/usr/bin/env python3
"""
Tests for the Brown-state constructions
"""

import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

# Add src directory to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.core.brown import (
    BELL_NAMES,
    GeneralizedIndex,
    bell_state,
    brown_state,
    build_ub,
    check_weight_conditions,
    generalized_brown,
    omega_form_state,
    omega_relabeling_unitary,
    prepare_brown_via_circuit,
    ub_to_json,
    w_state_via_cnot,
    weight_entropy,
    weighted_brown,
    weighted_reductions,
)
from src.core.errors import InvalidState, UnnormalizedWeights
from src.core.qsim import apply_on_subset, fidelity

AMPLITUDE = 1 / (2 * np.sqrt(2))


def test_literal_state_terms():
    """Eight computational terms, each of magnitude 1/(2 sqrt 2)"""
    terms = brown_state().nonzero_terms()
    assert len(terms) == 8
    assert_allclose([abs(a) for _, a in terms], [AMPLITUDE] * 8, atol=1e-15)
    assert dict(terms)["00101"] == pytest.approx(AMPLITUDE)
    assert dict(terms)["00110"] == pytest.approx(-AMPLITUDE)
    print("✓ literal Brown state has the expected eight terms")


def test_bell_states_orthonormal():
    rows = np.array([bell_state(name).amplitudes for name in BELL_NAMES])
    assert_allclose(rows.conj() @ rows.T, np.eye(4), atol=1e-15)
    with pytest.raises(InvalidState):
        bell_state("chi+")
    print("✓ Bell states are orthonormal")


def test_ub_completed_at_row_22():
    ub = build_ub()
    assert ub.dim == 32
    assert ub.is_exactly_unitary()
    assert len(ub.completed) == 1
    assert ub.completed[0][0] == 22
    exported = ub_to_json()
    assert exported["dim"] == 32
    assert sum(abs(v) for row in exported["matrix"] for v in row) == 32
    print("✓ U_b is an exact signed permutation, completed at row 22")


def test_w_intermediate():
    state = w_state_via_cnot()
    assert sorted(bits for bits, _ in state.nonzero_terms()) == ["001", "010", "100", "111"]
    assert_allclose([abs(a) for _, a in state.nonzero_terms()], [0.5] * 4, atol=1e-15)
    print("✓ the CNOT stage spreads over the four branch prefixes")


def test_circuit_matches_literal():
    assert fidelity(prepare_brown_via_circuit(), brown_state()) >= 1 - 1e-12
    print("✓ circuit preparation reproduces the literal state")


def test_weighted_uniform_is_brown():
    assert fidelity(weighted_brown((0.5, 0.5, 0.5, 0.5)), brown_state()) == pytest.approx(1.0)
    with pytest.raises(UnnormalizedWeights):
        weighted_brown((1.0, 1.0, 0.0, 0.0))
    print("✓ uniform weights give the Brown state; unnormalized weights are rejected")


def test_weight_conditions():
    uniform = check_weight_conditions((0.5, 0.5, 0.5, 0.5))
    assert uniform.satisfied
    assert uniform.residual_21 == pytest.approx(0.0, abs=1e-12)
    assert uniform.residual_22 == pytest.approx(0.0, abs=1e-12)

    single = check_weight_conditions((1.0, 0.0, 0.0, 0.0))
    assert not single.satisfied
    assert single.residual_21 == pytest.approx(2.0)
    assert single.residual_22 == pytest.approx(0.5)
    assert weight_entropy((0.5, 0.5, 0.5, 0.5)) == pytest.approx(2.0)
    print("✓ weight relations evaluated literally")


def test_weighted_reduction_entropies():
    signs = np.array(np.meshgrid(*[[1, -1]] * 4)).T.reshape(-1, 4)
    for pattern in signs:
        weights = tuple(0.5 * pattern)
        assert check_weight_conditions(weights).satisfied
        reductions = weighted_reductions(weights)
        assert reductions["entropy_45"] == pytest.approx(2.0, abs=1e-9)
        assert reductions["entropy_5"] == pytest.approx(1.0, abs=1e-9)
        assert_allclose(reductions["single_qubit_purity"], [0.5] * 5, atol=1e-12)

    rng = np.random.default_rng(8)
    for _ in range(10):
        raw = rng.normal(size=4)
        weights = tuple(raw / np.linalg.norm(raw))
        assert weighted_reductions(weights)["entropy_45"] == pytest.approx(weight_entropy(weights), abs=1e-9)
    print("✓ weights meeting both relations give S(4,5) = 2 and S(5) = 1")


def test_generalized_state():
    assert generalized_brown(GeneralizedIndex(2, ("00", "11", "10", "01"))).n_qubits == 7
    assert fidelity(generalized_brown(GeneralizedIndex.default(0)), brown_state()) == pytest.approx(1.0)
    with pytest.raises(InvalidState):
        GeneralizedIndex.default(1)
    with pytest.raises(InvalidState):
        GeneralizedIndex(2, ("00", "00", "10", "01"))
    print("✓ generalized family: n=0 is Brown, n=1 cannot hold four labels")


def test_omega_relabeling():
    relabeled = apply_on_subset(brown_state(), omega_relabeling_unitary(), (1, 2, 3))
    assert fidelity(relabeled, omega_form_state()) >= 1 - 1e-12
    print("✓ the Ω form is a local relabeling of the Brown state")


def main():
    """Run all construction tests"""
    print("=" * 60)
    print("Brown State Construction Tests")
    print("=" * 60)

    tests = [
        test_literal_state_terms,
        test_bell_states_orthonormal,
        test_ub_completed_at_row_22,
        test_w_intermediate,
        test_circuit_matches_literal,
        test_weighted_uniform_is_brown,
        test_weight_conditions,
        test_weighted_reduction_entropies,
        test_generalized_state,
        test_omega_relabeling,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"✗ Test {test.__name__} failed: {e}")

    print("\n" + "=" * 60)
    print(f"CONSTRUCTION TEST RESULTS: {passed}/{len(tests)} tests passed")
    print("=" * 60)
    return passed == len(tests)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
