#!/usr/bin/env python3
"""
Property-based tests: random secrets, draws and permutations
"""

import sys
from pathlib import Path

import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st
from numpy.testing import assert_allclose

# Add src directory to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.core import dense, sharing
from src.core.qsim import (
    StateVector,
    apply_on_subset,
    complete_unitary,
    compose_permutations,
    fidelity,
    invert_permutation,
    is_unitary,
    partial_trace,
    permute_qubits,
    random_state,
    von_neumann_entropy,
)
from src.core.teleport import random_secret, teleport_one_qubit, teleport_two_qubit
from src.utils.draws import DrawSource

seeds = st.integers(min_value=0, max_value=2**32 - 1)
draws = st.floats(min_value=0.0, max_value=1.0, exclude_max=True, allow_nan=False)
FAST = settings(max_examples=25, deadline=None)


def _random_isometry(rng, dim, k):
    raw = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, _ = np.linalg.qr(raw)
    return q[:, :k]


@FAST
@given(seed=seeds, draw=draws)
def test_one_qubit_teleportation_any_secret(seed, draw):
    run = teleport_one_qubit(random_secret(1, np.random.default_rng(seed)), draw)
    assert run.fidelity >= 1 - 1e-10
    assert run.transcript.total_cbits == 2


@FAST
@given(seed=seeds, draw=draws)
def test_two_qubit_teleportation_any_secret(seed, draw):
    run = teleport_two_qubit(random_secret(2, np.random.default_rng(seed)), draw)
    assert run.fidelity >= 1 - 1e-10
    assert run.transcript.total_cbits == 4


@FAST
@given(seed=seeds, first=draws, second=draws)
def test_state_sharing_any_secret(seed, first, second):
    for protocol in ("p1", "p2", "two-qubit"):
        secret = random_secret(sharing.SECRET_QUBITS[protocol], np.random.default_rng(seed))
        outcome = sharing.run_sharing(protocol, secret, [first, second])
        assert outcome.fidelity >= 1 - 1e-10


@FAST
@given(seed=seeds, perm=st.permutations([1, 2, 3, 4]))
def test_permutation_inverse_restores_state(seed, perm):
    state = random_state(4, np.random.default_rng(seed))
    moved = permute_qubits(state, perm)
    assert_allclose(permute_qubits(moved, invert_permutation(perm)).amplitudes, state.amplitudes, atol=1e-14)


@FAST
@given(seed=seeds, outer=st.permutations([1, 2, 3, 4]), inner=st.permutations([1, 2, 3, 4]))
def test_permutation_composition_law(seed, outer, inner):
    state = random_state(4, np.random.default_rng(seed))
    stepwise = permute_qubits(permute_qubits(state, inner), outer)
    composed = permute_qubits(state, compose_permutations(outer, inner))
    assert_allclose(stepwise.amplitudes, composed.amplitudes, atol=1e-14)


@FAST
@given(seed=seeds, subset=st.lists(st.integers(min_value=1, max_value=5), min_size=1, max_size=3, unique=True))
def test_subset_unitary_then_adjoint_restores_state(seed, subset):
    rng = np.random.default_rng(seed)
    state = random_state(5, rng)
    u = _random_isometry(rng, 2 ** len(subset), 2 ** len(subset))
    moved = apply_on_subset(state, u, subset)
    restored = apply_on_subset(moved, u.conj().T, subset)
    assert_allclose(restored.amplitudes, state.amplitudes, atol=1e-12)


@FAST
@given(seed=seeds, subset=st.sets(st.integers(min_value=1, max_value=5), min_size=1, max_size=4))
def test_pure_state_split_entropies_agree(seed, subset):
    state = random_state(5, np.random.default_rng(seed))
    keep = tuple(sorted(subset))
    rest = tuple(q for q in range(1, 6) if q not in subset)
    rho = partial_trace(state, keep)
    assert abs(np.trace(rho.entries) - 1) < 1e-12
    assert abs(von_neumann_entropy(rho) - von_neumann_entropy(partial_trace(state, rest))) < 1e-9


@FAST
@given(seed=seeds, k=st.integers(min_value=1, max_value=8))
def test_completed_unitary_maps_sources_to_targets(seed, k):
    rng = np.random.default_rng(seed)
    sources = _random_isometry(rng, 8, k)
    targets = _random_isometry(rng, 8, k)
    u = complete_unitary(sources, targets)
    assert is_unitary(u)
    assert_allclose(u @ sources, targets, atol=1e-9)


@FAST
@given(seed=seeds, phase=st.floats(min_value=0.0, max_value=2 * np.pi, allow_nan=False))
def test_fidelity_ignores_global_phase(seed, phase):
    state = random_state(3, np.random.default_rng(seed))
    shifted = StateVector(state.amplitudes * np.exp(1j * phase))
    assert abs(fidelity(state, shifted) - 1.0) < 1e-12


@FAST
@given(message=st.integers(min_value=0, max_value=31), draw=draws)
def test_dense_coding_any_message(message, draw):
    transcript = dense.run_dense(message, draw)
    assert transcript.details["decoded"] == message


@FAST
@given(seed=seeds)
def test_seeded_draws_replay(seed):
    source = DrawSource(seed=seed)
    values = source.take(5)
    assert DrawSource(seed=seed).take(5) == values
    assert DrawSource(draws=source.recorded).take(5) == values
    assert all(0.0 <= v < 1.0 for v in values)


def main():
    """Run all property tests"""
    print("=" * 60)
    print("Property Tests")
    print("=" * 60)

    tests = [
        test_one_qubit_teleportation_any_secret,
        test_two_qubit_teleportation_any_secret,
        test_state_sharing_any_secret,
        test_permutation_inverse_restores_state,
        test_permutation_composition_law,
        test_subset_unitary_then_adjoint_restores_state,
        test_pure_state_split_entropies_agree,
        test_completed_unitary_maps_sources_to_targets,
        test_fidelity_ignores_global_phase,
        test_dense_coding_any_message,
        test_seeded_draws_replay,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            print(f"✓ {test.__name__}")
            passed += 1
        except Exception as e:
            print(f"✗ Test {test.__name__} failed: {e}")

    print("\n" + "=" * 60)
    print(f"PROPERTY TEST RESULTS: {passed}/{len(tests)} tests passed")
    print("=" * 60)
    return passed == len(tests)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
