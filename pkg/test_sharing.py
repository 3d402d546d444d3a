#!/usr/bin/env python3
"""
Tests for controlled quantum state sharing among Alice, Bob and Charlie
"""

import itertools
import sys
from pathlib import Path

import numpy as np
import pytest
from numpy.testing import assert_allclose

# Add src directory to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.core import sharing
from src.core.errors import ProbabilityLeak
from src.core.harness import audit
from src.core.qsim import StateVector, is_unitary
from src.core.teleport import SecretQubit, random_secret

DRAW_GRID = (0.05, 0.3, 0.55, 0.8, 0.97)

EXPECTED = {
    # (protocol, variant): (cbits, joint events, draws)
    ("p1", "standard"): (4, 0, 2),
    ("p1", "bob_split"): (5, 0, 3),
    ("p2", "standard"): (5, 1, 2),
    ("p2", "bell_then_single"): (5, 1, 3),
    ("two-qubit", "standard"): (5, 0, 2),
    ("two-qubit", "cooperative"): (5, 1, 2),
}


def _draw_sets(count):
    return [[DRAW_GRID[(i + k) % len(DRAW_GRID)] for k in range(count)] for i in range(len(DRAW_GRID))]


def _branch_draws(protocol, variant, secret, floor=1e-6):
    """Draw lists that steer a run into each outcome branch, with the branch labels"""
    alice = sharing.alice_stages(protocol, variant)
    stages = alice + sharing.bob_stages(protocol, variant)
    probabilities = sharing.branch_probabilities(protocol, secret, variant)
    by_index = {}
    for combo in itertools.product(*(range(b.count) for b in stages)):
        by_index[combo] = probabilities["|".join(b.labels[i] for b, i in zip(stages, combo))]

    def mass(prefix):
        return sum(p for combo, p in by_index.items() if combo[:len(prefix)] == prefix)

    for combo, p in by_index.items():
        if p < floor:
            continue
        draws = []
        for depth, index in enumerate(combo):
            prefix = combo[:depth]
            below = sum(mass(prefix + (m,)) for m in range(index))
            draws.append((below + mass(prefix + (index,)) / 2) / mass(prefix))
        labels = [b.labels[i] for b, i in zip(stages, combo)]
        yield draws, "|".join(labels[:len(alice)]), "|".join(labels[len(alice):]), p


@pytest.mark.parametrize("protocol,variant", sorted(EXPECTED))
def test_sharing_recovers_secret(protocol, variant):
    cbits, joint, draws = EXPECTED[(protocol, variant)]
    assert sharing.draws_needed(protocol, variant) == draws
    secret = random_secret(sharing.SECRET_QUBITS[protocol], np.random.default_rng(21))
    for draw_set in _draw_sets(draws):
        outcome = sharing.run_sharing(protocol, secret, draw_set, variant)
        assert outcome.fidelity >= 1 - 1e-10
        assert outcome.transcript.total_cbits == cbits
        assert outcome.transcript.joint_events == joint
        assert audit(outcome.transcript).all_passed
    print(f"✓ {protocol}/{variant}: fidelity 1 with {cbits} cbits")


def test_p1_charlie_receives_four_bits():
    outcome = sharing.qsts_one_qubit_p1(SecretQubit(0.6, 0.8), [0.2, 0.7])
    assert outcome.cbits_to_charlie == 4
    assert set(outcome.transcript.cbit_totals) == {"Alice->Charlie", "Bob->Charlie"}
    assert outcome.to_json()["fidelity"] == pytest.approx(1.0)
    print("✓ p1: Charlie gets two bits each from Alice and Bob")


def test_p2_routes_alice_through_bob():
    outcome = sharing.qsts_one_qubit_p2(SecretQubit(0.6, 0.8), [0.4, 0.6])
    routes = outcome.transcript.cbit_totals
    assert routes["Alice->Bob"] == 3
    assert routes["Bob->Charlie"] == 2
    print("✓ p2: Alice tells Bob, Bob tells Charlie")


def test_branch_probabilities_sum_to_one():
    secret = random_secret(1, np.random.default_rng(2))
    for protocol, variant in (("p1", "standard"), ("p2", "standard"), ("p1", "bob_split")):
        assert sum(sharing.branch_probabilities(protocol, secret, variant).values()) == pytest.approx(1.0)
    two = random_secret(2, np.random.default_rng(2))
    assert sum(sharing.branch_probabilities("two-qubit", two).values()) == pytest.approx(1.0)
    print("✓ branch probabilities are complete")


def test_charlie_learns_nothing_before_messages():
    rng = np.random.default_rng(50)
    for protocol in ("p1", "p2", "two-qubit"):
        dim = 2 ** sharing.SECRET_QUBITS[protocol]
        for _ in range(50):
            secret = random_secret(sharing.SECRET_QUBITS[protocol], rng)
            assert_allclose(sharing.charlie_ensemble_state(protocol, secret).entries, np.eye(dim) / dim, atol=1e-10)
    print("✓ Charlie's state before any message is maximally mixed for 50 secrets per protocol")


def test_p1_charlie_blind_to_each_alice_outcome():
    rng = np.random.default_rng(51)
    for _ in range(50):
        secret = random_secret(1, rng)
        for outcome in range(4):
            state = sharing.charlie_state_after_alice("p1", secret, outcome)
            assert_allclose(state.entries, np.eye(2) / 2, atol=1e-10)
    print("✓ p1: Charlie's qubit stays maximally mixed whatever Alice measured")


def test_every_branch_recovers_many_secrets():
    rng = np.random.default_rng(100)
    for protocol, variant in sorted(EXPECTED):
        count = 100 if variant == "standard" else 20
        for _ in range(count):
            secret = random_secret(sharing.SECRET_QUBITS[protocol], rng)
            covered = 0.0
            for draws, alice_label, bob_label, p in _branch_draws(protocol, variant, secret):
                outcome = sharing.run_sharing(protocol, secret, draws, variant)
                assert (outcome.alice_outcome, outcome.bob_outcome) == (alice_label, bob_label)
                assert outcome.fidelity >= 1 - 1e-10
                covered += p
            assert covered == pytest.approx(1.0, abs=1e-4)
    print("✓ every outcome branch of every scheme returns the secret to Charlie")


def test_foreign_resource_leaks_probability():
    """Bob's qubits holding |000>-|111> fall outside his derived basis"""
    amplitudes = np.zeros(32, dtype=complex)
    amplitudes[0b00000], amplitudes[0b01110] = 1 / np.sqrt(2), -1 / np.sqrt(2)
    resource = StateVector(amplitudes)
    with pytest.raises(ProbabilityLeak):
        sharing.qsts_one_qubit_p1(SecretQubit(0.6, 0.8), [0.3, 0.5], resource=resource)
    with pytest.raises(ProbabilityLeak):
        sharing.run_sharing("p1", SecretQubit(1, 0), [0.9, 0.1], resource=resource)
    print("✓ a non-Brown resource raises ProbabilityLeak instead of a bogus correction")


def test_conversions_are_unitary():
    for variant in ("standard", "bell_then_single"):
        assert all(is_unitary(u) for u in sharing.p2_conversions(variant).values())
    assert all(is_unitary(u) for u in sharing.cooperative_conversions().values())
    print("✓ joint Bob-Charlie conversions are unitary")


def test_two_qubit_corrections_are_unitary():
    corrections = sharing.charlie_corrections("two-qubit")
    assert len(corrections) == 32
    assert all(is_unitary(c.matrix) for c in corrections.values())
    print("✓ Charlie's two-qubit corrections exist for every branch")


def test_unknown_variant_rejected():
    with pytest.raises(ValueError):
        sharing.check_variant("p1", "cooperative")
    with pytest.raises(ValueError):
        sharing.check_variant("p3", "standard")
    with pytest.raises(ValueError):
        sharing.qsts_one_qubit_p1(SecretQubit(1, 0), [0.5])
    print("✓ unknown protocols, variants and short draw lists are rejected")


def main():
    """Run all sharing tests"""
    print("=" * 60)
    print("Quantum State Sharing Tests")
    print("=" * 60)

    tests = [(f"test_sharing_recovers_secret[{p}-{v}]", lambda p=p, v=v: test_sharing_recovers_secret(p, v))
             for p, v in sorted(EXPECTED)]
    tests += [(t.__name__, t) for t in (
        test_p1_charlie_receives_four_bits,
        test_p2_routes_alice_through_bob,
        test_branch_probabilities_sum_to_one,
        test_charlie_learns_nothing_before_messages,
        test_p1_charlie_blind_to_each_alice_outcome,
        test_every_branch_recovers_many_secrets,
        test_foreign_resource_leaks_probability,
        test_conversions_are_unitary,
        test_two_qubit_corrections_are_unitary,
        test_unknown_variant_rejected,
    )]

    passed = 0
    for name, test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"✗ Test {name} failed: {e}")

    print("\n" + "=" * 60)
    print(f"SHARING TEST RESULTS: {passed}/{len(tests)} tests passed")
    print("=" * 60)
    return passed == len(tests)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
