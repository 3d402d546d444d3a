#!/usr/bin/env python3
"""
Tests for the LOCC session harness and transcript audit
"""

import json
import sys
from pathlib import Path

import pytest

# Add src directory to Python path
src_path = Path(__file__).parent / "src"
sys.path.insert(0, str(src_path))

from src.core.brown import bell_basis, bell_state
from src.core.errors import InvalidSubset, LocalityViolation, ProbabilityLeak
from src.core.harness import CONTRACTS, Event, ProtocolTranscript, Session, audit, bits_for, new_session
from src.core.qsim import MeasurementBasis, PauliLabel, StateVector, tensor
from src.core.teleport import SecretQubit, teleport_one_qubit


def _two_party_session():
    return Session(tensor(StateVector.basis("0"), bell_state("psi+")), {"Alice": (1, 2), "Bob": (3,)}, "test")


def test_bits_for():
    assert [bits_for(c) for c in (1, 2, 4, 5, 8, 16)] == [0, 1, 2, 3, 3, 4]
    print("✓ message width is the ceiling log of the outcome count")


def test_ownership_validation():
    with pytest.raises(InvalidSubset):
        Session(StateVector.basis("00"), {"Alice": (1,), "Bob": (1, 2)})
    with pytest.raises(InvalidSubset):
        Session(StateVector.basis("00"), {"Alice": (1,)})
    print("✓ every qubit has exactly one owner")


def test_locality_enforced():
    session = _two_party_session()
    with pytest.raises(LocalityViolation):
        session.apply("Bob", PauliLabel.X.matrix, (1,))
    with pytest.raises(LocalityViolation):
        session.send_outcome("Alice", "Bob", "never-measured")
    with pytest.raises(LocalityViolation):
        session.joint_apply(("Alice",), PauliLabel.X.matrix, (1,))
    print("✓ parties act only on their own qubits and outcomes")


def test_knowledge_flows_with_messages():
    session = _two_party_session()
    session.measure("Alice", bell_basis((1, 2)), 0.1, key="bell")
    assert session.known_outcome("Alice", "bell") is not None
    assert session.known_outcome("Bob", "bell") is None
    message = session.send_outcome("Alice", "Bob", "bell")
    assert message.width == 2
    assert session.known_label("Bob", "bell") == session.known_label("Alice", "bell")
    print("✓ outcomes reach other parties only through messages")


def test_forbidden_remainder_raises_and_leaves_session_intact():
    partial = MeasurementBasis((1, 2), [StateVector.basis("11")], ("11",), remainder_allowed=True)
    session = new_session(tensor(StateVector.basis("0"), bell_state("psi+")), {"Alice": (1, 2), "Bob": (3,)}, "test")
    before = session.state
    with pytest.raises(ProbabilityLeak):
        session.measure("Alice", partial, 0.5, key="partial", forbid_remainder=True)
    assert session.state is before
    assert session.events == [] and session.known_outcome("Alice", "partial") is None

    result = session.measure("Alice", partial, 0.5, key="partial")
    assert result.is_remainder
    print("✓ a forbidden remainder raises ProbabilityLeak before the state changes")


def test_transfer_changes_ownership():
    session = _two_party_session()
    session.transfer_qubits("Alice", "Bob", (2,))
    session.apply("Bob", PauliLabel.Z.matrix, (2,))
    transcript = session.finish()
    assert transcript.ownership["Alice"] == (1, 2)
    assert [e.kind for e in transcript.events] == ["transfer", "unitary"]
    print("✓ transfers move qubits; the transcript keeps the initial ownership")


def test_audit_passes_teleportation():
    transcript = teleport_one_qubit(SecretQubit(0.6, 0.8), 0.4).transcript
    checker = audit(transcript)
    assert checker.all_passed
    assert set(checker.results) == {"parties", "cbits", "joint", "locality", "message_width", "knowledge", "fidelity"}
    print("✓ a genuine teleportation transcript passes every audit check")


def test_transcript_json_round_trip_audits_the_same():
    transcript = teleport_one_qubit(SecretQubit(0.6, 0.8), 0.7).transcript
    text = json.dumps(transcript.to_json(), sort_keys=True)
    restored = ProtocolTranscript.from_json(text)
    assert restored.total_cbits == 2
    assert audit(restored).get_summary() == audit(transcript).get_summary()
    print("✓ audit reads transcripts back from JSON")


def test_audit_catches_telepathy():
    """Dropping Alice's message leaves Bob's correction without its outcome"""
    transcript = teleport_one_qubit(SecretQubit(0.6, 0.8), 0.7).transcript
    transcript.events = [e for e in transcript.events if e.kind != "message"]
    checker = audit(transcript)
    assert not checker.results["knowledge"]["status"]
    assert not checker.results["cbits"]["status"]
    assert checker.get_summary()["status"] == "failed"
    print("✓ corrections that use unsent outcomes are flagged")


def test_audit_catches_foreign_qubits():
    transcript = teleport_one_qubit(SecretQubit(1, 0), 0.2).transcript
    transcript.events.append(Event(kind="unitary", party="Bob", qubits=(1,), operator="X"))
    assert not audit(transcript).results["locality"]["status"]
    print("✓ operations on another party's qubits are flagged")


def test_contracts_and_unknown_protocol():
    assert CONTRACTS["qsts1b"].joint_events == 1
    assert CONTRACTS["dense"].cbits == 0
    transcript = teleport_one_qubit(SecretQubit(1, 0), 0.2).transcript
    assert not audit(transcript, expected="teleport2").all_passed
    with pytest.raises(ValueError):
        audit(transcript, expected="no-such-protocol")
    with pytest.raises(ValueError):
        Event.from_json({"kind": "teleport"})
    print("✓ audits compare against the named contract")


def main():
    """Run all harness tests"""
    print("=" * 60)
    print("LOCC Harness Tests")
    print("=" * 60)

    tests = [
        test_bits_for,
        test_ownership_validation,
        test_locality_enforced,
        test_knowledge_flows_with_messages,
        test_forbidden_remainder_raises_and_leaves_session_intact,
        test_transfer_changes_ownership,
        test_audit_passes_teleportation,
        test_transcript_json_round_trip_audits_the_same,
        test_audit_catches_telepathy,
        test_audit_catches_foreign_qubits,
        test_contracts_and_unknown_protocol,
    ]

    passed = 0
    for test in tests:
        try:
            test()
            passed += 1
        except Exception as e:
            print(f"✗ Test {test.__name__} failed: {e}")

    print("\n" + "=" * 60)
    print(f"HARNESS TEST RESULTS: {passed}/{len(tests)} tests passed")
    print("=" * 60)
    return passed == len(tests)


if __name__ == "__main__":
    success = main()
    sys.exit(0 if success else 1)
