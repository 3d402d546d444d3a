"""
Superdense coding of five classical bits through three qubits of the Brown state

Alice encodes by applying a Pauli triple to qubits 1, 2, 3 and sends them to
Bob, who already holds qubits 4 and 5 and measures all five in the codeword
basis.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.logger import get_logger
from .brown import GeneralizedIndex, bell_state, brown_state, generalized_brown
from .diagnostics import dense_capacity
from .errors import GramFailure, InvalidState, Undecodable
from .harness import ProtocolTranscript, new_session
from .oracle import compare_vectors
from .qsim import (
    MeasurementBasis,
    MeasurementResult,
    PauliLabel,
    StateVector,
    apply_on_subset,
    measure_in_basis,
    partial_trace,
    pauli_product,
    von_neumann_entropy,
)
from .tables import parse_triple, printed_vector, section_rows

ALICE_QUBITS = (1, 2, 3)
BOB_QUBITS = (4, 5)
GRAM_TOL = 1e-10
DECODE_TOL = 1e-8
MESSAGE_BITS = 5


@dataclass(frozen=True, eq=False)
class DenseCode:
    message: int
    unitary_triple: Tuple[PauliLabel, ...]
    row: str
    state: StateVector

    @property
    def symbol(self) -> str:
        return "⊗".join(label.symbol for label in self.unitary_triple) + "⊗I⊗I"

    def to_json(self) -> Dict:
        return {
            "message": self.message,
            "bits": format(self.message, f"0{MESSAGE_BITS}b"),
            "row": self.row,
            "triple": [label.value for label in self.unitary_triple],
            "state": self.state.to_json(),
        }


def encode_with(triple: Sequence[PauliLabel], state: Optional[StateVector] = None) -> StateVector:
    """Apply a Pauli triple to qubits 1, 2, 3"""
    state = state or brown_state()
    return apply_on_subset(state, pauli_product(triple), ALICE_QUBITS)


def gram_matrix(states: Sequence[StateVector]) -> np.ndarray:
    rows = np.array([s.amplitudes for s in states])
    return rows.conj() @ rows.T


def _require_orthonormal(states: Sequence[StateVector], what: str):
    gram = gram_matrix(states)
    deviation = float(np.max(np.abs(gram - np.eye(len(states)))))
    if deviation > GRAM_TOL:
        raise GramFailure(f"{what}: Gram matrix deviates from identity by {deviation:.3e}")
    get_logger().log_check(what, "PASS", f"{len(states)} states, max deviation {deviation:.3e}")


@lru_cache(maxsize=1)
def _code_table() -> Tuple[DenseCode, ...]:
    codes = []
    for message, row in enumerate(section_rows("dense")):
        triple = parse_triple(row.get("shipped_triple", row["triple"]))
        codes.append(DenseCode(message, triple, row["label"], encode_with(triple)))
    _require_orthonormal([c.state for c in codes], "dense code table")
    return tuple(codes)


def build_code_table() -> List[DenseCode]:
    """The 32 shipped codewords, message m taken from row m + 1 of the printed order"""
    return list(_code_table())


def encode(message: int) -> StateVector:
    if not isinstance(message, (int, np.integer)) or not 0 <= int(message) < 2 ** MESSAGE_BITS:
        raise ValueError(f"Message must be an integer in [0, {2 ** MESSAGE_BITS - 1}], got {message!r}")
    return _code_table()[int(message)].state


def decode(state: StateVector, tol: float = DECODE_TOL) -> int:
    """The unique message whose codeword overlaps the state above 1 - tol"""
    if state.n_qubits != 5:
        raise Undecodable(f"Codewords live on 5 qubits, got {state.n_qubits}")
    rows = np.array([c.state.amplitudes for c in _code_table()])
    overlaps = np.abs(rows.conj() @ state.amplitudes) ** 2
    matches = np.flatnonzero(overlaps > 1 - tol)
    if len(matches) != 1:
        raise Undecodable(f"State matches no codeword (best overlap {float(overlaps.max()):.6f})")
    return int(matches[0])


@lru_cache(maxsize=1)
def codeword_basis() -> MeasurementBasis:
    codes = _code_table()
    return MeasurementBasis(
        ALICE_QUBITS + BOB_QUBITS,
        np.array([c.state.amplitudes for c in codes]),
        tuple(str(c.message) for c in codes),
    )


def decode_by_measurement(state: StateVector, random_draw: float) -> Tuple[int, MeasurementResult]:
    """Bob's five-qubit measurement in the codeword basis"""
    result = measure_in_basis(state, codeword_basis(), random_draw)
    return result.outcome, result


def run_dense(message: int, random_draw: float) -> ProtocolTranscript:
    """Encode, hand Alice's qubits to Bob, and let Bob measure"""
    if not 0 <= message < 2 ** MESSAGE_BITS:
        raise ValueError(f"Message must lie in [0, {2 ** MESSAGE_BITS - 1}], got {message}")
    code = _code_table()[message]
    session = new_session(brown_state(), {"Alice": ALICE_QUBITS, "Bob": BOB_QUBITS}, protocol="dense")
    session.apply("Alice", pauli_product(code.unitary_triple), ALICE_QUBITS, code.symbol)
    sent = session.state
    session.transfer_qubits("Alice", "Bob", ALICE_QUBITS)
    result = session.measure("Bob", codeword_basis(), random_draw, key="bob", basis_name="codewords")
    decoded = result.outcome
    return session.finish(
        fidelity=float(abs(np.vdot(code.state.amplitudes, sent.amplitudes)) ** 2),
        details={
            "message": message,
            "decoded": decoded,
            "triple": [label.value for label in code.unitary_triple],
            "qubits_sent": len(ALICE_QUBITS),
        },
    )


def reconcile_code_table() -> List[Dict]:
    """Printed encoded states against the states computed from the shipped triples"""
    ledger = []
    for code, row in zip(_code_table(), section_rows("dense")):
        entry = {
            "label": row["label"],
            "printed_triple": list(row["triple"]),
            "shipped_triple": [label.value for label in code.unitary_triple],
        }
        entry.update(compare_vectors(printed_vector(row["state"]), code.state.amplitudes))
        if "note" in row:
            entry["note"] = row["note"]
        ledger.append(entry)
    return ledger


def count_distinct_encodings() -> Dict:
    """All 64 Pauli triples grouped by encoded state up to global phase"""
    classes: List[Tuple[StateVector, List[Tuple[PauliLabel, ...]]]] = []
    for triple in itertools.product(PauliLabel, repeat=3):
        state = encode_with(triple)
        for representative, members in classes:
            if abs(np.vdot(representative.amplitudes, state.amplitudes)) > 1 - GRAM_TOL:
                members.append(triple)
                break
        else:
            classes.append((state, [triple]))
    gram = gram_matrix([rep for rep, _ in classes])
    return {
        "total": 4 ** 3,
        "distinct": len(classes),
        "orthonormal": bool(np.max(np.abs(gram - np.eye(len(classes)))) < GRAM_TOL),
        "classes": [[[label.value for label in t] for t in members] for _, members in classes],
    }


def four_bit_subtable() -> List[DenseCode]:
    """Codewords whose third unitary is the identity: 16 states, two qubits sent"""
    codes = [c for c in _code_table() if c.unitary_triple[2] is PauliLabel.I]
    _require_orthonormal([c.state for c in codes], "four-bit sub-table")
    return codes


def bob_reduced_states() -> Dict:
    """Bob's two qubits look the same for every message"""
    reference = np.eye(4) / 4
    deviations = [float(np.max(np.abs(partial_trace(c.state, BOB_QUBITS).entries - reference))) for c in _code_table()]
    return {"max_deviation": max(deviations), "messages": len(deviations)}


def _greedy_orthogonal_count(state: StateVector, alice: Sequence[int]) -> int:
    accepted: List[np.ndarray] = []
    for labels in itertools.product(PauliLabel, repeat=len(alice)):
        vec = apply_on_subset(state, pauli_product(labels), alice).amplitudes
        if all(abs(np.vdot(a, vec)) < GRAM_TOL for a in accepted):
            accepted.append(vec)
    return len(accepted)


# Pauli products on n + 3 qubits grow as 4^(n+3)
MAX_ORTHOGONAL_SEARCH_N = 3


def scaling_report(n_values: Sequence[int]) -> List[Dict]:
    """Capacity of the generalized state with Alice holding the first n + 3 qubits"""
    rows = []
    for n in n_values:
        entry: Dict = {"n": n, "qubits_sent": n + 3}
        try:
            idx = GeneralizedIndex.default(n)
        except InvalidState as e:
            entry.update({"valid": False, "reason": str(e)})
            rows.append(entry)
            continue
        if n + 5 > 12:
            entry.update({"valid": False, "reason": "register larger than 12 qubits"})
            rows.append(entry)
            continue
        state = generalized_brown(idx)
        alice = tuple(range(1, n + 4))
        capacity = dense_capacity(state, alice)
        entry.update({
            "valid": True,
            "capacity": capacity,
            "bits_per_qubit": capacity / (n + 3),
            "receiver_entropy": von_neumann_entropy(partial_trace(state, (n + 4, n + 5))),
        })
        if n <= MAX_ORTHOGONAL_SEARCH_N:
            entry["orthogonal_encodings"] = _greedy_orthogonal_count(state, alice)
        rows.append(entry)

    bell = bell_state("psi+")
    rows.append({
        "n": None,
        "label": "bell",
        "qubits_sent": 1,
        "valid": True,
        "capacity": dense_capacity(bell, (1,)),
        "bits_per_qubit": dense_capacity(bell, (1,)),
        "orthogonal_encodings": _greedy_orthogonal_count(bell, (1,)),
    })
    return rows
