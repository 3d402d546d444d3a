"""
Teleportation of one and two qubits through the Brown state

Alice's measurement bases and Bob's corrections are derived from the target
residues by the oracle; the printed bases and correction table are only
reconciled against them.
"""

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Mapping, NamedTuple, Optional, Sequence, Tuple

import numpy as np

from ..utils.logger import get_logger
from .brown import brown_state
from .errors import InvalidState, InvalidSubset
from .harness import ProtocolTranscript, Session, new_session
from .oracle import (
    DerivedBasis,
    compare_operators,
    compare_vectors,
    derive_basis,
    required_pauli_correction,
    transfer_columns,
    transfer_unitary,
)
from .qsim import (
    NORM_TOL,
    PauliLabel,
    StateVector,
    fidelity,
    outcome_probabilities,
    pauli_product,
    random_state,
    tensor,
)
from .tables import load_printed_tables, parse_triple, printed_vector, residue_matrix, section_rows


@dataclass(frozen=True)
class SecretQubit:
    """alpha|0> + beta|1>"""

    alpha: complex
    beta: complex

    def __post_init__(self):
        object.__setattr__(self, "alpha", complex(self.alpha))
        object.__setattr__(self, "beta", complex(self.beta))
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"Secret is not normalized: |alpha|^2 + |beta|^2 = {norm!r}")

    @property
    def state(self) -> StateVector:
        return StateVector(np.array([self.alpha, self.beta]))

    @classmethod
    def from_state(cls, state: StateVector) -> "SecretQubit":
        if state.n_qubits != 1:
            raise InvalidState(f"Expected a one-qubit state, got {state.n_qubits} qubits")
        return cls(*state.amplitudes)

    @classmethod
    def from_values(cls, values: Sequence[complex], normalize: bool = False) -> "SecretQubit":
        return cls.from_state(StateVector.from_amplitudes(values, normalize=normalize))

    def to_json(self) -> Dict:
        return self.state.to_json()


@dataclass(frozen=True)
class SecretTwoQubit:
    """alpha|00> + mu|10> + gamma|01> + beta|11>"""

    alpha: complex
    mu: complex
    gamma: complex
    beta: complex

    def __post_init__(self):
        for name in ("alpha", "mu", "gamma", "beta"):
            object.__setattr__(self, name, complex(getattr(self, name)))
        norm = sum(abs(a) ** 2 for a in (self.alpha, self.mu, self.gamma, self.beta))
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"Secret is not normalized: sum of squares = {norm!r}")

    @property
    def state(self) -> StateVector:
        # index order |00>, |01>, |10>, |11>
        return StateVector(np.array([self.alpha, self.gamma, self.mu, self.beta]))

    @classmethod
    def from_state(cls, state: StateVector) -> "SecretTwoQubit":
        if state.n_qubits != 2:
            raise InvalidState(f"Expected a two-qubit state, got {state.n_qubits} qubits")
        a00, a01, a10, a11 = state.amplitudes
        return cls(alpha=a00, mu=a10, gamma=a01, beta=a11)

    @classmethod
    def from_values(cls, values: Sequence[complex], normalize: bool = False) -> "SecretTwoQubit":
        """Amplitudes in index order |00>, |01>, |10>, |11>"""
        return cls.from_state(StateVector.from_amplitudes(values, normalize=normalize))

    def to_json(self) -> Dict:
        return self.state.to_json()


def secret_for(state: StateVector):
    """Wrap a one- or two-qubit state as the matching secret type"""
    if state.n_qubits == 1:
        return SecretQubit.from_state(state)
    if state.n_qubits == 2:
        return SecretTwoQubit.from_state(state)
    raise InvalidState(f"Secrets hold one or two qubits, got {state.n_qubits}")


class CorrectionRule:
    """Outcome label -> Pauli product applied by the receiver, one label per qubit"""

    def __init__(self, corrections: Mapping[str, Sequence[PauliLabel]]):
        if not corrections:
            raise InvalidState("A correction rule needs at least one outcome")
        self.corrections: Dict[str, Tuple[PauliLabel, ...]] = {
            outcome: tuple(PauliLabel(label) for label in labels) for outcome, labels in corrections.items()
        }
        widths = {len(labels) for labels in self.corrections.values()}
        if len(widths) != 1:
            raise InvalidState("Every correction must act on the same number of qubits")
        self.width = widths.pop()

    def __contains__(self, outcome: str) -> bool:
        return outcome in self.corrections

    def labels_for(self, outcome: Optional[str]) -> Tuple[PauliLabel, ...]:
        """Correction for an outcome; None (no message received) gets the identity"""
        if outcome is None:
            return (PauliLabel.I,) * self.width
        try:
            return self.corrections[outcome]
        except KeyError:
            raise InvalidState(f"No correction for outcome {outcome!r}")

    def operator(self, outcome: Optional[str]) -> np.ndarray:
        return pauli_product(self.labels_for(outcome))

    def symbol(self, outcome: Optional[str]) -> str:
        return "⊗".join(label.symbol for label in self.labels_for(outcome))

    def to_json(self) -> Dict[str, List[str]]:
        return {outcome: [label.value for label in labels] for outcome, labels in self.corrections.items()}


class TeleportRun(NamedTuple):
    transcript: ProtocolTranscript
    bob_state: StateVector

    @property
    def fidelity(self) -> float:
        return self.transcript.fidelity


def conditional_states(secret_qubits: int, resource: StateVector) -> List[np.ndarray]:
    """|s> (x) resource for every computational secret s"""
    dim = 2 ** secret_qubits
    return [np.kron(np.eye(dim, dtype=complex)[s], resource.amplitudes) for s in range(dim)]


def derive_pauli_rule(conditional: Sequence[np.ndarray], present: Sequence[int], derived: DerivedBasis) -> CorrectionRule:
    """Receiver correction for every outcome of a derived basis"""
    corrections = {}
    for k, label in enumerate(derived.labels):
        columns, _ = transfer_columns(conditional, present, [("project", derived.basis.subset, derived.basis.vectors[k])])
        corrections[label] = required_pauli_correction(transfer_unitary(columns)).labels
    return CorrectionRule(corrections)


# Single-qubit layout: label 1 is the secret, labels 2..6 are Brown qubits 1..5
ONE_QUBIT_OWNERS = {"Alice": (1, 2, 3, 4, 5), "Bob": (6,)}


@lru_cache(maxsize=1)
def derive_one_qubit_basis() -> DerivedBasis:
    rows = section_rows("teleport_one")
    return derive_basis(
        conditional_states(1, brown_state()),
        range(1, 7),
        ONE_QUBIT_OWNERS["Bob"],
        [residue_matrix(row["residue"], 1) for row in rows],
        [row["label"] for row in rows],
    )


@lru_cache(maxsize=1)
def one_qubit_correction_rule() -> CorrectionRule:
    return derive_pauli_rule(conditional_states(1, brown_state()), range(1, 7), derive_one_qubit_basis())


def brown_or(resource: Optional[StateVector]) -> StateVector:
    """The given five-qubit resource, or the Brown state"""
    if resource is None:
        return brown_state()
    if resource.n_qubits != 5:
        raise InvalidState(f"Resource must hold five qubits, got {resource.n_qubits}")
    return resource


def _run(session: Session, derived: DerivedBasis, rule: CorrectionRule, secret: StateVector,
         random_draw: float, suppress: bool) -> TeleportRun:
    receiver = derived.receiver
    result = session.measure("Alice", derived.basis, random_draw, key="alice", basis_name="derived",
                             forbid_remainder=True)
    if not suppress:
        session.send_outcome("Alice", "Bob", "alice")

    label = session.known_label("Bob", "alice")
    session.correct("Bob", rule.operator(label), receiver, rule.symbol(label),
                    depends_on=("alice",) if label is not None else ())

    bob_state = session.extract(receiver)
    score = fidelity(bob_state, secret)
    transcript = session.finish(
        fidelity=score,
        details={
            "outcome": result.label,
            "probability": result.probability,
            "remainder_probability": result.probabilities[-1] if derived.basis.remainder_allowed else 0.0,
            "correction": rule.symbol(label),
            "suppressed": suppress,
            "secret": secret.to_json(),
        },
    )
    get_logger().info(
        f"{session.protocol}: outcome {result.label}, correction {rule.symbol(label)}, fidelity {score:.12f}",
        category="protocol",
    )
    return TeleportRun(transcript, bob_state)


def teleport_one_qubit(secret: SecretQubit, random_draw: float, suppress: bool = False,
                       resource: Optional[StateVector] = None) -> TeleportRun:
    """Teleport one qubit; suppress=True withholds Alice's message so Bob cannot correct.

    resource replaces the Brown state; a resource the derived basis does not
    span raises ProbabilityLeak.
    """
    session = new_session(tensor(secret.state, brown_or(resource)), ONE_QUBIT_OWNERS, protocol="teleport1")
    return _run(session, derive_one_qubit_basis(), one_qubit_correction_rule(), secret.state, random_draw, suppress)


DEFAULT_ALICE_QUBITS = (1, 2, 3)


def two_qubit_layout(alice_qubits: Sequence[int] = DEFAULT_ALICE_QUBITS) -> Dict[str, Tuple[int, ...]]:
    """Labels 1, 2 hold the secret; Brown qubit i sits at label i + 2"""
    chosen = tuple(sorted(int(q) for q in alice_qubits))
    if len(chosen) != 3 or len(set(chosen)) != 3 or not all(1 <= q <= 5 for q in chosen):
        raise InvalidSubset(f"Alice must hold three distinct Brown qubits out of 1..5, got {tuple(alice_qubits)}")
    alice = (1, 2) + tuple(q + 2 for q in chosen)
    bob = tuple(q + 2 for q in range(1, 6) if q not in chosen)
    return {"Alice": alice, "Bob": bob}


@lru_cache(maxsize=16)
def _two_qubit_basis(alice_qubits: Tuple[int, ...]) -> DerivedBasis:
    rows = section_rows("teleport_two")
    return derive_basis(
        conditional_states(2, brown_state()),
        range(1, 8),
        two_qubit_layout(alice_qubits)["Bob"],
        [residue_matrix(row["residue"], 2) for row in rows],
        [row["label"] for row in rows],
    )


@lru_cache(maxsize=16)
def _two_qubit_rule(alice_qubits: Tuple[int, ...]) -> CorrectionRule:
    return derive_pauli_rule(conditional_states(2, brown_state()), range(1, 8), _two_qubit_basis(alice_qubits))


def derive_two_qubit_basis(alice_qubits: Sequence[int] = DEFAULT_ALICE_QUBITS) -> DerivedBasis:
    """16-outcome basis on Alice's five qubits leaving each listed two-qubit residue"""
    return _two_qubit_basis(tuple(sorted(alice_qubits)))


def two_qubit_correction_rule(alice_qubits: Sequence[int] = DEFAULT_ALICE_QUBITS) -> CorrectionRule:
    return _two_qubit_rule(tuple(sorted(alice_qubits)))


def teleport_two_qubit(secret: SecretTwoQubit, random_draw: float,
                       alice_qubits: Sequence[int] = DEFAULT_ALICE_QUBITS,
                       suppress: bool = False, resource: Optional[StateVector] = None) -> TeleportRun:
    """Teleport two qubits; Alice may hold any three of the five Brown qubits"""
    layout = two_qubit_layout(alice_qubits)
    session = new_session(tensor(secret.state, brown_or(resource)), layout, protocol="teleport2")
    run = _run(session, derive_two_qubit_basis(alice_qubits), two_qubit_correction_rule(alice_qubits),
               secret.state, random_draw, suppress)
    run.transcript.details["alice_qubits"] = sorted(int(q) for q in alice_qubits)
    return run


def _reconcile_basis(rows: Sequence[Mapping], derived: DerivedBasis) -> List[Dict]:
    ledger = []
    for k, row in enumerate(rows):
        entry = {"label": row["label"]}
        entry.update(compare_vectors(printed_vector(row["basis"]), derived.basis.vectors[k]))
        ledger.append(entry)
    return ledger


def reconcile_one_qubit_basis() -> List[Dict]:
    """Printed single-qubit basis vs the derived one, per outcome"""
    return _reconcile_basis(section_rows("teleport_one"), derive_one_qubit_basis())


def reconcile_two_qubit_basis() -> List[Dict]:
    """Printed 16-vector basis vs the derived one, per entry"""
    return _reconcile_basis(section_rows("teleport_two"), derive_two_qubit_basis())


def reconcile_correction_table() -> List[Dict]:
    """Printed two-qubit corrections vs the brute-force Pauli products"""
    rule = two_qubit_correction_rule()
    ledger = []
    for row in section_rows("teleport_two"):
        printed = parse_triple(row["correction"])
        verdict = compare_operators(pauli_product(printed), rule.operator(row["label"]))
        ledger.append({
            "label": row["label"],
            "printed": [label.symbol for label in printed],
            "derived": [label.symbol for label in rule.labels_for(row["label"])],
            **verdict,
        })
    return ledger


def reconcile_one_qubit_corrections() -> Dict:
    """The derived single-qubit rule must use exactly the printed correction set"""
    printed = {PauliLabel.parse(token) for token in load_printed_tables()["teleport_one"]["correction_set"]}
    used = {labels[0] for labels in one_qubit_correction_rule().corrections.values()}
    return {"match": used == printed, "printed": sorted(l.symbol for l in printed), "derived": sorted(l.symbol for l in used)}


def exact_outcome_probabilities(secret, alice_qubits: Sequence[int] = DEFAULT_ALICE_QUBITS) -> Tuple[float, ...]:
    """Alice's outcome distribution, remainder last"""
    if isinstance(secret, SecretQubit):
        return outcome_probabilities(tensor(secret.state, brown_state()), derive_one_qubit_basis().basis)
    return outcome_probabilities(tensor(secret.state, brown_state()), derive_two_qubit_basis(alice_qubits).basis)


def expected_probability(secret) -> float:
    return 1.0 / (4 if isinstance(secret, SecretQubit) else 16)


def random_secret(n_qubits: int, rng: np.random.Generator):
    return secret_for(random_state(n_qubits, rng))
