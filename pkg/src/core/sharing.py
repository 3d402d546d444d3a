"""
Quantum state sharing among Alice, Bob and Charlie through the Brown state

Alice splits a secret so that Charlie can rebuild it only with Bob's help.
Three protocols are provided, each with one alternative ordering:

  p1         Alice Bell-measures, Bob measures three qubits (or one then two)
  p2         Alice measures three qubits, Bob and Charlie meet for a joint
             conversion, Bob Bell-measures (Alice may measure Bell then +/-)
  two-qubit  Alice measures four qubits, Bob measures +/- (or Bob first
             converts jointly with Charlie)

Bases, conversions and corrections are all derived by the oracle.
"""

import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.logger import get_logger
from .brown import BELL_NAMES, bell_basis, bell_state, brown_state
from .errors import NonUnitaryConversion, OracleFailure
from .harness import ProtocolTranscript, Session, new_session
from .oracle import (
    DerivedBasis,
    Step,
    compare_operators,
    compare_vectors,
    derive_basis,
    describe_vector,
    isometry,
    required_pauli_correction,
    transfer_columns,
    transfer_unitary,
)
from .qsim import (
    DEGENERATE_NORM,
    DensityMatrix,
    MeasurementBasis,
    StateVector,
    complete_unitary,
    computational_basis,
    contract,
    fidelity,
    pauli_product,
    plus_minus_basis,
    reduced_matrix,
    tensor,
)
from .tables import load_printed_tables, printed_vector, residue_matrix, section_rows
from .teleport import SecretQubit, SecretTwoQubit, brown_or, conditional_states

P1_OWNERS = {"Alice": (1, 2), "Bob": (3, 4, 5), "Charlie": (6,)}
P2_OWNERS = {"Alice": (1, 2, 3), "Bob": (4, 5), "Charlie": (6,)}
TWO_OWNERS = {"Alice": (1, 2, 3, 4), "Bob": (5,), "Charlie": (6, 7)}

OWNERS = {"p1": P1_OWNERS, "p2": P2_OWNERS, "two-qubit": TWO_OWNERS}
SECRET_QUBITS = {"p1": 1, "p2": 1, "two-qubit": 2}

VARIANTS = {
    "p1": ("standard", "bob_split"),
    "p2": ("standard", "bell_then_single"),
    "two-qubit": ("standard", "cooperative"),
}

# transcript names, matching the harness contracts
CONTRACT_NAMES = {
    ("p1", "standard"): "qsts1a",
    ("p1", "bob_split"): "qsts1a-split",
    ("p2", "standard"): "qsts1b",
    ("p2", "bell_then_single"): "qsts1b-bell",
    ("two-qubit", "standard"): "qsts2",
    ("two-qubit", "cooperative"): "qsts2-coop",
}


def check_variant(protocol: str, variant: str) -> str:
    if protocol not in VARIANTS:
        raise ValueError(f"Unknown sharing protocol {protocol!r}; expected one of {tuple(VARIANTS)}")
    if variant not in VARIANTS[protocol]:
        raise ValueError(f"Protocol {protocol} has variants {VARIANTS[protocol]}, got {variant!r}")
    return variant


def _present(protocol: str) -> Tuple[int, ...]:
    return tuple(range(1, 1 + sum(len(q) for q in OWNERS[protocol].values())))


def _conditional(protocol: str) -> List[np.ndarray]:
    return conditional_states(SECRET_QUBITS[protocol], brown_state())


@dataclass(frozen=True, eq=False)
class CharlieCorrection:
    matrix: np.ndarray
    symbol: str


@dataclass(frozen=True, eq=False)
class SharingOutcome:
    alice_outcome: str
    bob_outcome: str
    cbits_to_charlie: int
    charlie_state: StateVector
    fidelity: float
    transcript: ProtocolTranscript

    def to_json(self) -> Dict:
        return {
            "alice_outcome": self.alice_outcome,
            "bob_outcome": self.bob_outcome,
            "cbits_to_charlie": self.cbits_to_charlie,
            "charlie_state": self.charlie_state.to_json(),
            "fidelity": self.fidelity,
            "transcript": self.transcript.to_json(),
        }


# Derived bases

@lru_cache(maxsize=1)
def derive_p1_bob_basis() -> DerivedBasis:
    """Bob's four-outcome basis on his three qubits after Alice's listed Bell outcome"""
    section = load_printed_tables()["sharing_p1"]
    present = _present("p1")
    outcome = bell_state(section["alice_outcome"]).amplitudes
    conditional = [contract(psi, present, P1_OWNERS["Alice"], outcome)[0] for psi in _conditional("p1")]
    rows = section["rows"]
    return derive_basis(
        conditional,
        present[len(P1_OWNERS["Alice"]):],
        P1_OWNERS["Charlie"],
        [residue_matrix(row["residue"], 1) for row in rows],
        [row["label"] for row in rows],
    )


@lru_cache(maxsize=1)
def derive_p2_alice_basis() -> DerivedBasis:
    """Alice's eight-outcome basis on (secret, Brown 1, Brown 2)"""
    rows = section_rows("sharing_p2")
    return derive_basis(
        _conditional("p2"),
        _present("p2"),
        P2_OWNERS["Bob"] + P2_OWNERS["Charlie"],
        [residue_matrix(row["residue"], 1) for row in rows],
        [row["label"] for row in rows],
    )


@lru_cache(maxsize=1)
def derive_two_qubit_sharing_basis() -> DerivedBasis:
    """Alice's sixteen-outcome basis on (secret 1, secret 2, Brown 1, Brown 2)"""
    rows = section_rows("sharing_two")
    return derive_basis(
        _conditional("two-qubit"),
        _present("two-qubit"),
        TWO_OWNERS["Bob"] + TWO_OWNERS["Charlie"],
        [residue_matrix(row["residue"], 2) for row in rows],
        [row["label"] for row in rows],
    )


def alice_stages(protocol: str, variant: str = "standard") -> Tuple[MeasurementBasis, ...]:
    check_variant(protocol, variant)
    if protocol == "p1":
        return (bell_basis(P1_OWNERS["Alice"]),)
    if protocol == "p2":
        if variant == "bell_then_single":
            return (bell_basis((1, 2)), plus_minus_basis((3,)))
        return (derive_p2_alice_basis().basis,)
    return (derive_two_qubit_sharing_basis().basis,)


def bob_stages(protocol: str, variant: str = "standard") -> Tuple[MeasurementBasis, ...]:
    check_variant(protocol, variant)
    if protocol == "p1":
        if variant == "bob_split":
            return (computational_basis((3,)), bell_basis((4, 5)))
        return (derive_p1_bob_basis().basis,)
    if protocol == "p2":
        return (bell_basis(P2_OWNERS["Bob"]),)
    return (plus_minus_basis(TWO_OWNERS["Bob"]),)


def _combinations(stages: Sequence[MeasurementBasis]) -> Iterator[Tuple[str, List[Step]]]:
    for combo in itertools.product(*(range(b.count) for b in stages)):
        key = "|".join(b.labels[i] for b, i in zip(stages, combo))
        yield key, [("project", b.subset, b.vectors[i]) for b, i in zip(stages, combo)]


def _nonzero(columns: np.ndarray) -> bool:
    return float(np.linalg.norm(columns)) > DEGENERATE_NORM


# Joint conversions

@lru_cache(maxsize=2)
def _p2_conversions(variant: str) -> Dict[str, np.ndarray]:
    target = residue_matrix(load_printed_tables()["sharing_p2"]["conversion_target"], 1)
    conversions = {}
    for key, steps in _combinations(alice_stages("p2", variant)):
        columns, _ = transfer_columns(_conditional("p2"), _present("p2"), steps)
        if not _nonzero(columns):
            continue
        try:
            source = isometry(columns)
        except OracleFailure as e:
            raise NonUnitaryConversion(f"Residue after Alice outcome {key} is not an isometric image: {e}")
        conversion = complete_unitary(source, target)
        conversion.setflags(write=False)
        conversions[key] = conversion
    return conversions


def p2_conversions(variant: str = "standard") -> Dict[str, np.ndarray]:
    """Bob-Charlie unitary taking each residue to alpha|000> + beta|111>, keyed by Alice's outcome"""
    return dict(_p2_conversions(check_variant("p2", variant)))


@lru_cache(maxsize=1)
def _cooperative_conversions() -> Dict[str, np.ndarray]:
    conditional, present = _conditional("two-qubit"), _present("two-qubit")
    stages = alice_stages("two-qubit")
    branches = list(_combinations(stages))
    target = isometry(transfer_columns(conditional, present, branches[0][1])[0])
    conversions = {}
    for key, steps in branches:
        conversion = complete_unitary(isometry(transfer_columns(conditional, present, steps)[0]), target)
        conversion.setflags(write=False)
        conversions[key] = conversion
    return conversions


def cooperative_conversions() -> Dict[str, np.ndarray]:
    """Bob-Charlie unitary taking every residue to the first row's residue"""
    return dict(_cooperative_conversions())


def _conversion_step(protocol: str, variant: str, alice_key: str) -> List[Step]:
    if protocol == "p2":
        return [("apply", P2_OWNERS["Bob"] + P2_OWNERS["Charlie"], _p2_conversions(variant)[alice_key])]
    if protocol == "two-qubit" and variant == "cooperative":
        return [("apply", TWO_OWNERS["Bob"] + TWO_OWNERS["Charlie"], _cooperative_conversions()[alice_key])]
    return []


def branches(protocol: str, variant: str = "standard") -> Iterator[Tuple[str, str, List[Step]]]:
    """(alice key, bob key, steps) for every outcome combination"""
    for alice_key, alice_steps in _combinations(alice_stages(protocol, variant)):
        conversion = _conversion_step(protocol, variant, alice_key)
        for bob_key, bob_steps in _combinations(bob_stages(protocol, variant)):
            yield alice_key, bob_key, alice_steps + conversion + bob_steps


def _correction_key(protocol: str, variant: str, alice_key: str, bob_key: str) -> str:
    """Charlie's rule is keyed by what reaches him"""
    if protocol == "p2" or (protocol == "two-qubit" and variant == "cooperative"):
        return bob_key
    return f"{alice_key}|{bob_key}"


@lru_cache(maxsize=8)
def _charlie_corrections(protocol: str, variant: str) -> Dict[str, CharlieCorrection]:
    logger = get_logger()
    conditional, present = _conditional(protocol), _present(protocol)
    corrections: Dict[str, CharlieCorrection] = {}
    for alice_key, bob_key, steps in branches(protocol, variant):
        columns, _ = transfer_columns(conditional, present, steps)
        if not _nonzero(columns):
            continue
        u = transfer_unitary(columns)
        if protocol == "two-qubit":
            matrix = u.conj().T
            correction = CharlieCorrection(matrix, f"U[{alice_key}|{bob_key}]^†")
        else:
            paulis = required_pauli_correction(u).labels
            correction = CharlieCorrection(np.array(pauli_product(paulis)), "⊗".join(p.symbol for p in paulis))
        key = _correction_key(protocol, variant, alice_key, bob_key)
        if key in corrections:
            if not compare_operators(corrections[key].matrix, correction.matrix)["match"]:
                raise OracleFailure(f"Charlie's correction for {key} depends on outcomes he never receives")
            continue
        if protocol == "two-qubit" and key == bob_key:
            correction = CharlieCorrection(correction.matrix, f"U[{bob_key}]^†")
        correction.matrix.setflags(write=False)
        corrections[key] = correction
    logger.log_check(f"charlie_corrections {protocol}/{variant}", "PASS", f"{len(corrections)} entries")
    return corrections


def charlie_corrections(protocol: str, variant: str = "standard") -> Dict[str, CharlieCorrection]:
    """Derived correction for every key Charlie can receive"""
    return dict(_charlie_corrections(protocol, check_variant(protocol, variant)))


def branch_probabilities(protocol: str, secret, variant: str = "standard") -> Dict[str, float]:
    """Exact probability of every (Alice, Bob) outcome combination"""
    amps = secret.state.amplitudes
    conditional, present = _conditional(protocol), _present(protocol)
    out = {}
    for alice_key, bob_key, steps in branches(protocol, variant):
        columns, _ = transfer_columns(conditional, present, steps)
        out[f"{alice_key}|{bob_key}"] = float(np.sum(np.abs(columns @ amps) ** 2))
    return out


# Protocol runs

def _take(draws: Sequence[float], count: int) -> List[float]:
    draws = [float(d) for d in draws]
    if len(draws) < count:
        raise ValueError(f"This protocol needs {count} draws, got {len(draws)}")
    return draws[:count]


def _measure_and_report(session: Session, party: str, stages: Sequence[MeasurementBasis],
                        draws: Sequence[float], receiver: str, prefix: str, names: Sequence[str]) -> List[str]:
    keys = []
    for index, (basis, draw) in enumerate(zip(stages, draws)):
        key = prefix if len(stages) == 1 else f"{prefix}_{names[index]}"
        session.measure(party, basis, draw, key=key, basis_name=names[index], forbid_remainder=True)
        session.send_outcome(party, receiver, key)
        keys.append(key)
    return keys


def _known_key(session: Session, party: str, keys: Sequence[str]) -> Optional[str]:
    labels = [session.known_label(party, key) for key in keys]
    return None if any(label is None for label in labels) else "|".join(labels)


def _finish(session: Session, protocol: str, variant: str, secret: StateVector,
            alice_keys: Sequence[str], bob_keys: Sequence[str], charlie_keys: Sequence[str]) -> SharingOutcome:
    corrections = _charlie_corrections(protocol, variant)
    key = _known_key(session, "Charlie", charlie_keys)
    correction = corrections[key]
    session.correct("Charlie", correction.matrix, OWNERS[protocol]["Charlie"], correction.symbol,
                    depends_on=tuple(charlie_keys))

    charlie_state = session.extract(OWNERS[protocol]["Charlie"])
    score = fidelity(charlie_state, secret)
    alice_label = "|".join(session.known_label("Alice", k) for k in alice_keys)
    bob_label = "|".join(session.known_label("Bob", k) for k in bob_keys)
    transcript = session.finish(
        fidelity=score,
        details={
            "variant": variant,
            "alice_outcome": alice_label,
            "bob_outcome": bob_label,
            "correction": correction.symbol,
            "secret": secret.to_json(),
        },
    )
    cbits = sum(e.width or 0 for e in transcript.messages() if e.receiver == "Charlie")
    get_logger().info(
        f"{session.protocol}: alice {alice_label}, bob {bob_label}, fidelity {score:.12f}",
        category="protocol",
    )
    return SharingOutcome(alice_label, bob_label, cbits, charlie_state, score, transcript)


def qsts_one_qubit_p1(secret: SecretQubit, draws: Sequence[float], variant: str = "standard",
                      resource: Optional[StateVector] = None) -> SharingOutcome:
    """Alice and Bob each send their outcomes to Charlie, who corrects"""
    check_variant("p1", variant)
    bob = bob_stages("p1", variant)
    draws = _take(draws, 1 + len(bob))
    session = new_session(tensor(secret.state, brown_or(resource)), P1_OWNERS,
                          protocol=CONTRACT_NAMES[("p1", variant)])

    alice_keys = _measure_and_report(session, "Alice", alice_stages("p1"), draws[:1], "Charlie", "alice", ["bell"])
    bob_names = ["derived"] if variant == "standard" else ["z", "bell"]
    bob_keys = _measure_and_report(session, "Bob", bob, draws[1:], "Charlie", "bob", bob_names)
    return _finish(session, "p1", variant, secret.state, alice_keys, bob_keys, alice_keys + bob_keys)


def qsts_one_qubit_p2(secret: SecretQubit, draws: Sequence[float], variant: str = "standard",
                      resource: Optional[StateVector] = None) -> SharingOutcome:
    """Alice reports to Bob, Bob and Charlie convert jointly, then Bob reports to Charlie"""
    check_variant("p2", variant)
    stages = alice_stages("p2", variant)
    draws = _take(draws, len(stages) + 1)
    session = new_session(tensor(secret.state, brown_or(resource)), P2_OWNERS,
                          protocol=CONTRACT_NAMES[("p2", variant)])

    names = ["derived"] if variant == "standard" else ["bell", "pm"]
    alice_keys = _measure_and_report(session, "Alice", stages, draws[:-1], "Bob", "alice", names)
    conversion_key = _known_key(session, "Bob", alice_keys)
    session.joint_apply(("Bob", "Charlie"), _p2_conversions(variant)[conversion_key],
                        P2_OWNERS["Bob"] + P2_OWNERS["Charlie"], f"convert[{conversion_key}]",
                        depends_on=tuple(alice_keys))

    bob_keys = _measure_and_report(session, "Bob", bob_stages("p2"), draws[-1:], "Charlie", "bob", ["bell"])
    return _finish(session, "p2", variant, secret.state, alice_keys, bob_keys, bob_keys)


def qsts_two_qubit(secret: SecretTwoQubit, draws: Sequence[float], variant: str = "standard",
                   resource: Optional[StateVector] = None) -> SharingOutcome:
    """Two-qubit secret; Charlie needs Alice's four bits and Bob's one (or Bob's help in person)"""
    check_variant("two-qubit", variant)
    draws = _take(draws, 2)
    session = new_session(tensor(secret.state, brown_or(resource)), TWO_OWNERS,
                          protocol=CONTRACT_NAMES[("two-qubit", variant)])

    if variant == "standard":
        alice_keys = _measure_and_report(session, "Alice", alice_stages("two-qubit"), draws[:1], "Charlie",
                                         "alice", ["derived"])
        bob_keys = _measure_and_report(session, "Bob", bob_stages("two-qubit"), draws[1:], "Charlie", "bob", ["pm"])
        return _finish(session, "two-qubit", variant, secret.state, alice_keys, bob_keys, alice_keys + bob_keys)

    alice_keys = _measure_and_report(session, "Alice", alice_stages("two-qubit"), draws[:1], "Bob",
                                     "alice", ["derived"])
    conversion_key = _known_key(session, "Bob", alice_keys)
    session.joint_apply(("Bob", "Charlie"), _cooperative_conversions()[conversion_key],
                        TWO_OWNERS["Bob"] + TWO_OWNERS["Charlie"], f"convert[{conversion_key}]",
                        depends_on=tuple(alice_keys))
    bob_keys = _measure_and_report(session, "Bob", bob_stages("two-qubit"), draws[1:], "Charlie", "bob", ["pm"])
    return _finish(session, "two-qubit", variant, secret.state, alice_keys, bob_keys, bob_keys)


def run_sharing(protocol: str, secret, draws: Sequence[float], variant: str = "standard",
                resource: Optional[StateVector] = None) -> SharingOutcome:
    """Run one sharing protocol; resource replaces the Brown state when given"""
    runners = {"p1": qsts_one_qubit_p1, "p2": qsts_one_qubit_p2, "two-qubit": qsts_two_qubit}
    check_variant(protocol, variant)
    return runners[protocol](secret, draws, variant, resource)


def draws_needed(protocol: str, variant: str = "standard") -> int:
    return len(alice_stages(protocol, variant)) + len(bob_stages(protocol, variant))


# Charlie's view before the messages arrive

def _alice_branches(protocol: str, secret) -> Iterator[np.ndarray]:
    state = tensor(secret.state, brown_state()).amplitudes
    present = _present(protocol)
    basis = alice_stages(protocol)[0]
    for k in range(basis.count):
        yield contract(state, present, basis.subset, basis.vectors[k])


def charlie_ensemble_state(protocol: str, secret) -> DensityMatrix:
    """Charlie's state after Alice measures, averaged over her outcomes"""
    total = None
    for amps, remaining in _alice_branches(protocol, secret):
        block = reduced_matrix(amps, remaining, OWNERS[protocol]["Charlie"])
        total = block if total is None else total + block
    return DensityMatrix(total)


def charlie_state_after_alice(protocol: str, secret, outcome: int) -> DensityMatrix:
    """Charlie's state conditioned on one of Alice's outcomes"""
    amps, remaining = list(_alice_branches(protocol, secret))[outcome]
    block = reduced_matrix(amps, remaining, OWNERS[protocol]["Charlie"])
    return DensityMatrix(block / np.trace(block).real)


# Reconciliation against the printed tables

def _reconcile_rows(rows, derived: DerivedBasis) -> List[Dict]:
    ledger = []
    for k, row in enumerate(rows):
        entry = {"label": row["label"]}
        entry.update(compare_vectors(printed_vector(row["basis"]), derived.basis.vectors[k]))
        ledger.append(entry)
    return ledger


def reconcile_p1_alice_state() -> Dict:
    """Printed state of Bob's and Charlie's qubits after Alice's listed Bell outcome"""
    section = load_printed_tables()["sharing_p1"]
    printed = residue_matrix(section["alice_state"], 1)
    steps = [("project", P1_OWNERS["Alice"], bell_state(section["alice_outcome"]).amplitudes)]
    derived, _ = transfer_columns(_conditional("p1"), _present("p1"), steps)
    return {"label": section["alice_outcome"], **compare_vectors(printed.reshape(-1), derived.reshape(-1))}


def reconcile_p1_bob_basis() -> List[Dict]:
    return _reconcile_rows(section_rows("sharing_p1"), derive_p1_bob_basis())


def reconcile_p2_alice_basis() -> List[Dict]:
    return _reconcile_rows(section_rows("sharing_p2"), derive_p2_alice_basis())


def reconcile_two_qubit_alice_basis() -> List[Dict]:
    return _reconcile_rows(section_rows("sharing_two"), derive_two_qubit_sharing_basis())


def _row1_chain(sign: str) -> List[Step]:
    basis = derive_two_qubit_sharing_basis().basis
    pm = plus_minus_basis(TWO_OWNERS["Bob"])
    return [("project", basis.subset, basis.vectors[0]), ("project", pm.subset, pm.vectors[pm.labels.index(sign)])]


def reconcile_charlie_example() -> List[Dict]:
    """Printed row-1 Charlie states and corrections vs the derived ones"""
    section = load_printed_tables()["sharing_two"]
    first = section_rows("sharing_two")[0]["label"]
    corrections = _charlie_corrections("two-qubit", "standard")
    ledger = []
    for sign in ("+", "-"):
        derived_state, _ = transfer_columns(_conditional("two-qubit"), _present("two-qubit"), _row1_chain(sign))
        printed_state = residue_matrix(section["charlie_state_row1"][sign], 2)
        state_verdict = compare_vectors(printed_state.reshape(-1), derived_state.reshape(-1))
        ledger.append({"label": f"state {first}|{sign}", **state_verdict})

        printed_op = printed_correction(section["charlie_correction_row1"][sign])
        derived_op = corrections[f"{first}|{sign}"].matrix
        op_verdict = compare_operators(printed_op, derived_op)
        entry = {"label": f"correction {first}|{sign}", **op_verdict}
        if not op_verdict["match"]:
            entry["derived"] = charlie_dictionary(derived_op)
            entry["printed"] = charlie_dictionary(printed_op)
        ledger.append(entry)
    return ledger


def printed_correction(mapping: Dict[str, Sequence[str]]) -> np.ndarray:
    """sum sign |bits><bell| from a {bell: [sign, bits]} dictionary"""
    op = np.zeros((4, 4), dtype=complex)
    for bell, (sign, bits) in mapping.items():
        op += (1 if sign == "+" else -1) * np.outer(printed_vector([["+", bits]]), bell_state(bell).amplitudes.conj())
    return op


def charlie_dictionary(u: np.ndarray) -> Dict[str, List[List[str]]]:
    """Where a two-qubit correction sends each Bell state, as [coefficient, ket] terms"""
    return {bell: describe_vector(np.asarray(u) @ bell_state(bell).amplitudes) for bell in BELL_NAMES}


def reconcile_all() -> Dict[str, List[Dict]]:
    return {
        "sharing_p1_alice_state": [reconcile_p1_alice_state()],
        "sharing_p1_bob_basis": reconcile_p1_bob_basis(),
        "sharing_p2_alice_basis": reconcile_p2_alice_basis(),
        "sharing_two_alice_basis": reconcile_two_qubit_alice_basis(),
        "sharing_two_charlie_example": reconcile_charlie_example(),
    }
