"""
Multi-party execution harness

Parties own disjoint qubit subsets of one global register. Every local
operation is locality-checked, measurement outcomes are known only to the
measuring party until sent as width-checked bit messages, and joint operations
across parties are recorded as sanctioned events.
"""

import json
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from ..utils.config import get_settings
from ..utils.logger import get_logger
from .errors import DegenerateState, InvalidSubset, LocalityViolation, ProbabilityLeak
from .qsim import (
    PROB_TOL,
    MeasurementBasis,
    MeasurementResult,
    StateVector,
    apply_on_subset,
    measure_in_basis,
    partial_trace,
)
from .verifier import ClaimChecker

EVENT_KINDS = ("unitary", "correction", "measurement", "message", "joint", "transfer")


def bits_for(cardinality: int) -> int:
    """Minimum message width for an outcome set of this size"""
    return (max(int(cardinality), 1) - 1).bit_length()


@dataclass(frozen=True)
class ClassicalMessage:
    sender: str
    receiver: str
    payload: str
    key: Optional[str] = None
    cardinality: Optional[int] = None

    def __post_init__(self):
        if any(bit not in "01" for bit in self.payload):
            raise ValueError(f"Message payload must be a bit string, got {self.payload!r}")

    @property
    def width(self) -> int:
        return len(self.payload)


@dataclass
class Event:
    """One transcript entry; unused fields stay None or empty"""

    kind: str
    party: Optional[str] = None
    parties: Tuple[str, ...] = ()
    qubits: Tuple[int, ...] = ()
    operator: Optional[str] = None
    basis: Optional[str] = None
    key: Optional[str] = None
    outcome: Optional[int] = None
    label: Optional[str] = None
    cardinality: Optional[int] = None
    probability: Optional[float] = None
    draw: Optional[float] = None
    receiver: Optional[str] = None
    bits: Optional[str] = None
    width: Optional[int] = None
    depends_on: Tuple[str, ...] = ()
    sanctioned: bool = False

    def to_json(self) -> Dict:
        out = {}
        for name, value in asdict(self).items():
            if value is None or value is False or (isinstance(value, tuple) and not value):
                continue
            out[name] = list(value) if isinstance(value, tuple) else value
        return out

    @classmethod
    def from_json(cls, obj: Mapping) -> "Event":
        values = dict(obj)
        for name in ("parties", "qubits", "depends_on"):
            if name in values:
                values[name] = tuple(values[name])
        if values.get("kind") not in EVENT_KINDS:
            raise ValueError(f"Unknown event kind {values.get('kind')!r}")
        return cls(**values)

    @property
    def actors(self) -> Tuple[str, ...]:
        return self.parties if self.parties else ((self.party,) if self.party else ())


@dataclass
class ProtocolTranscript:
    protocol: str
    ownership: Dict[str, Tuple[int, ...]]
    events: List[Event] = field(default_factory=list)
    fidelity: Optional[float] = None
    draws: List[float] = field(default_factory=list)
    details: Dict = field(default_factory=dict)

    def messages(self) -> List[Event]:
        return [e for e in self.events if e.kind == "message"]

    @property
    def cbit_totals(self) -> Dict[str, int]:
        totals: Dict[str, int] = {}
        for event in self.messages():
            route = f"{event.party}->{event.receiver}"
            totals[route] = totals.get(route, 0) + (event.width or 0)
        return totals

    @property
    def total_cbits(self) -> int:
        return sum(self.cbit_totals.values())

    @property
    def joint_events(self) -> int:
        return sum(1 for e in self.events if e.kind == "joint")

    def to_json(self) -> Dict:
        return {
            "protocol": self.protocol,
            "ownership": {party: list(qubits) for party, qubits in self.ownership.items()},
            "events": [event.to_json() for event in self.events],
            "cbit_totals": self.cbit_totals,
            "total_cbits": self.total_cbits,
            "fidelity": self.fidelity,
            "draws": list(self.draws),
            "details": self.details,
        }

    @classmethod
    def from_json(cls, obj: Union[str, Mapping]) -> "ProtocolTranscript":
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            return cls(
                protocol=obj["protocol"],
                ownership={party: tuple(qubits) for party, qubits in obj["ownership"].items()},
                events=[Event.from_json(e) for e in obj["events"]],
                fidelity=obj.get("fidelity"),
                draws=list(obj.get("draws", [])),
                details=dict(obj.get("details", {})),
            )
        except (KeyError, TypeError, AttributeError) as e:
            raise ValueError(f"Malformed transcript: {e}")


def _validate_ownership(ownership: Mapping[str, Iterable[int]], n_qubits: int) -> Dict[str, Tuple[int, ...]]:
    owned: Dict[str, Tuple[int, ...]] = {}
    seen: Dict[int, str] = {}
    for party, qubits in ownership.items():
        labels = tuple(sorted(int(q) for q in qubits))
        for q in labels:
            if q < 1 or q > n_qubits:
                raise InvalidSubset(f"{party} owns qubit {q} outside the {n_qubits}-qubit register")
            if q in seen:
                raise InvalidSubset(f"Qubit {q} is owned by both {seen[q]} and {party}")
            seen[q] = party
        owned[party] = labels
    missing = [q for q in range(1, n_qubits + 1) if q not in seen]
    if missing:
        raise InvalidSubset(f"Qubits {missing} have no owner")
    return owned


class Session:
    """A single protocol run over a shared global state"""

    def __init__(self, global_state: StateVector, ownership: Mapping[str, Iterable[int]], protocol: str = ""):
        self.state = global_state
        self.protocol = protocol
        self.ownership = _validate_ownership(ownership, global_state.n_qubits)
        self.initial_ownership = dict(self.ownership)
        self.events: List[Event] = []
        self.draws: List[float] = []
        self.knowledge: Dict[str, Dict[str, Tuple[int, str]]] = {party: {} for party in self.ownership}
        self._cardinality: Dict[str, int] = {}
        self.logger = get_logger()

    def _require_party(self, party: str):
        if party not in self.ownership:
            raise LocalityViolation(f"Unknown party {party!r}")

    def _check_local(self, party: str, qubits: Sequence[int]):
        self._require_party(party)
        foreign = [q for q in qubits if q not in self.ownership[party]]
        if foreign:
            raise LocalityViolation(f"{party} cannot act on qubits {foreign}; owns {self.ownership[party]}")

    def _log(self, event: str, details: str = ""):
        self.logger.log_protocol_event(self.protocol or "session", event, details)

    def apply(self, party: str, unitary: np.ndarray, subset: Sequence[int], label: str = "",
              depends_on: Sequence[str] = (), kind: str = "unitary"):
        """Local unitary on qubits the party owns"""
        subset = tuple(subset)
        self._check_local(party, subset)
        self.state = apply_on_subset(self.state, unitary, subset)
        self.events.append(Event(kind=kind, party=party, qubits=subset, operator=label or None,
                                 depends_on=tuple(depends_on)))
        self._log(f"{party} {kind} {label or 'U'} on {subset}")

    def correct(self, party: str, unitary: np.ndarray, subset: Sequence[int], label: str = "",
                depends_on: Sequence[str] = ()):
        self.apply(party, unitary, subset, label, depends_on, kind="correction")

    def joint_apply(self, parties: Sequence[str], unitary: np.ndarray, subset: Sequence[int],
                    label: str = "", depends_on: Sequence[str] = ()):
        """Sanctioned joint unitary: the parties meet and act on their combined qubits"""
        parties = tuple(parties)
        if len(parties) < 2:
            raise LocalityViolation("A joint operation needs at least two parties")
        for party in parties:
            self._require_party(party)
        held = {q for party in parties for q in self.ownership[party]}
        subset = tuple(subset)
        foreign = [q for q in subset if q not in held]
        if foreign:
            raise LocalityViolation(f"Joint operation of {parties} reaches qubits {foreign}")
        self.state = apply_on_subset(self.state, unitary, subset)
        self.events.append(Event(kind="joint", parties=parties, qubits=subset, operator=label or None,
                                 depends_on=tuple(depends_on), sanctioned=True))
        self._log(f"joint {label or 'U'} by {'+'.join(parties)} on {subset}")

    def measure(self, party: str, basis: MeasurementBasis, random_draw: float, key: str,
                basis_name: str = "", forbid_remainder: bool = False) -> MeasurementResult:
        """Projective measurement; the outcome is known only to the measuring party.

        With forbid_remainder the basis must capture the whole state even when
        it is incomplete, otherwise ProbabilityLeak is raised and the session
        is left untouched.
        """
        self._check_local(party, basis.subset)
        result = measure_in_basis(self.state, basis, random_draw)
        if forbid_remainder and basis.remainder_allowed and result.probabilities[-1] > PROB_TOL:
            raise ProbabilityLeak(
                f"{party}'s basis on qubits {tuple(basis.subset)} leaves probability "
                f"{result.probabilities[-1]:.3e} outside its span"
            )
        self.state = result.collapsed
        self.knowledge[party][key] = (result.outcome, result.label)
        self._cardinality[key] = basis.count
        self.draws.append(result.draw)
        self.events.append(Event(
            kind="measurement",
            party=party,
            qubits=tuple(basis.subset),
            basis=basis_name or None,
            key=key,
            outcome=result.outcome,
            label=result.label,
            cardinality=basis.count,
            probability=result.probability,
            draw=result.draw,
        ))
        self._log(f"{party} measured {basis.subset}", f"key={key} outcome={result.label} p={result.probability:.6f}")
        return result

    def send_cbits(self, sender: str, receiver: str, payload: str, key: Optional[str] = None) -> ClassicalMessage:
        """Log a classical message; a keyed message hands the sender's outcome to the receiver"""
        self._require_party(sender)
        self._require_party(receiver)
        cardinality = None
        if key is not None:
            if key not in self.knowledge[sender]:
                raise LocalityViolation(f"{sender} cannot report outcome {key!r} it never learned")
            cardinality = self._cardinality.get(key)
        message = ClassicalMessage(sender, receiver, payload, key, cardinality)
        if key is not None:
            self.knowledge[receiver][key] = self.knowledge[sender][key]
        self.events.append(Event(kind="message", party=sender, receiver=receiver, key=key,
                                 bits=payload, width=message.width, cardinality=cardinality))
        self._log(f"{sender} -> {receiver}", f"{message.width} cbits {payload} key={key}")
        return message

    def send_outcome(self, sender: str, receiver: str, key: str) -> ClassicalMessage:
        """Send a known outcome index at the minimum width for its listed outcome count"""
        self._require_party(sender)
        if key not in self.knowledge[sender]:
            raise LocalityViolation(f"{sender} cannot report outcome {key!r} it never learned")
        outcome, _ = self.knowledge[sender][key]
        width = bits_for(self._cardinality[key])
        return self.send_cbits(sender, receiver, format(outcome, f"0{width}b") if width else "", key)

    def known_outcome(self, party: str, key: str) -> Optional[int]:
        self._require_party(party)
        entry = self.knowledge[party].get(key)
        return entry[0] if entry else None

    def known_label(self, party: str, key: str) -> Optional[str]:
        self._require_party(party)
        entry = self.knowledge[party].get(key)
        return entry[1] if entry else None

    def transfer_qubits(self, sender: str, receiver: str, qubits: Sequence[int]):
        """Physically hand qubits to another party"""
        qubits = tuple(qubits)
        self._check_local(sender, qubits)
        self._require_party(receiver)
        self.ownership[sender] = tuple(q for q in self.ownership[sender] if q not in qubits)
        self.ownership[receiver] = tuple(sorted(self.ownership[receiver] + qubits))
        self.events.append(Event(kind="transfer", party=sender, receiver=receiver, qubits=qubits))
        self._log(f"{sender} sent qubits {qubits} to {receiver}")

    def extract(self, qubits: Sequence[int]) -> StateVector:
        """Pure state of `qubits`, which must be unentangled from the rest"""
        rho = partial_trace(self.state, qubits)
        evals, evecs = np.linalg.eigh(rho.entries)
        if evals[-1] < 1 - PROB_TOL:
            raise DegenerateState(f"Qubits {tuple(qubits)} are still entangled (purity {rho.purity:.6f})")
        vec = evecs[:, -1]
        pivot = vec[int(np.argmax(np.abs(vec)))]
        return StateVector(vec * (abs(pivot) / pivot))

    def finish(self, fidelity: Optional[float] = None, details: Optional[Dict] = None) -> ProtocolTranscript:
        return ProtocolTranscript(
            protocol=self.protocol,
            ownership=dict(self.initial_ownership),
            events=list(self.events),
            fidelity=fidelity,
            draws=list(self.draws),
            details=dict(details or {}),
        )


def new_session(global_state: StateVector, ownership: Mapping[str, Iterable[int]], protocol: str = "") -> Session:
    """Open a session; the ownership must cover every qubit of the global state"""
    session = Session(global_state, ownership, protocol)
    session._log("start", f"{global_state.n_qubits} qubits, parties {sorted(session.ownership)}")
    return session


@dataclass(frozen=True)
class ProtocolContract:
    name: str
    parties: Tuple[str, ...]
    cbits: int
    joint_events: int
    description: str = ""


CONTRACTS: Dict[str, ProtocolContract] = {
    contract.name: contract
    for contract in (
        ProtocolContract("teleport1", ("Alice", "Bob"), 2, 0, "single-qubit teleportation"),
        ProtocolContract("teleport2", ("Alice", "Bob"), 4, 0, "two-qubit teleportation"),
        ProtocolContract("qsts1a", ("Alice", "Bob", "Charlie"), 4, 0, "sharing, Bell then three-qubit measurement"),
        ProtocolContract("qsts1a-split", ("Alice", "Bob", "Charlie"), 5, 0, "sharing, Bob measures 1 + 2 qubits"),
        ProtocolContract("qsts1b", ("Alice", "Bob", "Charlie"), 5, 1, "sharing with a joint Bob-Charlie conversion"),
        ProtocolContract("qsts1b-bell", ("Alice", "Bob", "Charlie"), 5, 1, "joint conversion, Alice measures Bell then +/-"),
        ProtocolContract("qsts2", ("Alice", "Bob", "Charlie"), 5, 0, "two-qubit sharing"),
        ProtocolContract("qsts2-coop", ("Alice", "Bob", "Charlie"), 5, 1, "two-qubit sharing through Bob"),
        ProtocolContract("dense", ("Alice", "Bob"), 0, 0, "superdense coding, qubits sent instead of bits"),
    )
}


def _result(status: bool, message: str, details=None) -> Dict:
    return {"status": bool(status), "message": message, "details": details}


def audit_checks(transcript: ProtocolTranscript, contract: ProtocolContract, tolerance: float):
    """(name, check) pairs comparing a transcript against its contract"""

    def check_parties():
        extra = sorted(set(transcript.ownership) - set(contract.parties))
        missing = sorted(set(contract.parties) - set(transcript.ownership))
        return _result(not extra and not missing, f"Parties {sorted(transcript.ownership)}",
                       {"unexpected": extra, "missing": missing} if extra or missing else None)

    def check_cbits():
        total = transcript.total_cbits
        return _result(total == contract.cbits, f"{total} cbits sent, contract expects {contract.cbits}",
                       transcript.cbit_totals)

    def check_joint():
        count = transcript.joint_events
        unsanctioned = [i for i, e in enumerate(transcript.events) if e.kind == "joint" and not e.sanctioned]
        ok = count == contract.joint_events and not unsanctioned
        return _result(ok, f"{count} joint events, contract expects {contract.joint_events}",
                       {"unsanctioned": unsanctioned} if unsanctioned else None)

    def check_locality():
        owners = {party: set(qubits) for party, qubits in transcript.ownership.items()}
        violations = []
        for index, event in enumerate(transcript.events):
            if event.kind == "transfer":
                owners[event.party] -= set(event.qubits)
                owners.setdefault(event.receiver, set()).update(event.qubits)
                continue
            if event.kind not in ("unitary", "correction", "measurement", "joint"):
                continue
            held = set()
            for actor in event.actors:
                held |= owners.get(actor, set())
            if not set(event.qubits) <= held:
                violations.append({"event": index, "actors": list(event.actors), "qubits": list(event.qubits)})
        return _result(not violations, f"{len(violations)} locality violations", violations or None)

    def check_widths():
        cardinality = {e.key: e.cardinality for e in transcript.events if e.kind == "measurement" and e.key}
        short = []
        for index, event in enumerate(transcript.messages()):
            width = event.width if event.width is not None else len(event.bits or "")
            needed = cardinality.get(event.key, event.cardinality)
            if len(event.bits or "") != width or (needed is not None and width < bits_for(needed)):
                short.append({"message": index, "key": event.key, "width": width,
                              "needed": bits_for(needed) if needed else None})
        return _result(not short, f"{len(short)} messages too narrow for their outcome sets", short or None)

    def check_knowledge():
        known = {party: set() for party in transcript.ownership}
        missing = []
        for index, event in enumerate(transcript.events):
            if event.kind == "measurement" and event.key:
                known.setdefault(event.party, set()).add(event.key)
            elif event.kind == "message" and event.key:
                if event.key not in known.get(event.party, set()):
                    missing.append({"event": index, "party": event.party, "key": event.key})
                known.setdefault(event.receiver, set()).add(event.key)
            elif event.kind in ("unitary", "correction", "joint"):
                available = set()
                for actor in event.actors:
                    available |= known.get(actor, set())
                for key in event.depends_on:
                    if key not in available:
                        missing.append({"event": index, "party": list(event.actors), "key": key})
        return _result(not missing, f"{len(missing)} steps use outcomes their party never received", missing or None)

    def check_fidelity():
        if transcript.fidelity is None:
            return _result(contract.name == "dense", "No fidelity recorded")
        ok = transcript.fidelity >= 1 - tolerance
        return _result(ok, f"Fidelity {transcript.fidelity:.12f} (tolerance {tolerance:g})", transcript.fidelity)

    return [
        ("parties", check_parties),
        ("cbits", check_cbits),
        ("joint", check_joint),
        ("locality", check_locality),
        ("message_width", check_widths),
        ("knowledge", check_knowledge),
        ("fidelity", check_fidelity),
    ]


def audit(transcript: ProtocolTranscript, expected: Union[str, ProtocolContract, None] = None,
          tolerance: Optional[float] = None) -> ClaimChecker:
    """Run every contract check on a transcript; the checker holds results and summary"""
    if expected is None:
        expected = transcript.protocol
    contract = expected if isinstance(expected, ProtocolContract) else CONTRACTS.get(expected)
    if contract is None:
        raise ValueError(f"No contract for protocol {expected!r}; known: {sorted(CONTRACTS)}")
    if tolerance is None:
        tolerance = get_settings()["tolerance"]
    checker = ClaimChecker(f"audit {contract.name}", critical=("locality", "knowledge"))
    checker.check_all(audit_checks(transcript, contract, tolerance))
    return checker
