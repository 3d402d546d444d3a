"""
Constructions of the Brown five-qubit state and its relatives

Bell names follow the convention used throughout this package:
psi+/- = (|00> +/- |11>)/sqrt(2), phi+/- = (|01> +/- |10>)/sqrt(2).
"""

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, Iterable, Optional, Sequence, Tuple

import numpy as np

from .errors import ConstructionMismatch, InvalidState, UnnormalizedWeights
from .qsim import (
    MeasurementBasis,
    StateVector,
    apply_on_subset,
    complete_unitary,
    fidelity,
    partial_trace,
    tensor,
    von_neumann_entropy,
)

SQRT2 = math.sqrt(2.0)
CONSTRUCTION_TOL = 1e-12
WEIGHT_TOL = 1e-12
CONDITION_TOL = 1e-9

BELL_NAMES = ("psi+", "psi-", "phi+", "phi-")

# (three-qubit prefix, Bell partner) for each branch of the Brown state
BRANCHES = (("001", "phi-"), ("010", "psi-"), ("100", "phi+"), ("111", "psi+"))

CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)

_BELL_AMPLITUDES = {
    "psi+": (1, 0, 0, 1),
    "psi-": (1, 0, 0, -1),
    "phi+": (0, 1, 1, 0),
    "phi-": (0, 1, -1, 0),
}


def bell_state(kind: str) -> StateVector:
    """Named Bell pair"""
    try:
        amps = _BELL_AMPLITUDES[kind]
    except KeyError:
        raise InvalidState(f"Unknown Bell state {kind!r}; expected one of {BELL_NAMES}")
    return StateVector(np.array(amps, dtype=complex) / SQRT2)


def bell_basis(subset: Sequence[int]) -> MeasurementBasis:
    """Bell measurement on two qubits, outcomes in the order psi+, psi-, phi+, phi-"""
    return MeasurementBasis(
        tuple(subset),
        np.array([bell_state(name).amplitudes for name in BELL_NAMES]),
        BELL_NAMES,
    )


def _branch_sum(weights: Sequence[float], prefixes: Optional[Sequence[str]] = None) -> StateVector:
    prefixes = prefixes or ("",) * len(BRANCHES)
    amps = None
    for weight, prefix, (bits, bell) in zip(weights, prefixes, BRANCHES):
        term = weight * np.kron(StateVector.basis(prefix + bits).amplitudes, bell_state(bell).amplitudes)
        amps = term if amps is None else amps + term
    return StateVector(amps)


def brown_state() -> StateVector:
    """The five-qubit Brown state, 1/2 sum |t_i>|bell_i>"""
    return _branch_sum((0.5, 0.5, 0.5, 0.5))


def ghz_state(n_qubits: int = 5) -> StateVector:
    amps = np.zeros(2 ** n_qubits, dtype=complex)
    amps[0] = amps[-1] = 1 / SQRT2
    return StateVector(amps)


def w_state(n_qubits: int = 5) -> StateVector:
    amps = np.zeros(2 ** n_qubits, dtype=complex)
    for k in range(n_qubits):
        amps[1 << k] = 1 / math.sqrt(n_qubits)
    return StateVector(amps)


@dataclass(frozen=True)
class SignedPermutationMatrix:
    """Unitary with a single +/-1 per row and column; rows and columns are 1-based"""

    dim: int
    mapping: Tuple[Tuple[int, int], ...]
    completed: Tuple[Tuple[int, int, int], ...] = ()

    def __post_init__(self):
        if len(self.mapping) != self.dim:
            raise InvalidState(f"Expected {self.dim} rows, got {len(self.mapping)}")
        columns = [col for col, _ in self.mapping]
        if sorted(columns) != list(range(1, self.dim + 1)):
            raise InvalidState("Columns are not used exactly once")
        if any(sign not in (1, -1) for _, sign in self.mapping):
            raise InvalidState("Signs must be +1 or -1")

    @classmethod
    def from_entries(cls, dim: int, plus_one: Iterable[Sequence[int]], minus_one: Iterable[Sequence[int]]) -> "SignedPermutationMatrix":
        """Build from (row, col) positions, pairing any rows left empty with unused columns (+1)"""
        rows: Dict[int, Tuple[int, int]] = {}
        for sign, entries in ((1, plus_one), (-1, minus_one)):
            for row, col in entries:
                row, col = int(row), int(col)
                if not (1 <= row <= dim and 1 <= col <= dim):
                    raise InvalidState(f"Entry ({row}, {col}) outside a {dim}x{dim} matrix")
                if row in rows:
                    raise InvalidState(f"Row {row} listed twice")
                rows[row] = (col, sign)

        used = {col for col, _ in rows.values()}
        free_rows = [r for r in range(1, dim + 1) if r not in rows]
        free_cols = [c for c in range(1, dim + 1) if c not in used]
        if len(free_rows) != len(free_cols):
            raise InvalidState("Listed entries reuse a column")
        completed = []
        for row, col in zip(free_rows, free_cols):
            rows[row] = (col, 1)
            completed.append((row, col, 1))

        return cls(dim, tuple(rows[r] for r in range(1, dim + 1)), tuple(completed))

    def entry(self, row: int, col: int) -> int:
        mapped, sign = self.mapping[row - 1]
        return sign if mapped == col else 0

    def to_dense(self) -> np.ndarray:
        matrix = np.zeros((self.dim, self.dim), dtype=np.int64)
        for row, (col, sign) in enumerate(self.mapping):
            matrix[row, col - 1] = sign
        return matrix

    def is_exactly_unitary(self) -> bool:
        """U U^T = I in integer arithmetic"""
        dense = self.to_dense()
        return bool(np.array_equal(dense @ dense.T, np.eye(self.dim, dtype=np.int64)))

    def apply(self, state: StateVector) -> StateVector:
        if state.dim != self.dim:
            raise InvalidState(f"State dimension {state.dim} does not match {self.dim}")
        out = np.empty(self.dim, dtype=complex)
        for row, (col, sign) in enumerate(self.mapping):
            out[row] = sign * state.amplitudes[col - 1]
        return StateVector(out)


def build_ub() -> SignedPermutationMatrix:
    """32x32 preparation unitary from the transcribed entries; the one unlisted row is completed"""
    from .tables import load_printed_tables

    section = load_printed_tables()["ub"]
    return SignedPermutationMatrix.from_entries(section["dim"], section["plus_one"], section["minus_one"])


def ub_to_json() -> Dict:
    ub = build_ub()
    return {
        "dim": ub.dim,
        "matrix": ub.to_dense().tolist(),
        "completed": [list(entry) for entry in ub.completed],
    }


def w_state_via_cnot() -> StateVector:
    """CNOT(control 3, target 2) applied to phi+ (x) |+>"""
    plus = StateVector(np.array([1, 1], dtype=complex) / SQRT2)
    return apply_on_subset(tensor(bell_state("phi+"), plus), CNOT, (3, 2))


def prepare_brown_via_circuit() -> StateVector:
    """U_b applied to |W>|psi+>, checked against the literal expansion"""
    prepared = build_ub().apply(tensor(w_state_via_cnot(), bell_state("psi+")))
    literal = brown_state()
    overlap = fidelity(prepared, literal)
    if overlap < 1 - CONSTRUCTION_TOL:
        diff = prepared.amplitudes - literal.amplitudes
        worst = int(np.argmax(np.abs(diff)))
        raise ConstructionMismatch(
            f"Circuit preparation has fidelity {overlap:.15f} with the literal state; "
            f"largest amplitude difference {abs(diff[worst]):.3e} at |{worst:05b}>"
        )
    return prepared


@dataclass(frozen=True, eq=False)
class OmegaBasis:
    """Four orthonormal three-qubit states |t_i[3]>|bell_i>"""

    vectors: Tuple[StateVector, ...]

    def __post_init__(self):
        if len(self.vectors) != 4 or any(v.n_qubits != 3 for v in self.vectors):
            raise InvalidState("Omega basis needs four three-qubit states")
        gram = self.matrix().conj() @ self.matrix().T
        if np.max(np.abs(gram - np.eye(4))) > CONSTRUCTION_TOL:
            raise InvalidState("Omega vectors are not orthonormal")

    def matrix(self) -> np.ndarray:
        """One vector per row"""
        return np.array([v.amplitudes for v in self.vectors])

    def __getitem__(self, index: int) -> StateVector:
        return self.vectors[index]


@lru_cache(maxsize=1)
def omega_basis() -> OmegaBasis:
    return OmegaBasis(tuple(tensor(StateVector.basis(bits[2]), bell_state(bell)) for bits, bell in BRANCHES))


def omega_form_state(weights: Sequence[float] = (0.5, 0.5, 0.5, 0.5)) -> StateVector:
    """sum A_i |Omega_i>|bell_i>"""
    w = WeightVector(tuple(weights)).require_normalized()
    amps = sum(
        a * np.kron(omega.amplitudes, bell_state(bell).amplitudes)
        for a, omega, (_, bell) in zip(w.values, omega_basis().vectors, BRANCHES)
    )
    return StateVector(amps)


def omega_relabeling_unitary() -> np.ndarray:
    """Three-qubit unitary taking each branch prefix |t_i> to |Omega_i>"""
    sources = np.array([StateVector.basis(bits).amplitudes for bits, _ in BRANCHES]).T
    targets = omega_basis().matrix().T
    return complete_unitary(sources, targets)


@dataclass(frozen=True)
class GeneralizedIndex:
    """n prefix qubits and the four distinct labels eta_1..eta_4"""

    n: int
    eta: Tuple[str, ...]

    def __post_init__(self):
        if self.n < 0:
            raise InvalidState(f"n must be non-negative, got {self.n}")
        if len(self.eta) != 4:
            raise InvalidState("Exactly four eta labels are required")
        if any(len(label) != self.n or set(label) - {"0", "1"} for label in self.eta):
            raise InvalidState(f"eta labels must be {self.n}-bit strings: {self.eta}")
        if self.n > 0 and len(set(self.eta)) != 4:
            raise InvalidState(f"eta labels must be pairwise distinct: {self.eta}")

    @classmethod
    def default(cls, n: int) -> "GeneralizedIndex":
        """Labels 0, 3, 2, 1 written on n bits (00, 11, 10, 01 for n=2)"""
        if n == 0:
            return cls(0, ("", "", "", ""))
        return cls(n, tuple(format(v, f"0{n}b") for v in (0, 3, 2, 1)))


def generalized_brown(idx: GeneralizedIndex) -> StateVector:
    """1/2 sum |eta_i>|t_i>|bell_i> on n + 5 qubits"""
    return _branch_sum((0.5, 0.5, 0.5, 0.5), idx.eta)


@dataclass(frozen=True)
class WeightVector:
    values: Tuple[float, ...]

    def __post_init__(self):
        if len(self.values) != 4:
            raise InvalidState(f"Four weights are required, got {len(self.values)}")
        if not all(math.isfinite(float(a)) for a in self.values):
            raise InvalidState("Weights must be finite")
        object.__setattr__(self, "values", tuple(float(a) for a in self.values))

    @property
    def squared_norm(self) -> float:
        return sum(a * a for a in self.values)

    def require_normalized(self) -> "WeightVector":
        if abs(self.squared_norm - 1.0) > WEIGHT_TOL:
            raise UnnormalizedWeights(f"Weights square-sum to {self.squared_norm!r}, expected 1")
        return self


def weighted_brown(w) -> StateVector:
    """sum A_i |t_i>|bell_i>"""
    weights = w if isinstance(w, WeightVector) else WeightVector(tuple(w))
    return _branch_sum(weights.require_normalized().values)


def _xlogx(p: float) -> float:
    return p * math.log2(p) if p > 0 else 0.0


def weight_entropy(w) -> float:
    """Shannon entropy of (A_i^2) in bits"""
    weights = w if isinstance(w, WeightVector) else WeightVector(tuple(w))
    return -sum(_xlogx(a * a) for a in weights.values)


@dataclass(frozen=True)
class WeightCheck:
    satisfied: bool
    residual_21: float
    residual_22: float
    lhs_21: float
    lhs_22: float

    def to_json(self) -> Dict:
        return {
            "satisfied": self.satisfied,
            "residual_21": self.residual_21,
            "residual_22": self.residual_22,
            "lhs_21": self.lhs_21,
            "lhs_22": self.lhs_22,
        }


def check_weight_conditions(w) -> WeightCheck:
    """Evaluate both weight relations literally, with 0 log 0 = 0.

    lhs_21 = -sum A^2 (1 + log2 A^2) must equal 1 and
    lhs_22 = -(A3^2 + A4^2) log2(A3^2 + A4^2) must equal 1/2.
    """
    weights = w if isinstance(w, WeightVector) else WeightVector(tuple(w))
    squares = [a * a for a in weights.values]
    lhs_21 = -sum(p + _xlogx(p) for p in squares if p > 0)
    lhs_22 = -_xlogx(squares[2] + squares[3])
    residual_21 = abs(lhs_21 - 1.0)
    residual_22 = abs(lhs_22 - 0.5)
    return WeightCheck(
        satisfied=residual_21 < CONDITION_TOL and residual_22 < CONDITION_TOL,
        residual_21=residual_21,
        residual_22=residual_22,
        lhs_21=lhs_21,
        lhs_22=lhs_22,
    )


def weighted_reductions(w) -> Dict[str, object]:
    """Single-qubit purities and the entropies the weight relations refer to"""
    state = weighted_brown(w)
    return {
        "single_qubit_purity": [partial_trace(state, (q,)).purity for q in range(1, 6)],
        "entropy_45": von_neumann_entropy(partial_trace(state, (4, 5))),
        "entropy_5": von_neumann_entropy(partial_trace(state, (5,))),
    }
