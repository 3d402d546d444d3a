"""
Dense state-vector and density-matrix engine

Qubit labels are 1-based. Qubit 1 is the leftmost ket symbol and the most
significant bit of the amplitude index, so |00101> is index 5 on five qubits.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from enum import Enum
from functools import reduce
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
from scipy import linalg

from .errors import (
    DegenerateState,
    InvalidState,
    InvalidSubset,
    NonUnitaryConversion,
    NonUnitaryOperator,
    ProbabilityLeak,
)

# Tolerances
NORM_TOL = 1e-12
HERMITIAN_TOL = 1e-12
ORTHO_TOL = 1e-10
UNITARY_TOL = 1e-10
PROB_TOL = 1e-9
ENTROPY_TOL = 1e-9
EIGEN_CLAMP = 1e-12
DEGENERATE_NORM = 1e-14

QubitSubset = Tuple[int, ...]
REMAINDER_LABEL = "remainder"


def _qubits_for_length(length: int) -> int:
    """Number of qubits for a register of the given dimension"""
    if length < 1 or length & (length - 1):
        raise InvalidState(f"Register dimension must be a power of 2, got {length}")
    return length.bit_length() - 1


def check_subset(subset: Iterable[int], n_qubits: int) -> QubitSubset:
    """Validate an ordered list of distinct 1-based labels against a register size"""
    labels = tuple(int(q) for q in subset)
    if not labels:
        raise InvalidSubset("Qubit subset must not be empty")
    if len(set(labels)) != len(labels):
        raise InvalidSubset(f"Qubit subset has duplicate labels: {labels}")
    for q in labels:
        if q < 1 or q > n_qubits:
            raise InvalidSubset(f"Qubit {q} outside register of {n_qubits} qubits")
    return labels


def complement(subset: Iterable[int], n_qubits: int) -> QubitSubset:
    """Labels not in subset, ascending"""
    taken = set(subset)
    return tuple(q for q in range(1, n_qubits + 1) if q not in taken)


def _front_matrix(amps: np.ndarray, n_qubits: int, labels: Sequence[int]) -> np.ndarray:
    """Rows index `labels` (in the given order), columns the remaining qubits ascending"""
    axes = [q - 1 for q in labels]
    rest = [k for k in range(n_qubits) if k not in axes]
    tensor = np.asarray(amps).reshape((2,) * n_qubits)
    moved = np.transpose(tensor, axes + rest)
    return moved.reshape(2 ** len(axes), 2 ** len(rest))


def _from_front(matrix: np.ndarray, n_qubits: int, labels: Sequence[int]) -> np.ndarray:
    """Inverse of _front_matrix"""
    axes = [q - 1 for q in labels]
    rest = [k for k in range(n_qubits) if k not in axes]
    tensor = np.asarray(matrix).reshape((2,) * n_qubits)
    return np.transpose(tensor, np.argsort(axes + rest)).reshape(-1)


@dataclass(frozen=True, eq=False)
class StateVector:
    """Normalized pure state on n qubits, amplitudes in msb-first index order"""

    amplitudes: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        amps = np.array(self.amplitudes, dtype=complex).reshape(-1)
        n = _qubits_for_length(len(amps))
        if not np.all(np.isfinite(amps)):
            raise InvalidState("State amplitudes must be finite")
        norm = float(np.vdot(amps, amps).real)
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidState(f"State is not normalized: sum |a|^2 = {norm!r}")
        amps.setflags(write=False)
        object.__setattr__(self, "amplitudes", amps)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def from_amplitudes(cls, values: Iterable[complex], normalize: bool = False) -> "StateVector":
        amps = np.array(list(values) if not isinstance(values, np.ndarray) else values, dtype=complex)
        if normalize:
            norm = np.linalg.norm(amps)
            if norm < DEGENERATE_NORM:
                raise DegenerateState("Cannot normalize a zero vector")
            amps = amps / norm
        return cls(amps)

    @classmethod
    def basis(cls, bits: str) -> "StateVector":
        """Computational basis ket, e.g. StateVector.basis('01')"""
        if any(b not in "01" for b in bits):
            raise InvalidState(f"Basis label must be a bit string, got {bits!r}")
        amps = np.zeros(2 ** len(bits), dtype=complex)
        amps[int(bits, 2) if bits else 0] = 1.0
        return cls(amps)

    @property
    def dim(self) -> int:
        return len(self.amplitudes)

    def amplitude(self, index: Union[int, str]) -> complex:
        if isinstance(index, str):
            if len(index) != self.n_qubits:
                raise InvalidState(f"Expected {self.n_qubits} bits, got {index!r}")
            index = int(index, 2)
        return complex(self.amplitudes[index])

    def nonzero_terms(self, tol: float = 1e-12) -> List[Tuple[str, complex]]:
        """(bit string, amplitude) for every amplitude above tol"""
        width = self.n_qubits
        return [
            (format(i, f"0{width}b") if width else "", complex(a))
            for i, a in enumerate(self.amplitudes)
            if abs(a) > tol
        ]

    def to_json(self) -> Dict:
        return {
            "n": self.n_qubits,
            "amps": [[float(a.real), float(a.imag)] for a in self.amplitudes],
        }

    @classmethod
    def from_json(cls, obj: Union[str, Mapping]) -> "StateVector":
        """Read {"n": int, "amps": [[re, im], ...]}; normalization is re-verified"""
        if isinstance(obj, str):
            obj = json.loads(obj)
        try:
            n = int(obj["n"])
            pairs = obj["amps"]
        except (KeyError, TypeError) as e:
            raise InvalidState(f"State JSON must have 'n' and 'amps': {e}")
        if len(pairs) != 2 ** n:
            raise InvalidState(f"Expected {2 ** n} amplitudes for n={n}, got {len(pairs)}")
        amps = np.array([complex(float(re), float(im)) for re, im in pairs], dtype=complex)
        return cls(amps)


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Hermitian, positive semidefinite, unit-trace matrix"""

    entries: np.ndarray
    n_qubits: int = field(init=False)

    def __post_init__(self):
        rho = np.array(self.entries, dtype=complex)
        if rho.ndim != 2 or rho.shape[0] != rho.shape[1]:
            raise InvalidState(f"Density matrix must be square, got shape {rho.shape}")
        n = _qubits_for_length(rho.shape[0])
        if not np.all(np.isfinite(rho)):
            raise InvalidState("Density matrix entries must be finite")
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvalidState("Density matrix is not Hermitian")
        rho = 0.5 * (rho + rho.conj().T)
        trace = float(np.trace(rho).real)
        if abs(trace - 1.0) > NORM_TOL:
            raise InvalidState(f"Density matrix trace is {trace!r}, expected 1")
        if np.min(np.linalg.eigvalsh(rho)) < -ORTHO_TOL:
            raise InvalidState("Density matrix has a negative eigenvalue")
        rho.setflags(write=False)
        object.__setattr__(self, "entries", rho)
        object.__setattr__(self, "n_qubits", n)

    @classmethod
    def from_state(cls, state: StateVector) -> "DensityMatrix":
        return cls(np.outer(state.amplitudes, state.amplitudes.conj()))

    @property
    def dim(self) -> int:
        return self.entries.shape[0]

    @property
    def purity(self) -> float:
        # Tr(rho^2) = sum |rho_ij|^2 for Hermitian rho
        return float(np.vdot(self.entries, self.entries).real)

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.entries)


class PauliLabel(str, Enum):
    """Single-qubit correction operators; Y_SIGNED is i*sigma_2 as the real matrix [[0,1],[-1,0]]"""

    I = "I"
    X = "X"
    Y_SIGNED = "iY"
    Z = "Z"

    @property
    def matrix(self) -> np.ndarray:
        return _PAULI_MATRICES[self]

    @property
    def symbol(self) -> str:
        return _PAULI_SYMBOLS[self]

    @classmethod
    def parse(cls, token: str) -> "PauliLabel":
        try:
            return _PAULI_ALIASES[token.strip()]
        except KeyError:
            raise ValueError(f"Unknown Pauli label {token!r}")


_PAULI_MATRICES = {
    PauliLabel.I: np.array([[1, 0], [0, 1]], dtype=complex),
    PauliLabel.X: np.array([[0, 1], [1, 0]], dtype=complex),
    PauliLabel.Y_SIGNED: np.array([[0, 1], [-1, 0]], dtype=complex),
    PauliLabel.Z: np.array([[1, 0], [0, -1]], dtype=complex),
}
for _m in _PAULI_MATRICES.values():
    _m.setflags(write=False)

_PAULI_SYMBOLS = {
    PauliLabel.I: "I",
    PauliLabel.X: "σ1",
    PauliLabel.Y_SIGNED: "iσ2",
    PauliLabel.Z: "σ3",
}

_PAULI_ALIASES = {}
for _label, _names in {
    PauliLabel.I: ("I", "1", "id"),
    PauliLabel.X: ("X", "s1", "σ1", "sigma1"),
    PauliLabel.Y_SIGNED: ("iY", "is2", "iσ2", "isigma2", "Y_signed"),
    PauliLabel.Z: ("Z", "s3", "σ3", "sigma3"),
}.items():
    for _name in _names:
        _PAULI_ALIASES[_name] = _label


def pauli_product(labels: Sequence[PauliLabel]) -> np.ndarray:
    """Tensor product of single-qubit Pauli matrices, first label on the leftmost qubit"""
    return reduce(np.kron, [PauliLabel(label).matrix for label in labels])


def is_unitary(u: np.ndarray, tol: float = UNITARY_TOL) -> bool:
    u = np.asarray(u, dtype=complex)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        return False
    return bool(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))) <= tol)


def complete_unitary(sources: np.ndarray, targets: np.ndarray, tol: float = UNITARY_TOL) -> np.ndarray:
    """Unitary sending each source column to the matching target column.

    Both arguments are d x k with orthonormal columns; the orthogonal
    complements are paired up arbitrarily to finish the map.
    """
    src = np.asarray(sources, dtype=complex)
    tgt = np.asarray(targets, dtype=complex)
    if src.shape != tgt.shape or src.ndim != 2:
        raise NonUnitaryConversion(f"Shape mismatch: {src.shape} vs {tgt.shape}")
    k = src.shape[1]
    for name, block in (("sources", src), ("targets", tgt)):
        if np.max(np.abs(block.conj().T @ block - np.eye(k))) > tol:
            raise NonUnitaryConversion(f"{name} are not orthonormal")
    src_full = np.hstack([src, linalg.null_space(src.conj().T)])
    tgt_full = np.hstack([tgt, linalg.null_space(tgt.conj().T)])
    u = tgt_full @ src_full.conj().T
    if not is_unitary(u, tol):
        raise NonUnitaryConversion("Completed map is not unitary")
    return u


def tensor(*states: StateVector) -> StateVector:
    """Tensor product in msb-first order: amplitude(i (+) j) = a(i) * b(j)"""
    if not states:
        raise InvalidState("tensor() needs at least one state")
    return StateVector(reduce(np.kron, [s.amplitudes for s in states]))


def apply_on_subset(state: StateVector, u: np.ndarray, subset: Sequence[int]) -> StateVector:
    """Apply u to the qubits in subset; u's first tensor factor acts on subset[0]"""
    labels = check_subset(subset, state.n_qubits)
    u = np.asarray(u, dtype=complex)
    dim = 2 ** len(labels)
    if u.shape != (dim, dim):
        raise NonUnitaryOperator(f"Operator shape {u.shape} does not match {len(labels)} qubits")
    if not is_unitary(u):
        raise NonUnitaryOperator("Operator is not unitary within tolerance")
    front = _front_matrix(state.amplitudes, state.n_qubits, labels)
    return StateVector(_from_front(u @ front, state.n_qubits, labels))


@dataclass(frozen=True, eq=False)
class MeasurementBasis:
    """Orthonormal vectors on a qubit subset; may span only a subspace"""

    subset: QubitSubset
    vectors: np.ndarray
    labels: Tuple[str, ...] = ()
    remainder_allowed: bool = False

    def __post_init__(self):
        subset = tuple(int(q) for q in self.subset)
        if not subset or len(set(subset)) != len(subset) or min(subset) < 1:
            raise InvalidSubset(f"Invalid measurement subset {self.subset!r}")
        rows = np.array(
            [v.amplitudes if isinstance(v, StateVector) else np.asarray(v) for v in self.vectors],
            dtype=complex,
        )
        dim = 2 ** len(subset)
        if rows.ndim != 2 or rows.shape[1] != dim:
            raise InvalidState(f"Basis vectors must have dimension {dim}")
        if not 0 < rows.shape[0] <= dim:
            raise InvalidState(f"Basis on {len(subset)} qubits holds 1..{dim} vectors, got {rows.shape[0]}")
        gram = rows.conj() @ rows.T
        if np.max(np.abs(gram - np.eye(rows.shape[0]))) > ORTHO_TOL:
            raise InvalidState("Basis vectors are not orthonormal")
        labels = tuple(self.labels) or tuple(str(i) for i in range(rows.shape[0]))
        if len(labels) != rows.shape[0]:
            raise InvalidState("One label per basis vector is required")
        rows.setflags(write=False)
        object.__setattr__(self, "subset", subset)
        object.__setattr__(self, "vectors", rows)
        object.__setattr__(self, "labels", labels)

    @property
    def count(self) -> int:
        return self.vectors.shape[0]

    @property
    def complete(self) -> bool:
        return self.count == self.vectors.shape[1]

    @property
    def outcome_count(self) -> int:
        return self.count + (1 if self.remainder_allowed else 0)

    def label_of(self, outcome: int) -> str:
        return self.labels[outcome] if outcome < self.count else REMAINDER_LABEL

    def vector(self, outcome: int) -> StateVector:
        return StateVector(self.vectors[outcome])

    def relabeled(self, subset: Sequence[int]) -> "MeasurementBasis":
        """Same vectors applied to a different qubit subset"""
        return MeasurementBasis(tuple(subset), self.vectors, self.labels, self.remainder_allowed)


@dataclass(frozen=True, eq=False)
class MeasurementResult:
    outcome: int
    label: str
    probability: float
    probabilities: Tuple[float, ...]
    post_state: StateVector
    residual: Optional[StateVector]
    collapsed: StateVector
    draw: float

    @property
    def is_remainder(self) -> bool:
        return self.residual is None


def measure_in_basis(state: StateVector, basis: MeasurementBasis, random_draw: float) -> MeasurementResult:
    """Projective measurement with an explicit draw in [0, 1).

    The outcome is picked by inverse CDF over the listed outcomes, remainder
    last. post_state is the complement register when the basis is complete and
    the renormalized full projection otherwise.
    """
    draw = float(random_draw)
    if not 0.0 <= draw < 1.0:
        raise ValueError(f"random_draw must lie in [0, 1), got {random_draw!r}")
    n = state.n_qubits
    labels = check_subset(basis.subset, n)

    front = _front_matrix(state.amplitudes, n, labels)
    coeffs = basis.vectors.conj() @ front
    probs = np.sum(np.abs(coeffs) ** 2, axis=1)
    leftover = front - basis.vectors.T @ coeffs
    remainder = float(np.sum(np.abs(leftover) ** 2))

    if not basis.remainder_allowed and (remainder > PROB_TOL or abs(float(probs.sum()) - 1.0) > PROB_TOL):
        raise ProbabilityLeak(
            f"Basis on qubits {labels} leaves probability {remainder:.3e} outside its span"
        )

    all_probs = [float(p) for p in probs]
    if basis.remainder_allowed:
        all_probs.append(remainder)

    cumulative = np.cumsum(all_probs)
    outcome = min(int(np.searchsorted(cumulative, draw, side="right")), len(all_probs) - 1)
    if all_probs[outcome] <= DEGENERATE_NORM ** 2:
        # Only reachable when rounding carries the draw past a zero-width interval
        earlier = [i for i in range(outcome) if all_probs[i] > DEGENERATE_NORM ** 2]
        if earlier:
            outcome = earlier[-1]

    probability = all_probs[outcome]
    if math.sqrt(max(probability, 0.0)) < DEGENERATE_NORM:
        raise DegenerateState(f"Outcome {outcome} has a vanishing projection")
    scale = math.sqrt(probability)

    if outcome < basis.count:
        residual_amps = coeffs[outcome] / scale
        residual = StateVector(residual_amps)
        collapsed = StateVector(_from_front(np.outer(basis.vectors[outcome], residual_amps), n, labels))
        post_state = residual if basis.complete else collapsed
    else:
        residual = None
        collapsed = StateVector(_from_front(leftover / scale, n, labels))
        post_state = collapsed

    return MeasurementResult(
        outcome=outcome,
        label=basis.label_of(outcome),
        probability=probability,
        probabilities=tuple(all_probs),
        post_state=post_state,
        residual=residual,
        collapsed=collapsed,
        draw=draw,
    )


def outcome_probabilities(state: StateVector, basis: MeasurementBasis) -> Tuple[float, ...]:
    """Exact probabilities of every listed outcome, remainder last"""
    labels = check_subset(basis.subset, state.n_qubits)
    front = _front_matrix(state.amplitudes, state.n_qubits, labels)
    coeffs = basis.vectors.conj() @ front
    probs = [float(p) for p in np.sum(np.abs(coeffs) ** 2, axis=1)]
    leftover = front - basis.vectors.T @ coeffs
    return tuple(probs + [float(np.sum(np.abs(leftover) ** 2))])


def partial_trace(state: Union[StateVector, DensityMatrix], keep: Sequence[int]) -> DensityMatrix:
    """Reduced state on `keep`, kept qubits ordered as given"""
    n = state.n_qubits
    labels = check_subset(keep, n)
    if isinstance(state, StateVector):
        front = _front_matrix(state.amplitudes, n, labels)
        return DensityMatrix(front @ front.conj().T)

    axes = [q - 1 for q in labels]
    rest = [k for k in range(n) if k not in axes]
    t = state.entries.reshape((2,) * (2 * n))
    t = np.transpose(t, axes + rest + [n + a for a in axes] + [n + r for r in rest])
    dk, dr = 2 ** len(axes), 2 ** len(rest)
    return DensityMatrix(np.einsum("ajbj->ab", t.reshape(dk, dr, dk, dr)))


def von_neumann_entropy(rho: Union[DensityMatrix, StateVector]) -> float:
    """S = -sum l log2 l in bits, eigenvalues clamped to [0, 1], 0 log 0 = 0"""
    if isinstance(rho, StateVector):
        return 0.0
    evals = np.clip(np.linalg.eigvalsh(rho.entries).real, 0.0, 1.0)
    evals = evals[evals > EIGEN_CLAMP]
    entropy = float(-np.sum(evals * np.log2(evals)))
    return min(max(entropy, 0.0), float(rho.n_qubits))


def fidelity(a: StateVector, b: StateVector) -> float:
    """|<a|b>|^2, insensitive to global phase"""
    if a.n_qubits != b.n_qubits:
        raise InvalidState(f"Qubit count mismatch: {a.n_qubits} vs {b.n_qubits}")
    value = abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2
    return float(min(1.0, max(0.0, value)))


def _permutation_targets(perm: Union[Mapping[int, int], Sequence[int]], n_qubits: int) -> List[int]:
    if isinstance(perm, Mapping):
        targets = [int(perm.get(q, q)) for q in range(1, n_qubits + 1)]
    else:
        targets = [int(t) for t in perm]
    if sorted(targets) != list(range(1, n_qubits + 1)):
        raise InvalidSubset(f"Not a bijection on 1..{n_qubits}: {perm!r}")
    return targets


def permute_qubits(state: StateVector, perm: Union[Mapping[int, int], Sequence[int]]) -> StateVector:
    """Move qubit i to position perm(i); a sequence gives perm(i) at index i-1"""
    n = state.n_qubits
    targets = _permutation_targets(perm, n)
    axes = [0] * n
    for source, target in enumerate(targets):
        axes[target - 1] = source
    return StateVector(np.transpose(state.amplitudes.reshape((2,) * n), axes).reshape(-1))


def compose_permutations(outer: Sequence[int], inner: Sequence[int]) -> Tuple[int, ...]:
    """outer o inner, both as target sequences"""
    return tuple(outer[t - 1] for t in inner)


def invert_permutation(perm: Sequence[int]) -> Tuple[int, ...]:
    inverse = [0] * len(perm)
    for source, target in enumerate(perm, start=1):
        inverse[target - 1] = source
    return tuple(inverse)


def schmidt_coefficients(state: StateVector, subset: Sequence[int]) -> np.ndarray:
    """Singular values of the state reshaped across subset | rest, descending"""
    labels = check_subset(subset, state.n_qubits)
    return linalg.svdvals(_front_matrix(state.amplitudes, state.n_qubits, labels))


def random_state(n_qubits: int, rng: np.random.Generator) -> StateVector:
    """Haar-random pure state"""
    dim = 2 ** n_qubits
    amps = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return StateVector(amps / np.linalg.norm(amps))


def computational_basis(subset: Sequence[int]) -> MeasurementBasis:
    width = len(subset)
    dim = 2 ** width
    return MeasurementBasis(
        tuple(subset),
        np.eye(dim, dtype=complex),
        tuple(format(i, f"0{width}b") for i in range(dim)),
    )


def plus_minus_basis(subset: Sequence[int]) -> MeasurementBasis:
    """Product basis of (|0> +/- |1>)/sqrt(2) on every qubit of subset"""
    single = {"+": np.array([1, 1]) / math.sqrt(2), "-": np.array([1, -1]) / math.sqrt(2)}
    vectors, labels = [np.ones(1, dtype=complex)], [""]
    for _ in subset:
        vectors = [np.kron(v, s) for v in vectors for s in single.values()]
        labels = [label + sign for label in labels for sign in single]
    return MeasurementBasis(tuple(subset), np.array(vectors), tuple(labels))


def contract(amps: np.ndarray, present: Sequence[int], subset: Sequence[int], vector: np.ndarray) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Apply <vector| on `subset` to an unnormalized register.

    `present` lists the global labels currently held by amps, ascending; the
    result keeps the other labels in the same order.
    """
    positions = [present.index(q) + 1 for q in subset]
    front = _front_matrix(amps, len(present), positions)
    remaining = tuple(q for q in present if q not in subset)
    return np.asarray(vector, dtype=complex).conj() @ front, remaining


def reduced_matrix(amps: np.ndarray, present: Sequence[int], keep: Sequence[int]) -> np.ndarray:
    """Unnormalized reduced matrix of `keep` for a register labelled by `present`"""
    positions = [present.index(q) + 1 for q in keep]
    front = _front_matrix(amps, len(present), positions)
    return front @ front.conj().T


def apply_raw(amps: np.ndarray, present: Sequence[int], subset: Sequence[int], matrix: np.ndarray) -> np.ndarray:
    """Apply a matrix on `subset` of an unnormalized register labelled by `present`"""
    positions = [present.index(q) + 1 for q in subset]
    front = _front_matrix(amps, len(present), positions)
    return _from_front(np.asarray(matrix, dtype=complex) @ front, len(present), positions)
