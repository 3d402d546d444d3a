"""
Brute-force derivation of measurement bases and corrections

A protocol branch is described by its conditional states: the full register
state for each computational secret |s>, which is linear in the secret. Every
basis and correction shipped by the protocols is computed here from those
states and checked for consistency; printed tables are only compared against
the results.
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np

from ..utils.logger import get_logger
from .errors import OracleFailure
from .qsim import (
    DEGENERATE_NORM,
    MeasurementBasis,
    PauliLabel,
    apply_raw,
    contract,
    is_unitary,
    pauli_product,
)

ORACLE_TOL = 1e-10

# One step of a branch: ("project", subset, vector) or ("apply", subset, matrix)
Step = Tuple[str, Tuple[int, ...], np.ndarray]


@dataclass(frozen=True, eq=False)
class DerivedBasis:
    """A basis derived from target residues, with the scale of each residue"""

    basis: MeasurementBasis
    residue_maps: Tuple[np.ndarray, ...]
    scales: Tuple[complex, ...]
    frame: np.ndarray
    receiver: Tuple[int, ...]

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.basis.labels


def propagate(amps: np.ndarray, present: Sequence[int], steps: Sequence[Step]) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Run projections and operators on an unnormalized register"""
    present = tuple(present)
    for kind, subset, operand in steps:
        if kind == "project":
            amps, present = contract(amps, present, subset, operand)
        elif kind == "apply":
            amps = apply_raw(amps, present, subset, operand)
        else:
            raise ValueError(f"Unknown step kind {kind!r}")
    return amps, present


def transfer_columns(conditional: Sequence[np.ndarray], present: Sequence[int], steps: Sequence[Step]) -> Tuple[np.ndarray, Tuple[int, ...]]:
    """Matrix whose column s is the receiver register after `steps` for secret |s>"""
    columns = []
    remaining: Tuple[int, ...] = tuple(present)
    for amps in conditional:
        out, remaining = propagate(amps, present, steps)
        columns.append(out)
    return np.column_stack(columns), remaining


def derive_basis(
    conditional: Sequence[np.ndarray],
    present: Sequence[int],
    receiver: Sequence[int],
    residue_maps: Sequence[np.ndarray],
    labels: Sequence[str],
    frame: Optional[np.ndarray] = None,
    tol: float = ORACLE_TOL,
) -> DerivedBasis:
    """Solve for the measurement vectors that leave each target residue.

    residue_maps[k][x, s] is the coefficient of frame vector x for secret
    symbol s in the residue of outcome k. Alice's vector for outcome k is
    proportional to sum_{x,s} conj(R_k[x,s]) (I (x) <E_x|) Psi(e_s).
    """
    logger = get_logger()
    present = tuple(present)
    receiver = tuple(receiver)
    alice = tuple(q for q in present if q not in receiver)
    frame = np.eye(2 ** len(receiver), dtype=complex) if frame is None else np.asarray(frame, dtype=complex)

    partials = [[contract(psi, present, receiver, e)[0] for e in frame] for psi in conditional]

    vectors = []
    for k, residue in enumerate(residue_maps):
        residue = np.asarray(residue, dtype=complex)
        if residue.shape != (frame.shape[0], len(conditional)):
            raise OracleFailure(f"Residue map {labels[k]} has shape {residue.shape}")
        v = sum(
            np.conj(residue[x, s]) * partials[s][x]
            for s in range(len(conditional))
            for x in range(frame.shape[0])
        )
        norm = np.linalg.norm(v)
        if norm < DEGENERATE_NORM:
            raise OracleFailure(f"Residue {labels[k]} is not reachable from this state")
        vectors.append(v / norm)
    vectors = np.array(vectors)

    gram = vectors.conj() @ vectors.T
    if np.max(np.abs(gram - np.eye(len(vectors)))) > tol:
        raise OracleFailure("Derived measurement vectors are not orthonormal")

    scales = []
    captured = np.zeros(len(conditional))
    for k, residue in enumerate(residue_maps):
        actual = np.column_stack([contract(psi, present, alice, vectors[k])[0] for psi in conditional])
        expected = frame.T @ np.asarray(residue, dtype=complex)
        scale = np.vdot(expected, actual) / np.vdot(expected, expected)
        if np.max(np.abs(actual - scale * expected)) > tol:
            raise OracleFailure(f"Outcome {labels[k]} does not leave the requested residue")
        scales.append(complex(scale))
        captured += np.sum(np.abs(actual) ** 2, axis=0)

    totals = np.array([np.vdot(psi, psi).real for psi in conditional])
    if np.max(np.abs(captured - totals)) > tol:
        raise OracleFailure("Derived basis does not capture every branch of the state")

    basis = MeasurementBasis(alice, vectors, tuple(labels), remainder_allowed=len(vectors) < 2 ** len(alice))
    logger.log_check(
        "derive_basis",
        "PASS",
        f"{len(vectors)} vectors on qubits {alice}, receiver {receiver}",
    )
    return DerivedBasis(basis, tuple(np.asarray(r, dtype=complex) for r in residue_maps), tuple(scales), frame, receiver)


def isometry(columns: np.ndarray, tol: float = ORACLE_TOL) -> np.ndarray:
    """Rescale equal-norm orthogonal columns to orthonormal ones"""
    cols = np.asarray(columns, dtype=complex)
    d = cols.shape[1]
    scale = math.sqrt(float(np.trace(cols.conj().T @ cols).real) / d)
    if scale < DEGENERATE_NORM:
        raise OracleFailure("Branch has zero amplitude")
    iso = cols / scale
    if np.max(np.abs(iso.conj().T @ iso - np.eye(d))) > tol:
        raise OracleFailure("Branch is not proportional to an isometry of the secret")
    return iso


def transfer_unitary(columns: np.ndarray, tol: float = ORACLE_TOL) -> np.ndarray:
    """Normalize a square transfer matrix to the unitary it is proportional to"""
    cols = np.asarray(columns, dtype=complex)
    if cols.shape[0] != cols.shape[1]:
        raise OracleFailure(f"Transfer matrix has shape {cols.shape}, expected square")
    u = isometry(cols, tol)
    if not is_unitary(u, tol):
        raise OracleFailure("Transfer matrix is not proportional to a unitary")
    return u


@dataclass(frozen=True)
class PauliCorrection:
    labels: Tuple[PauliLabel, ...]
    overlap: float

    @property
    def symbol(self) -> str:
        return "⊗".join(label.symbol for label in self.labels)

    def matrix(self) -> np.ndarray:
        return pauli_product(self.labels)


def best_pauli_correction(u: np.ndarray) -> PauliCorrection:
    """Pauli product C maximizing |Tr(C U)| / d over {I, X, Y_signed, Z}^n"""
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    n = dim.bit_length() - 1
    best: Optional[PauliCorrection] = None
    for labels in itertools.product(PauliLabel, repeat=n):
        overlap = abs(np.trace(pauli_product(labels) @ u)) / dim
        if best is None or overlap > best.overlap + 1e-12:
            best = PauliCorrection(tuple(labels), float(overlap))
    return best


def required_pauli_correction(u: np.ndarray, tol: float = ORACLE_TOL) -> PauliCorrection:
    """Best Pauli correction, which must undo u exactly up to global phase"""
    best = best_pauli_correction(u)
    if best.overlap < 1 - tol:
        raise OracleFailure(f"No Pauli product undoes this branch (best overlap {best.overlap:.6f})")
    return best


def describe_vector(vec: np.ndarray, tol: float = 1e-12) -> List[List[str]]:
    """[coefficient, ket] pairs relative to the smallest nonzero amplitude"""
    vec = np.asarray(vec, dtype=complex)
    width = len(vec).bit_length() - 1
    nonzero = [(i, a) for i, a in enumerate(vec) if abs(a) > tol]
    if not nonzero:
        return []
    unit = min(abs(a) for _, a in nonzero)
    terms = []
    for i, a in nonzero:
        coef = a / unit
        if abs(coef.imag) < 1e-9 and abs(coef.real - round(coef.real)) < 1e-9:
            text = f"{int(round(coef.real)):+d}"
        else:
            text = f"{coef.real:+.6f}{coef.imag:+.6f}j"
        terms.append([text, format(i, f"0{width}b")])
    return terms


def compare_vectors(printed: np.ndarray, derived: np.ndarray, tol: float = ORACLE_TOL) -> Dict:
    """Match verdict for a printed vector against the derived one, up to normalization and phase"""
    p = np.asarray(printed, dtype=complex)
    d = np.asarray(derived, dtype=complex)
    p_hat = p / np.linalg.norm(p)
    d_hat = d / np.linalg.norm(d)
    inner = np.vdot(p_hat, d_hat)
    overlap = float(abs(inner) ** 2)
    phase = inner / abs(inner) if abs(inner) > DEGENERATE_NORM else 1.0
    diff = d_hat - phase * p_hat
    match = overlap >= 1 - tol
    entry = {
        "match": match,
        "overlap": overlap,
        "max_amplitude_diff": float(np.max(np.abs(diff))),
    }
    if not match:
        entry["derived"] = describe_vector(d_hat)
        entry["printed"] = describe_vector(p_hat)
    return entry


def compare_operators(printed: np.ndarray, derived: np.ndarray, tol: float = ORACLE_TOL) -> Dict:
    """Match verdict for two operators equal up to a global phase"""
    p = np.asarray(printed, dtype=complex)
    d = np.asarray(derived, dtype=complex)
    norm = math.sqrt(float(np.vdot(p, p).real) * float(np.vdot(d, d).real))
    overlap = abs(np.vdot(p, d)) / norm if norm > DEGENERATE_NORM else 0.0
    return {"match": overlap >= 1 - tol, "overlap": float(overlap)}
