"""
Entanglement diagnostics: purities, bipartition entropies, MEMS,
split-form checks and dense-coding capacity
"""

import itertools
import math
from dataclasses import dataclass
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from .brown import brown_state, ghz_state, w_state
from .errors import InvalidSubset
from .qsim import (
    DensityMatrix,
    StateVector,
    check_subset,
    complement,
    partial_trace,
    schmidt_coefficients,
    von_neumann_entropy,
)

SPLIT_ENTROPY_TOL = 1e-9
MIXEDNESS_TOL = 1e-10
SCHMIDT_TOL = 1e-9


def reduced_purity(state: StateVector, subset: Sequence[int]) -> float:
    """Tr(rho^2) of the reduction onto subset"""
    return partial_trace(state, subset).purity


def bipartitions(n_qubits: int) -> List[Tuple[int, ...]]:
    """Smaller side of every bipartition; equal halves are listed once (the side holding qubit 1)"""
    splits = []
    for size in range(1, n_qubits // 2 + 1):
        for subset in itertools.combinations(range(1, n_qubits + 1), size):
            if 2 * size == n_qubits and 1 not in subset:
                continue
            splits.append(subset)
    return splits


@dataclass(frozen=True)
class SplitRecord:
    subset: Tuple[int, ...]
    rest: Tuple[int, ...]
    entropy: float
    purity: float

    def to_json(self) -> Dict:
        return {
            "split": [list(self.rest), list(self.subset)],
            "entropy": self.entropy,
            "purity": self.purity,
        }


@dataclass(frozen=True)
class SplitReport:
    n_qubits: int
    records: Tuple[SplitRecord, ...]

    def of_size(self, size: int) -> List[SplitRecord]:
        return [r for r in self.records if len(r.subset) == size]

    def to_json(self) -> Dict:
        return {"n": self.n_qubits, "splits": [r.to_json() for r in self.records]}


def split_entropies(state: StateVector) -> SplitReport:
    """Entropy across every bipartition, keyed by its smaller side"""
    records = []
    for subset in bipartitions(state.n_qubits):
        rho = partial_trace(state, subset)
        records.append(SplitRecord(
            subset=subset,
            rest=complement(subset, state.n_qubits),
            entropy=von_neumann_entropy(rho),
            purity=rho.purity,
        ))
    return SplitReport(state.n_qubits, tuple(records))


@dataclass(frozen=True)
class MemsReport:
    s1: float
    s2: float

    def to_json(self) -> Dict:
        return {"S1": self.s1, "S2": self.s2}


def mems(state: StateVector) -> MemsReport:
    """Mean entropy of all one-qubit and all two-qubit reductions"""
    n = state.n_qubits
    singles = [von_neumann_entropy(partial_trace(state, (q,))) for q in range(1, n + 1)]
    pairs = [von_neumann_entropy(partial_trace(state, pair)) for pair in itertools.combinations(range(1, n + 1), 2)]
    return MemsReport(float(np.mean(singles)), float(np.mean(pairs)) if pairs else 0.0)


def verify_split_form(state: StateVector) -> List[Dict]:
    """Entropy 2, maximally mixed pair and flat Schmidt spectrum across every (rest | pair) split"""
    n = state.n_qubits
    report = []
    for pair in itertools.combinations(range(1, n + 1), 2):
        rho = partial_trace(state, pair)
        entropy = von_neumann_entropy(rho)
        deviation = float(np.max(np.abs(rho.entries - np.eye(4) / 4)))
        schmidt = schmidt_coefficients(state, pair)
        flat = len(schmidt) == 4 and float(np.max(np.abs(schmidt - 0.5))) < SCHMIDT_TOL
        checks = {
            "entropy": abs(entropy - 2.0) < SPLIT_ENTROPY_TOL,
            "maximally_mixed": deviation < MIXEDNESS_TOL,
            "flat_schmidt": flat,
        }
        report.append({
            "split": [list(complement(pair, n)), list(pair)],
            "entropy": entropy,
            "max_reduction_deviation": deviation,
            "schmidt": [float(s) for s in schmidt],
            "checks": checks,
            "pass": all(checks.values()),
        })
    return report


def dense_capacity(state: Union[StateVector, DensityMatrix], alice: Sequence[int]) -> float:
    """log2 d_A + S(rho_B) - S(rho_AB), in bits"""
    n = state.n_qubits
    alice = check_subset(alice, n)
    if len(alice) == n:
        raise InvalidSubset("Alice must leave at least one qubit to the receiver")
    bob = complement(alice, n)
    return len(alice) + von_neumann_entropy(partial_trace(state, bob)) - von_neumann_entropy(state)


def maximal_mixedness_report(state: StateVector) -> Dict:
    """Purity of every one- and two-qubit reduction against the maximally mixed value"""
    n = state.n_qubits
    single = {str(q): reduced_purity(state, (q,)) for q in range(1, n + 1)}
    pair = {f"{a},{b}": reduced_purity(state, (a, b)) for a, b in itertools.combinations(range(1, n + 1), 2)}
    single_dev = max(abs(p - 0.5) for p in single.values())
    pair_dev = max((abs(p - 0.25) for p in pair.values()), default=0.0)
    return {
        "single_purity": single,
        "pair_purity": pair,
        "single_max_deviation": single_dev,
        "pair_max_deviation": pair_dev,
        "maximally_mixed": single_dev < 1e-12 and pair_dev < 1e-12,
    }


def reference_comparison(n_qubits: int = 5) -> Dict[str, Dict]:
    """MEMS of the Brown state next to GHZ and W on the same register"""
    return {
        "brown": mems(brown_state()).to_json(),
        "ghz": mems(ghz_state(n_qubits)).to_json(),
        "w": mems(w_state(n_qubits)).to_json(),
    }


def entropy_ledger(state: StateVector) -> Dict:
    """Everything `diagnose` reports for one state"""
    ledger = {
        "n": state.n_qubits,
        "splits": split_entropies(state).to_json()["splits"],
        "mems": mems(state).to_json(),
        "mixedness": maximal_mixedness_report(state),
    }
    if state.n_qubits >= 4:
        ledger["split_form"] = verify_split_form(state)
    if state.n_qubits >= 2:
        alice = tuple(range(1, math.ceil(state.n_qubits / 2) + 1))
        ledger["dense_capacity"] = {"alice": list(alice), "bits": dense_capacity(state, alice)}
    return ledger
