"""
Loader for the transcribed printed tables (config/printed_tables.json)
Turns printed term lists into vectors and residue maps
"""

import json
from functools import lru_cache, reduce
from pathlib import Path
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
from packaging.version import InvalidVersion, Version

from ..utils.config import TABLES_FILE
from .brown import bell_state, omega_basis
from .errors import TableFormatError
from .qsim import PauliLabel, StateVector

SUPPORTED_SCHEMA = Version("1.0")

SECRET_SYMBOLS = {
    1: {"alpha": 0, "beta": 1},
    2: {"alpha": 0, "gamma": 1, "mu": 2, "beta": 3},
}

REQUIRED_SECTIONS = ("ub", "teleport_one", "teleport_two", "sharing_p1", "sharing_p2", "sharing_two", "dense")


def _check_schema(raw: Dict, path: Path):
    try:
        version = Version(str(raw["schema_version"]))
    except KeyError:
        raise TableFormatError(f"{path} has no schema_version")
    except InvalidVersion as e:
        raise TableFormatError(f"{path} has an invalid schema_version: {e}")
    if version.major != SUPPORTED_SCHEMA.major:
        raise TableFormatError(
            f"{path} uses schema {version}, this build reads {SUPPORTED_SCHEMA.major}.x"
        )


@lru_cache(maxsize=4)
def load_printed_tables(path: Optional[Path] = None) -> Dict:
    """Read and validate the table data file; cached per path"""
    path = Path(path or TABLES_FILE)
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = json.load(f)
    except FileNotFoundError:
        raise TableFormatError(f"Printed table file not found: {path}")
    except json.JSONDecodeError as e:
        raise TableFormatError(f"Printed table file {path} is not valid JSON: {e}")

    if not isinstance(raw, dict):
        raise TableFormatError(f"{path} must contain a JSON object")
    _check_schema(raw, path)
    missing = [name for name in REQUIRED_SECTIONS if name not in raw]
    if missing:
        raise TableFormatError(f"{path} is missing sections: {', '.join(missing)}")
    return raw


def factor_vector(token: str) -> np.ndarray:
    """Amplitudes for a single printed ket factor"""
    if token.startswith("Omega"):
        try:
            index = int(token[len("Omega"):]) - 1
            return omega_basis()[index].amplitudes
        except (ValueError, IndexError):
            raise TableFormatError(f"Unknown Omega factor {token!r}")
    if token in ("psi+", "psi-", "phi+", "phi-"):
        return bell_state(token).amplitudes
    if token and set(token) <= {"0", "1"}:
        return StateVector.basis(token).amplitudes
    raise TableFormatError(f"Unknown ket factor {token!r}")


def _sign(token: str) -> int:
    if token == "+":
        return 1
    if token == "-":
        return -1
    raise TableFormatError(f"Term sign must be '+' or '-', got {token!r}")


def printed_vector(terms: Sequence[Sequence[str]]) -> np.ndarray:
    """Unnormalized vector from [sign, factor, ...] terms"""
    if not terms:
        raise TableFormatError("Printed vector has no terms")
    total = None
    for term in terms:
        sign, factors = _sign(term[0]), term[1:]
        if not factors:
            raise TableFormatError(f"Term {term!r} has no ket factors")
        vec = sign * reduce(np.kron, [factor_vector(f) for f in factors])
        if total is not None and vec.shape != total.shape:
            raise TableFormatError(f"Term {term!r} has inconsistent width")
        total = vec if total is None else total + vec
    return total


def printed_state(terms: Sequence[Sequence[str]]) -> StateVector:
    return StateVector.from_amplitudes(printed_vector(terms), normalize=True)


def residue_matrix(terms: Sequence[Sequence[str]], secret_qubits: int) -> np.ndarray:
    """Matrix whose column s is the printed residue's coefficient vector for secret symbol s"""
    symbols = SECRET_SYMBOLS[secret_qubits]
    columns: Dict[int, np.ndarray] = {}
    for term in terms:
        if len(term) < 3:
            raise TableFormatError(f"Residue term {term!r} needs a sign, a symbol and a ket")
        sign, symbol, factors = _sign(term[0]), term[1], term[2:]
        if symbol not in symbols:
            raise TableFormatError(f"Unknown secret symbol {symbol!r}")
        vec = sign * reduce(np.kron, [factor_vector(f) for f in factors])
        s = symbols[symbol]
        columns[s] = vec if s not in columns else columns[s] + vec
    if len(columns) != len(symbols):
        raise TableFormatError(f"Residue does not mention every secret symbol: {terms!r}")
    return np.column_stack([columns[s] for s in range(len(symbols))])


def parse_triple(tokens: Sequence[str]) -> Tuple[PauliLabel, ...]:
    return tuple(PauliLabel.parse(token) for token in tokens)


def section_rows(name: str) -> List[Dict]:
    try:
        return load_printed_tables()[name]["rows"]
    except (KeyError, TypeError):
        raise TableFormatError(f"Section {name!r} has no rows")
