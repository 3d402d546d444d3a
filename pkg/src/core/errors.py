"""
Exception types raised by the simulator, oracles and protocols
"""


class BrownSimError(Exception):
    """Base class for every error raised by brownsim"""


class InvalidState(BrownSimError, ValueError):
    """Amplitudes or matrix entries violate a state invariant"""


class InvalidSubset(BrownSimError, ValueError):
    """Qubit labels out of range, duplicated or empty"""


class NonUnitaryOperator(BrownSimError, ValueError):
    """An operator handed to the engine is not unitary"""


class UnnormalizedWeights(BrownSimError, ValueError):
    """Branch weights do not square-sum to one"""


class ProbabilityLeak(BrownSimError):
    """A measurement basis does not capture all of the probability"""


class DegenerateState(BrownSimError):
    """The selected measurement outcome has a vanishing projection"""


class ConstructionMismatch(BrownSimError):
    """Two constructions of the same state disagree"""


class OracleFailure(BrownSimError):
    """A derived basis or correction fails its own consistency check"""


class GramFailure(BrownSimError):
    """Encoded states that must be orthonormal are not"""


class Undecodable(BrownSimError):
    """A received state matches no codeword"""


class LocalityViolation(BrownSimError):
    """A party acted on qubits it does not own"""


class NonUnitaryConversion(BrownSimError):
    """A derived joint conversion map is not unitary"""


class TableFormatError(BrownSimError, ValueError):
    """The printed-table data file is malformed or of an unsupported version"""
