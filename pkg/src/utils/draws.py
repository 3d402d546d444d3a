"""
Measurement draw sources

A run takes its measurement draws either from a seeded generator or from an
explicit list. Every draw handed out is recorded so the run can be replayed
in draw mode.
"""

from typing import Iterable, List, Optional, Sequence

import numpy as np


class DrawSource:
    """Yields draws in [0, 1) from a seed or from a fixed list"""

    def __init__(self, seed: Optional[int] = None, draws: Optional[Sequence[float]] = None):
        if seed is not None and draws is not None:
            raise ValueError("Use either a seed or explicit draws, not both")
        self.seed = seed
        self._explicit = [float(d) for d in draws] if draws is not None else None
        for d in self._explicit or ():
            if not 0.0 <= d < 1.0:
                raise ValueError(f"Draws must lie in [0, 1), got {d!r}")
        self._rng = np.random.default_rng(seed if seed is not None else 0) if draws is None else None
        self.recorded: List[float] = []

    def next(self) -> float:
        if self._explicit is not None:
            if len(self.recorded) >= len(self._explicit):
                raise ValueError(f"Only {len(self._explicit)} draws were supplied")
            value = self._explicit[len(self.recorded)]
        else:
            value = float(self._rng.random())
        self.recorded.append(value)
        return value

    def take(self, count: int) -> List[float]:
        return [self.next() for _ in range(count)]

    def spawn(self, count: int) -> List["DrawSource"]:
        """Independent child sources for concurrent runs"""
        if self.seed is None:
            raise ValueError("Only seeded sources can be split")
        children = np.random.SeedSequence(self.seed).spawn(count)
        return [DrawSource(seed=int(child.generate_state(1)[0])) for child in children]

    def secret_rng(self) -> np.random.Generator:
        """Generator for random secrets, separate from the draw stream"""
        return np.random.default_rng([self.seed if self.seed is not None else 0, 1])


def parse_draws(text: str) -> List[float]:
    """Comma-separated draws, e.g. '0.1,0.75'"""
    values = [part.strip() for part in text.split(",") if part.strip()]
    if not values:
        raise ValueError("No draws given")
    draws = [float(v) for v in values]
    for d in draws:
        if not 0.0 <= d < 1.0:
            raise ValueError(f"Draws must lie in [0, 1), got {d!r}")
    return draws


def parse_floats(text: str) -> List[float]:
    return [float(part) for part in text.split(",") if part.strip()]


def parse_complex_list(values: Iterable) -> List[complex]:
    """Numbers or [re, im] pairs as complex amplitudes"""
    out = []
    for value in values:
        if isinstance(value, (list, tuple)):
            re, im = value
            out.append(complex(float(re), float(im)))
        elif isinstance(value, str):
            out.append(complex(value.replace(" ", "").replace("i", "j")))
        else:
            out.append(complex(value))
    return out
