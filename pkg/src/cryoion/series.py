"""Uniformly sampled time series."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError


@dataclass(frozen=True)
class TimeSeries:
    """Uniform samples: t_k = t0 + k*dt. Samples are finite and read-only."""

    t0: float
    dt: float
    samples: np.ndarray = field(repr=False)

    def __post_init__(self):
        dt = float(self.dt)
        if not np.isfinite(dt) or dt <= 0:
            raise DomainError(f"dt must be positive and finite, got {self.dt!r}")
        arr = np.array(self.samples, dtype=float, copy=True)
        if arr.ndim != 1 or arr.size == 0:
            raise DomainError("samples must be a non-empty 1-d array")
        if not np.all(np.isfinite(arr)):
            raise DomainError("samples must all be finite")
        arr.flags.writeable = False
        object.__setattr__(self, "t0", float(self.t0))
        object.__setattr__(self, "dt", dt)
        object.__setattr__(self, "samples", arr)

    def __len__(self) -> int:
        return self.samples.size

    @property
    def times(self) -> np.ndarray:
        return self.t0 + self.dt * np.arange(self.samples.size)

    @property
    def duration(self) -> float:
        return self.dt * (self.samples.size - 1)

    @property
    def sample_rate(self) -> float:
        return 1.0 / self.dt

    def with_samples(self, samples) -> "TimeSeries":
        return TimeSeries(self.t0, self.dt, samples)


def seeded_rng(seed: int) -> np.random.Generator:
    """The one pseudo-random source used for synthetic data; always seeded."""
    return np.random.default_rng(seed)
