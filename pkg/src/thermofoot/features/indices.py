"""Thermal change index, normalised temperature ranges and summary statistics."""

from dataclasses import dataclass

import numpy as np

from ..exceptions import ConfigError, EmptyMapError
from .histogram import _values


@dataclass(frozen=True)
class ReferencePattern:
    """Reference (control) angiosome means in degrees C."""

    LCA: float = 26.6
    LPA: float = 26.4
    MCA: float = 27.0
    MPA: float = 26.7

    def __post_init__(self):
        for name in ("LCA", "LPA", "MCA", "MPA"):
            v = getattr(self, name)
            if not 15.0 <= v <= 45.0:
                raise ConfigError(f"reference {name} mean {v} outside [15, 45]")

    def as_dict(self):
        return {"LCA": self.LCA, "LPA": self.LPA, "MCA": self.MCA, "MPA": self.MPA}

    @classmethod
    def uniform(cls, value):
        return cls(value, value, value, value)


@dataclass(frozen=True)
class NtrConfig:
    """Five contiguous half-open ranges ``[lo, hi)``.

    The two outer edges may be infinite.
    """

    edges: tuple = (-np.inf, 27.0, 29.0, 31.0, 33.0, np.inf)

    def __post_init__(self):
        edges = tuple(float(e) for e in self.edges)
        if len(edges) != 6:
            raise ConfigError(f"NTR config needs 6 edges for 5 ranges, got {len(edges)}")
        if any(b <= a for a, b in zip(edges, edges[1:])):
            raise ConfigError(f"NTR edges must be strictly ascending: {edges}")
        object.__setattr__(self, "edges", edges)

    @property
    def intervals(self):
        return list(zip(self.edges[:-1], self.edges[1:]))

    def to_dict(self):
        return {"edges": [None if not np.isfinite(e) else e for e in self.edges]}

    @classmethod
    def from_dict(cls, d):
        edges = list(d["edges"])
        if edges[0] is None:
            edges[0] = -np.inf
        if edges[-1] is None:
            edges[-1] = np.inf
        return cls(tuple(edges))


def compute_tci(subject_means, reference=ReferencePattern()):
    """Mean absolute deviation of the four angiosome means from the reference."""
    ref = reference.as_dict()
    missing = set(ref) - set(subject_means)
    if missing:
        raise ConfigError(f"missing angiosome means: {sorted(missing)}")
    return float(sum(abs(ref[k] - float(subject_means[k])) for k in ("LCA", "LPA", "MCA", "MPA")) / 4.0)


def ntr_fractions(source, config=NtrConfig()):
    """Share of foreground pixels in each of the five ranges."""
    values = _values(source)
    if values.size == 0:
        raise EmptyMapError("temperature map has no foreground pixels")
    return np.array([np.count_nonzero((values >= lo) & (values < hi)) / values.size
                     for lo, hi in config.intervals])


def summary_stats(source):
    """``(mean, median, std, max)`` over foreground pixels; population std."""
    values = _values(source)
    if values.size == 0:
        raise EmptyMapError("temperature map has no foreground pixels")
    return (float(values.mean()), float(np.median(values)), float(values.std()),
            float(values.max()))
