"""Waveform primitives shared by synthesis, estimation, and decoding.

All continuous-time signals in this package are piecewise constant (on-off
keyed square waves and their scaled templates).  They are represented
analytically by :class:`PiecewiseConstant` and discretized on a uniform grid
by :class:`SampledSignal`.  Every module quantizes edges with the same rule,
so a template evaluated at the sample instants matches a synthesized signal
sample for sample.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ParameterError

# Slack (in sample units) absorbed when quantizing an edge time, so that a
# product like 20e-6 * 8e6 that lands within float dust of an integer does
# not spill into the next sample.
_EDGE_SLACK = 1e-9


def edge_index(times, fs):
    """Sample index at which a transition at time ``times`` takes effect.

    Sample ``n`` covers ``[n/fs, (n+1)/fs)``; a transition at time ``t``
    flips the value at sample ``ceil(t*fs)``.
    """
    return np.ceil(np.asarray(times, dtype=np.float64) * fs - _EDGE_SLACK).astype(np.int64)


@dataclass(frozen=True)
class SampledSignal:
    """Uniformly sampled real or complex waveform."""

    samples: np.ndarray
    fs: float
    t0: float = 0.0

    def __post_init__(self):
        if self.fs <= 0:
            raise ParameterError("sample rate must be positive")
        samples = np.asarray(self.samples)
        if samples.ndim != 1:
            raise ParameterError("samples must be one-dimensional")
        object.__setattr__(self, "samples", samples)

    def __len__(self):
        return len(self.samples)

    @property
    def duration(self) -> float:
        return len(self.samples) / self.fs

    @property
    def is_complex(self) -> bool:
        return np.iscomplexobj(self.samples)

    def with_samples(self, samples: np.ndarray) -> "SampledSignal":
        return SampledSignal(samples, self.fs, self.t0)


class PiecewiseConstant:
    """Right-continuous piecewise-constant function, zero outside its support.

    ``bounds`` holds the n+1 strictly increasing breakpoints and ``values``
    the n plateau values.  Integrals and inner products are computed from the
    breakpoints, which keeps the unit-energy and orthogonality checks exact
    to float rounding.
    """

    __slots__ = ("bounds", "values")

    def __init__(self, bounds, values):
        bounds = np.asarray(bounds, dtype=np.float64)
        values = np.asarray(values, dtype=np.float64)
        if bounds.ndim != 1 or values.ndim != 1 or len(bounds) != len(values) + 1:
            raise ParameterError("need n+1 bounds for n values")
        if not np.all(np.diff(bounds) > 0):
            raise ParameterError("bounds must be strictly increasing")
        self.bounds = bounds
        self.values = values

    def __call__(self, t):
        t = np.asarray(t, dtype=np.float64)
        idx = np.searchsorted(self.bounds, t, side="right") - 1
        inside = (idx >= 0) & (idx < len(self.values))
        out = np.where(inside, self.values[np.clip(idx, 0, len(self.values) - 1)], 0.0)
        return out if out.ndim else float(out)

    @property
    def support(self):
        return float(self.bounds[0]), float(self.bounds[-1])

    def widths(self):
        return np.diff(self.bounds)

    def integral(self) -> float:
        return float(np.dot(self.values, self.widths()))

    def energy(self) -> float:
        return float(np.dot(self.values**2, self.widths()))

    def inner(self, other: "PiecewiseConstant") -> float:
        """Exact integral of the product of two piecewise-constant functions."""
        lo = max(self.bounds[0], other.bounds[0])
        hi = min(self.bounds[-1], other.bounds[-1])
        if hi <= lo:
            return 0.0
        cuts = np.unique(np.concatenate([
            self.bounds[(self.bounds >= lo) & (self.bounds <= hi)],
            other.bounds[(other.bounds >= lo) & (other.bounds <= hi)],
            [lo, hi],
        ]))
        mids = 0.5 * (cuts[:-1] + cuts[1:])
        return float(np.sum(self(mids) * other(mids) * np.diff(cuts)))

    def scaled(self, a: float, b: float = 0.0, weight: float = 1.0) -> "PiecewiseConstant":
        """Return ``weight * f((t - b)/a)`` for ``a > 0``."""
        if a <= 0:
            raise ParameterError("scale must be positive")
        return PiecewiseConstant(self.bounds * a + b, self.values * weight)

    def sample(self, fs: float, n_samples: int) -> np.ndarray:
        """Sample on ``n_samples`` points at rate ``fs`` starting from t=0."""
        out = np.zeros(n_samples, dtype=np.float64)
        edges = np.clip(edge_index(self.bounds, fs), 0, n_samples)
        counts = np.diff(edges)
        filled = np.repeat(self.values, counts)
        out[edges[0]:edges[-1]] = filled
        return out

    @staticmethod
    def concat(parts) -> "PiecewiseConstant":
        """Join contiguous pieces (each part starts where the previous ends)."""
        parts = list(parts)
        bounds = [parts[0].bounds]
        values = [parts[0].values]
        for prev, cur in zip(parts, parts[1:]):
            if not np.isclose(prev.bounds[-1], cur.bounds[0], rtol=0, atol=1e-12 * max(1.0, abs(prev.bounds[-1]))):
                raise ParameterError("parts are not contiguous")
            bounds.append(cur.bounds[1:])
            values.append(cur.values)
        return PiecewiseConstant(np.concatenate(bounds), np.concatenate(values))
