"""Core time-series value types, periodic means, and the periodogram diagnostic."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidPeriodError, SeriesTooShortError


def _frozen_array(values, dtype=float) -> np.ndarray:
    arr = np.array(values, dtype=dtype)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class TimeSeries:
    """Ordered real samples at unit spacing; sample i sits at time start_index + i."""

    values: np.ndarray
    start_index: int = 0

    def __post_init__(self):
        arr = np.array(self.values, dtype=float)
        if arr.ndim != 1 or arr.size < 1:
            raise ValueError("a time series needs at least one sample")
        if not np.all(np.isfinite(arr)):
            raise ValueError("time series samples must be finite")
        arr.setflags(write=False)
        object.__setattr__(self, "values", arr)
        object.__setattr__(self, "start_index", int(self.start_index))

    @property
    def n(self) -> int:
        return self.values.size


@dataclass(frozen=True, eq=False)
class PeriodicMean:
    """Per-phase means of a series folded at an integer period.

    means[s] averages every sample whose index is congruent to s modulo the
    period; counts[s] records how many samples entered that average.
    """

    period: int
    means: np.ndarray
    counts: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "period", int(self.period))
        means = _frozen_array(self.means)
        counts = _frozen_array(self.counts, dtype=int)
        if means.size != self.period or counts.size != self.period:
            raise ValueError("means/counts must have exactly one entry per phase")
        if not np.all(np.isfinite(means)):
            raise ValueError("phase means must be finite")
        if np.any(counts < 1):
            raise ValueError("every phase needs at least one sample")
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "counts", counts)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Discrete power spectrum over frequencies in [0, 0.5] cycles/sample."""

    frequencies: np.ndarray
    power: np.ndarray

    def __post_init__(self):
        freqs = _frozen_array(self.frequencies)
        power = _frozen_array(self.power)
        if freqs.size != power.size:
            raise ValueError("frequencies and power must have equal length")
        if np.any(freqs < 0.0) or np.any(freqs > 0.5):
            raise ValueError("frequencies must lie in [0, 0.5]")
        if np.any(power < 0.0):
            raise ValueError("power must be non-negative")
        object.__setattr__(self, "frequencies", freqs)
        object.__setattr__(self, "power", power)


def _validate_period(p, n: int) -> int:
    p = int(p)
    if p < 1 or p > n:
        raise InvalidPeriodError(f"period {p} outside valid range [1, {n}]")
    return p


def periodic_mean(series: TimeSeries, p: int) -> PeriodicMean:
    """Average the series at each phase of an integer period p.

    The series length does not need to be a multiple of p; trailing phases
    simply average one fewer sample.
    """
    p = _validate_period(p, series.n)
    phases = np.arange(series.n) % p
    counts = np.bincount(phases, minlength=p)
    sums = np.bincount(phases, weights=series.values, minlength=p)
    return PeriodicMean(period=p, means=sums / counts, counts=counts)


def extend_periodic(pm: PeriodicMean, n: int) -> TimeSeries:
    """Tile per-phase means cyclically out to length n."""
    n = int(n)
    if n < 1:
        raise ValueError("extension length must be positive")
    return TimeSeries(pm.means[np.arange(n) % pm.period])


def periodogram(series: TimeSeries) -> Spectrum:
    """Discrete periodogram at the Fourier frequencies j/n, j = 0..floor(n/2).

    Power is normalized as |DFT|^2 / n, so a unit-amplitude sinusoid at a
    Fourier frequency produces a dominant bin of height approximately n/4.
    """
    n = series.n
    if n < 2:
        raise SeriesTooShortError("periodogram needs at least 2 samples")
    coeffs = np.fft.rfft(series.values)
    power = (coeffs.real**2 + coeffs.imag**2) / n
    freqs = np.arange(coeffs.size) / n
    return Spectrum(frequencies=freqs, power=power)
