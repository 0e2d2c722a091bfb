"""Phasor-domain iToF math.

An amplitude-modulated ToF measurement at modulation frequency ``f`` is a
complex phasor ``c = A * exp(j * phi)``; the phase encodes the round-trip
optical path, the amplitude the received intensity.  This module provides
the conversions between phase and metric depth, the projection of a
transient (path-length resolved energy histogram) onto a phasor, and the
direct/global split of a transient.

All functions are pure and accept scalars or numpy arrays where sensible.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

# Speed of light [m/s].
C_LIGHT = 299792458.0

# Default modulation frequencies [Hz].
DEFAULT_FREQUENCIES_HZ = (2.0e7, 5.0e7, 6.0e7)

# Default transient binning: round-trip optical path per bin and bin count.
# 2000 bins of 0.01 m cover 20 m of round-trip path.
DEFAULT_BIN_SIZE_M = 0.01
DEFAULT_N_BINS = 2000


@dataclass(frozen=True)
class TransientVector:
    """Per-pixel histogram of received energy over round-trip path bins."""

    bins: np.ndarray
    bin_size_m: float = DEFAULT_BIN_SIZE_M

    def __post_init__(self):
        bins = np.asarray(self.bins, dtype=np.float64)
        if bins.ndim != 1:
            raise ValueError("transient bins must be a 1-D array")
        if np.any(bins < 0):
            raise ValueError("transient energies must be non-negative")
        if self.bin_size_m <= 0:
            raise ValueError("bin_size_m must be positive")
        object.__setattr__(self, "bins", bins)

    @property
    def n_bins(self) -> int:
        return self.bins.shape[0]

    def bin_centers_m(self) -> np.ndarray:
        """Round-trip path length at the center of each bin."""
        return (np.arange(self.n_bins) + 0.5) * self.bin_size_m


@dataclass(frozen=True)
class TransientSplit:
    """Direct (first return) and global (everything after) components."""

    direct: TransientVector
    global_part: TransientVector


def amplitude_phase(p):
    """Amplitude and phase of a phasor (complex scalar or array).

    The phase of the zero phasor is defined as 0 (atan2 convention).
    Returns ``(amplitude, phase)`` with amplitude >= 0 and phase in
    (-pi, pi].
    """
    p = np.asarray(p, dtype=np.complex128)
    amplitude = np.abs(p)
    phase = np.arctan2(p.imag, p.real)
    # atan2(+-0, -x) returns +-pi; fold -pi onto +pi to keep (-pi, pi].
    phase = np.where(phase == -np.pi, np.pi, phase)
    if p.ndim == 0:
        return float(amplitude), float(phase)
    return amplitude, phase


def wrap_phase(phase):
    """Reduce a phase (scalar or array) into [0, 2*pi)."""
    return np.mod(phase, 2.0 * np.pi)


def depth_from_phase(phase, freq_hz: float):
    """Depth [m] from measured phase at one modulation frequency.

    Negative phases are wrapped into [0, 2*pi) first, so depths are
    non-negative.
    """
    if freq_hz <= 0:
        raise ValueError("modulation frequency must be positive")
    out = C_LIGHT * wrap_phase(phase) / (4.0 * np.pi * freq_hz)
    return float(out) if np.ndim(phase) == 0 else out


def phase_from_depth(depth, freq_hz: float):
    """Phase in [0, 2*pi) produced by a target at the given depth [m]."""
    if freq_hz <= 0:
        raise ValueError("modulation frequency must be positive")
    depth = np.asarray(depth, dtype=np.float64)
    if np.any(depth < 0):
        raise ValueError("depth must be non-negative")
    out = wrap_phase(4.0 * np.pi * freq_hz * depth / C_LIGHT)
    return float(out) if depth.ndim == 0 else out


def unambiguous_range(freq_hz: float) -> float:
    """Largest depth [m] measurable without phase wrapping."""
    if freq_hz <= 0:
        raise ValueError("modulation frequency must be positive")
    return C_LIGHT / (2.0 * freq_hz)


def dtof_pulse_depth(t_pulse_s: float, delta_s: float) -> float:
    """dToF depth [m] from light pulse duration and shutter time."""
    denom = t_pulse_s + delta_s
    if denom <= 0:
        raise ValueError("t_pulse + delta_s must be positive")
    return C_LIGHT / (2.0 * denom)


def projection_kernel(n_bins: int, bin_size_m: float, freq_hz: float) -> np.ndarray:
    """Complex projection row for one frequency, evaluated at bin centers."""
    r = (np.arange(n_bins) + 0.5) * bin_size_m
    return np.exp(1j * 2.0 * np.pi * freq_hz * r / C_LIGHT)


def itof_from_transient(x, freq_hz: float, bin_size_m: float = DEFAULT_BIN_SIZE_M):
    """Project a transient onto the iToF phasor at one frequency.

    ``x`` may be a TransientVector or an array whose last axis is the bin
    axis (so whole transient images project in one call).  A single target
    at round-trip path r produces phase 2*pi*f*r / c, i.e. 4*pi*f*d / c for
    one-way depth d.
    """
    if isinstance(x, TransientVector):
        bins = x.bins
        bin_size_m = x.bin_size_m
    else:
        bins = np.asarray(x, dtype=np.float64)
    kernel = projection_kernel(bins.shape[-1], bin_size_m, freq_hz)
    out = bins @ kernel
    return complex(out) if out.ndim == 0 else out


def split_transient(x: TransientVector) -> TransientSplit:
    """Split a transient into direct and global components.

    The direct component is the first maximal contiguous run of nonzero
    bins; the global component is everything after it.  The two always sum
    back to the input.
    """
    bins = x.bins
    direct = np.zeros_like(bins)
    global_part = np.zeros_like(bins)
    nz = np.flatnonzero(bins)
    if nz.size > 0:
        start = nz[0]
        end = start
        while end < bins.size and bins[end] != 0:
            end += 1
        direct[start:end] = bins[start:end]
        global_part[end:] = bins[end:]
    return TransientSplit(
        direct=TransientVector(direct, x.bin_size_m),
        global_part=TransientVector(global_part, x.bin_size_m),
    )


def naive_depth(phasors: np.ndarray, freq_hz: float) -> np.ndarray:
    """Per-pixel depth from a phasor image, ignoring multipath.

    Applies the amplitude/phase extraction and the phase-to-depth formula
    pixel-wise.  Zero phasors (background) map to depth 0.
    """
    phasors = np.asarray(phasors, dtype=np.complex128)
    _, phase = amplitude_phase(phasors)
    depth = depth_from_phase(phase, freq_hz)
    return np.where(phasors == 0, 0.0, depth)
