"""Conventional range-Doppler processing.

The pipeline is: coherent accumulation of raw pulses, cyclic fast-time
correlation against the transmit code, then an unwindowed slow-time DFT.
Accumulation runs before correlation; by linearity of the correlation the
result is identical to accumulating range profiles, at a fraction of the
cost.  Maps are stored in natural bin order with no FFT shift; display
ordering is a reporting concern.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .scene import AdcCube
from .sequences import PnSequence


@dataclass
class RangeProfile:
    """Fast-time correlation output, one complex value per range bin and pulse."""

    data: np.ndarray


@dataclass
class RdMap:
    """Complex range-Doppler matrix; ``normalized`` marks unit peak magnitude."""

    data: np.ndarray
    normalized: bool = False


def accumulate(cube, factor):
    """Coherently sum consecutive groups of ``factor`` slow-time columns.

    Summation takes one-bit values off the {-1, +1} alphabet, so the
    quantized flag is always cleared on the output.
    """
    factor = int(factor)
    if factor < 1:
        raise ValueError("accumulation factor must be positive")
    n, m_raw = cube.data.shape
    if m_raw % factor:
        raise ValueError(
            f"slow-time length {m_raw} is not divisible by factor {factor}"
        )
    out = cube.data.reshape(n, m_raw // factor, factor).sum(axis=2)
    return AdcCube(data=out, quantized=False)


def range_correlate(cube, code):
    """Cyclic cross-correlation of every slow-time column with the code.

    Element (r, m) is sum_n conj(x[(n - r) mod N]) * y[n, m], computed as a
    length-N fast transform: multiply the column spectrum by the conjugate
    code spectrum and invert.  Matches the direct sum in
    :func:`pmcwrd.sequences.cyclic_cross_correlation`.
    """
    chips = code.chips if isinstance(code, PnSequence) else np.asarray(code)
    n = cube.data.shape[0]
    if chips.ndim != 1 or chips.size != n:
        raise ValueError(
            f"code length {chips.size} does not match fast-time length {n}"
        )
    spectrum = np.conj(np.fft.fft(chips))
    profile = np.fft.ifft(np.fft.fft(cube.data, axis=0) * spectrum[:, None], axis=0)
    return RangeProfile(data=profile)


def doppler_dft(profile):
    """Unwindowed DFT along slow time: q[r, v] = sum_m p[r, m] e^{-j2pi v m / M}.

    No zero padding and no FFT shift in storage.
    """
    return RdMap(data=np.fft.fft(profile.data, axis=1), normalized=False)


def process(cube, code, config):
    """Full pipeline on a raw cube: accumulate, correlate, Doppler DFT."""
    if cube.data.shape != (config.n_fast, config.m_raw):
        raise ValueError(
            f"expected a raw cube of shape ({config.n_fast}, {config.m_raw}), "
            f"got {cube.data.shape}"
        )
    acc = accumulate(cube, config.accumulation)
    return doppler_dft(range_correlate(acc, code))
