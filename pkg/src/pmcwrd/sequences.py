"""Maximum-length sequences and the padded bipolar transmit code.

The canonical transmit reference is a degree-7 m-sequence (127 chips) with
one chip appended so the code length is a power of two.  Correlations in
this module are implemented as direct O(N^2) sums on purpose: they double
as the independent oracle for the transform-based path in :mod:`pmcwrd.rd`.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

CANONICAL_DEGREE = 7
CANONICAL_TAPS = (7, 6)


@dataclass(frozen=True)
class PnSequence:
    """Bipolar transmit code: an m-sequence followed by one padding chip.

    Attributes
    ----------
    chips : ndarray of int
        Code values in {-1, +1}, length ``n_total``.
    mls_len : int
        Length of the leading m-sequence (2**degree - 1).
    n_total : int
        Full code length, ``mls_len + 1``.
    """

    chips: np.ndarray
    mls_len: int
    n_total: int

    def __post_init__(self):
        chips = np.asarray(self.chips, dtype=np.int64)
        object.__setattr__(self, "chips", chips)
        if self.n_total != self.mls_len + 1:
            raise ValueError("n_total must equal mls_len + 1")
        if chips.shape != (self.n_total,):
            raise ValueError(
                f"chip vector has length {chips.size}, expected {self.n_total}"
            )
        if not np.all(np.abs(chips) == 1):
            raise ValueError("chips must be -1 or +1")
        acf = cyclic_autocorrelation(chips[: self.mls_len])
        if acf[0] != self.mls_len or np.any(acf[1:] != -1):
            raise ValueError("leading chips do not form a maximal-length sequence")


def generate_mls(degree, taps, seed=None):
    """Generate one period of a +-1 maximal-length sequence.

    A Fibonacci LFSR with stages 1..degree is clocked for a full period of
    2**degree - 1 steps; the output bit is the last stage, the feedback bit
    (XOR of the tapped stages) enters at stage 1.  Bit b maps to chip 1 - 2b.

    Parameters
    ----------
    degree : int
        Register length; the sequence has period 2**degree - 1.
    taps : iterable of int
        Tapped stage numbers in 1..degree.  Must realize a primitive
        polynomial; anything else is rejected by the period check.
    seed : sequence of {0, 1}, optional
        Initial register contents, stage 1 first.  Defaults to all ones.

    Returns
    -------
    ndarray of int
        Chips in {-1, +1}, length 2**degree - 1.
    """
    degree = int(degree)
    if degree < 2:
        raise ValueError("degree must be at least 2")
    taps = tuple(sorted({int(t) for t in taps}))
    if not taps or taps[0] < 1 or taps[-1] > degree:
        raise ValueError(f"taps must lie in 1..{degree}, got {taps}")

    if seed is None:
        state = (1,) * degree
    else:
        state = tuple(int(b) for b in seed)
        if len(state) != degree:
            raise ValueError(f"seed must hold {degree} bits, got {len(state)}")
        if any(b not in (0, 1) for b in state):
            raise ValueError("seed bits must be 0 or 1")
    if not any(state):
        raise ValueError("degenerate LFSR state: all-zero seed never advances")

    period = (1 << degree) - 1
    initial = state
    bits = np.empty(period, dtype=np.int64)
    for i in range(period):
        bits[i] = state[-1]
        feedback = 0
        for t in taps:
            feedback ^= state[t - 1]
        state = (feedback,) + state[:-1]
        if state == initial and i + 1 < period:
            raise ValueError(
                f"sequence period below maximum: state repeats after {i + 1} steps"
            )
    if state != initial:
        raise ValueError("sequence period below maximum: register never recurs")
    return 1 - 2 * bits


def pad_sequence(mls):
    """Append one padding chip (a copy of the first) to an m-sequence.

    The padded code is no longer two-valued in its autocorrelation; its
    sidelobes are characterized by :func:`cyclic_autocorrelation` rather
    than assumed.
    """
    mls = np.asarray(mls)
    n = int(mls.size)
    if mls.ndim != 1 or n < 3 or (n & (n + 1)) != 0:
        raise ValueError(
            f"wrong input length: expected 2**k - 1 chips, got {n}"
        )
    chips = np.concatenate([mls, mls[:1]])
    return PnSequence(chips=chips, mls_len=n, n_total=n + 1)


def canonical_code():
    """Default 128-chip code: degree-7 LFSR, taps (7, 6), all-ones seed."""
    return pad_sequence(generate_mls(CANONICAL_DEGREE, CANONICAL_TAPS))


def cyclic_autocorrelation(seq):
    """Direct cyclic autocorrelation; lag r is sum_n seq[(n - r) mod N] * seq[n].

    Integer input gives exact integer output.
    """
    seq = np.asarray(seq)
    if seq.size == 0:
        raise ValueError("empty sequence")
    n = seq.size
    return np.array([np.dot(np.roll(seq, r), seq) for r in range(n)])


def cyclic_cross_correlation(ref, samples):
    """Direct cyclic cross-correlation of one fast-time column with a code.

    Lag r is sum_n conj(ref[(n - r) mod N]) * samples[n].  This is the
    O(N^2) oracle for the transform-based implementation in
    :mod:`pmcwrd.rd`; it must stay independent of that path.
    """
    ref = np.asarray(ref)
    samples = np.asarray(samples)
    if ref.ndim != 1 or ref.shape != samples.shape:
        raise ValueError("reference and samples must be 1-D of equal length")
    n = ref.size
    return np.array(
        [np.dot(np.conj(np.roll(ref, r)), samples) for r in range(n)]
    )
