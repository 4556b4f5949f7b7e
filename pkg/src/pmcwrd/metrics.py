"""Evaluation metrics on peak-normalized range-Doppler maps.

MSE compares magnitude maps cell by cell; PSL and ISL are computed per
Doppler column, excluding the main-lobe peak (plus an optional guard
window).  ISL defaults to a 20*log10 of the sidelobe power sum; the
conventional 10*log10 form is available behind a flag.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .rd import RdMap


@dataclass(frozen=True)
class MetricReport:
    """Flat metric record for one evaluated map."""

    mse: float
    psl_db: float
    isl_db: float
    doppler_bin: int
    peak_range_bin: int

    def to_kv(self) -> str:
        """Serialize as 'key = value' lines."""
        return "\n".join(
            [
                f"mse = {self.mse!r}",
                f"psl_db = {self.psl_db!r}",
                f"isl_db = {self.isl_db!r}",
                f"doppler_bin = {self.doppler_bin}",
                f"peak_range_bin = {self.peak_range_bin}",
            ]
        )


def normalize_peak(rdmap):
    """Scale a map so its peak magnitude is exactly 1."""
    peak = np.max(np.abs(rdmap.data))
    if peak == 0.0:
        raise ValueError("degenerate map: all elements are zero")
    return RdMap(data=rdmap.data / peak, normalized=True)


def mse(a, b):
    """Mean squared magnitude difference, averaged over all N*M cells."""
    if a.data.shape != b.data.shape:
        raise ValueError(
            f"dimension mismatch: {a.data.shape} vs {b.data.shape}"
        )
    if not (a.normalized and b.normalized):
        raise ValueError("both maps must be peak-normalized")
    diff = np.abs(a.data) - np.abs(b.data)
    return float(np.mean(diff * diff))


def peak_doppler_bin(rdmap):
    """Doppler column holding the global magnitude peak."""
    return int(np.unravel_index(np.argmax(np.abs(rdmap.data)), rdmap.data.shape)[1])


def _sidelobe_values(rdmap, doppler_bin, guard):
    if not rdmap.normalized:
        raise ValueError("map must be peak-normalized")
    guard = int(guard)
    if guard < 0:
        raise ValueError("guard must be nonnegative")
    if doppler_bin is None:
        doppler_bin = peak_doppler_bin(rdmap)
    col = np.abs(rdmap.data[:, doppler_bin])
    if not np.any(col):
        raise ValueError(f"degenerate column: Doppler bin {doppler_bin} is all zero")
    n = col.size
    r_hat = int(np.argmax(col))
    # Range bins wrap cyclically, so the guard window does too.
    lags = np.arange(n)
    dist = np.minimum((lags - r_hat) % n, (r_hat - lags) % n)
    side = col[dist > guard]
    if side.size == 0:
        raise ValueError("guard window covers the whole column")
    return side, r_hat, int(doppler_bin)


def psl(rdmap, doppler_bin=None, guard=0):
    """Peak sidelobe level of one Doppler column, in dB.

    Returns ``(psl_db, peak_range_bin)``.  ``guard = 0`` excludes only the
    peak bin itself.  The column defaults to the one holding the global
    magnitude peak.
    """
    side, r_hat, _ = _sidelobe_values(rdmap, doppler_bin, guard)
    with np.errstate(divide="ignore"):
        value = 20.0 * np.log10(np.max(side))
    return float(value), r_hat


def isl(rdmap, doppler_bin=None, guard=0, conventional_prefactor=False):
    """Integrated sidelobe level of one Doppler column, in dB.

    The default prefactor is 20*log10 of the sidelobe power sum;
    ``conventional_prefactor=True`` switches to 10*log10.  An all-zero
    sidelobe region returns -inf.
    """
    side, _, _ = _sidelobe_values(rdmap, doppler_bin, guard)
    power = float(np.sum(side * side))
    if power == 0.0:
        return float("-inf")
    prefactor = 10.0 if conventional_prefactor else 20.0
    return float(prefactor * np.log10(power))


def report(vmap, reference, doppler_bin=None, guard=0):
    """MetricReport of a map against a reference (both peak-normalized)."""
    err = mse(vmap, reference)
    psl_db, r_hat = psl(vmap, doppler_bin=doppler_bin, guard=guard)
    isl_db = isl(vmap, doppler_bin=doppler_bin, guard=guard)
    used_bin = peak_doppler_bin(vmap) if doppler_bin is None else int(doppler_bin)
    return MetricReport(
        mse=err,
        psl_db=psl_db,
        isl_db=isl_db,
        doppler_bin=used_bin,
        peak_range_bin=r_hat,
    )
