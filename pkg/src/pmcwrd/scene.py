"""Point-target baseband synthesis for a PMCW radar front end.

The receive matrix is sampled at the chip rate on the grid
t = n*T + m*T_seq (fast time n, slow time m).  Each target contributes a
cyclically delayed copy of the transmit code times the carrier phase of
its round-trip delay; the delay is rounded to a whole chip and held fixed
across the CPI (no range migration), while the Doppler phase rotates at
every sample.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .sequences import PnSequence

SPEED_OF_LIGHT = 299_792_458.0


@dataclass(frozen=True)
class RadarConfig:
    """Radar timing parameters.  Defaults are the 79 GHz automotive setup."""

    carrier_freq_hz: float = 79e9
    chip_duration_s: float = 10e-9
    n_fast: int = 128
    m_raw: int = 10240
    accumulation: int = 20

    def __post_init__(self):
        if self.carrier_freq_hz <= 0 or self.chip_duration_s <= 0:
            raise ValueError("carrier frequency and chip duration must be positive")
        if self.n_fast < 1 or self.m_raw < 1 or self.accumulation < 1:
            raise ValueError("matrix dimensions must be positive")
        if self.m_raw % self.accumulation:
            raise ValueError(
                f"m_raw={self.m_raw} is not divisible by accumulation="
                f"{self.accumulation}"
            )

    @property
    def m_slow(self) -> int:
        """Slow-time length after pulse accumulation."""
        return self.m_raw // self.accumulation

    @property
    def t_seq_s(self) -> float:
        """Duration of one code repetition."""
        return self.n_fast * self.chip_duration_s

    @property
    def range_bin_m(self) -> float:
        """Range extent of one chip delay, c0*T/2."""
        return SPEED_OF_LIGHT * self.chip_duration_s / 2.0


@dataclass(frozen=True)
class Target:
    """Point scatterer.  Positive velocity recedes from the radar."""

    range_m: float
    velocity_mps: float
    gamma: complex = 1.0 + 0.0j


@dataclass(frozen=True)
class Scene:
    """Target list plus the noise level.  ``snr_db = None`` means noiseless.

    The SNR convention is per raw sample against a unit-amplitude target:
    snr_db = 10*log10(1 / sigma^2) with sigma^2 the complex noise variance,
    split evenly between the real and imaginary parts.
    """

    targets: tuple = ()
    snr_db: float | None = None
    rng_seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(self.targets))
        if self.snr_db is not None and not np.isfinite(self.snr_db):
            raise ValueError("snr_db must be finite (or None for noiseless)")


@dataclass
class AdcCube:
    """Complex fast-time x slow-time sample matrix.

    ``quantized`` marks one-bit data whose real and imaginary parts are
    all in {-1, +1}.
    """

    data: np.ndarray
    quantized: bool = False


def unambiguous_limits(config):
    """Unambiguous (range, velocity) of the sampling grid.

    Range covers one code period, c0*N*T/2.  Velocity is half the
    unambiguous Doppler interval of the accumulated pulse repetition
    interval, c0 / (4 * f_c * A * T_seq).
    """
    r = SPEED_OF_LIGHT * config.n_fast * config.chip_duration_s / 2.0
    v = SPEED_OF_LIGHT / (
        4.0 * config.carrier_freq_hz * config.accumulation * config.t_seq_s
    )
    return r, v


def velocity_resolution_mps(config):
    """Velocity step of one Doppler bin of the accumulated slow-time DFT."""
    t_acc = config.accumulation * config.t_seq_s
    return SPEED_OF_LIGHT / (2.0 * config.carrier_freq_hz * t_acc * config.m_slow)


def predict_doppler_bin(config, velocity_mps):
    """Doppler bin index where the slow-time DFT peaks for this velocity.

    The received slow-time phasor is exp(-j*2*pi*f_d*T_acc*m) with
    f_d = 2*f_c*v/c0, and the DFT kernel is exp(-j*2*pi*v*m/M), so a
    receding target (v > 0) lands on bin (-f_d*T_acc*M) mod M.  This is
    the oracle used by the peak-localization tests; exact for velocities
    on the bin grid.
    """
    f_d = 2.0 * config.carrier_freq_hz * velocity_mps / SPEED_OF_LIGHT
    t_acc = config.accumulation * config.t_seq_s
    return int(round(-f_d * t_acc * config.m_slow)) % config.m_slow


def range_bin_of(config, range_m):
    """Whole-chip delay of a target range, modulo the code period."""
    d = int(round(2.0 * range_m / (SPEED_OF_LIGHT * config.chip_duration_s)))
    return d % config.n_fast


def synthesize(config, code, scene):
    """Simulate the sampled baseband receive matrix for a scene.

    Parameters
    ----------
    config : RadarConfig
    code : PnSequence
        Transmit code; length must equal ``config.n_fast``.
    scene : Scene

    Returns
    -------
    AdcCube
        Unquantized complex matrix of shape (n_fast, m_raw).

    Notes
    -----
    Noise is drawn from numpy's PCG64 generator seeded with
    ``scene.rng_seed`` (real plane first, then imaginary), which makes
    regeneration bit-identical for a pinned numpy version.
    """
    if not isinstance(code, PnSequence):
        raise TypeError("code must be a PnSequence")
    if code.n_total != config.n_fast:
        raise ValueError(
            f"code length {code.n_total} does not match n_fast={config.n_fast}"
        )
    r_max, _ = unambiguous_limits(config)
    n = np.arange(config.n_fast)
    m = np.arange(config.m_raw)
    chips = code.chips.astype(np.float64)
    data = np.zeros((config.n_fast, config.m_raw), dtype=np.complex128)

    for tgt in scene.targets:
        if not 0.0 <= tgt.range_m < r_max:
            raise ValueError(
                f"range alias: target at {tgt.range_m} m is outside "
                f"[0, {r_max:.3f}) m"
            )
        delay = range_bin_of(config, tgt.range_m)
        envelope = np.roll(chips, delay)
        # Round-trip carrier phase: static term from range, linear term
        # from velocity, the latter evaluated at every sample instant.
        phi0 = np.exp(-4j * np.pi * config.carrier_freq_hz * tgt.range_m
                      / SPEED_OF_LIGHT)
        rate = -4j * np.pi * config.carrier_freq_hz * tgt.velocity_mps / SPEED_OF_LIGHT
        fast = np.exp(rate * n * config.chip_duration_s)
        slow = np.exp(rate * m * config.t_seq_s)
        data += (tgt.gamma * phi0) * (envelope * fast)[:, None] * slow[None, :]

    if scene.snr_db is not None:
        sigma2 = 10.0 ** (-scene.snr_db / 10.0)
        rng = np.random.Generator(np.random.PCG64(scene.rng_seed))
        scale = np.sqrt(sigma2 / 2.0)
        shape = (config.n_fast, config.m_raw)
        data += scale * rng.standard_normal(shape)
        data += 1j * scale * rng.standard_normal(shape)

    return AdcCube(data=data, quantized=False)
