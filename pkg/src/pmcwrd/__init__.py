"""PMCW radar simulation and one-bit range-Doppler processing toolkit."""

from .sequences import PnSequence, canonical_code, generate_mls, pad_sequence
from .scene import (
    AdcCube,
    RadarConfig,
    Scene,
    Target,
    predict_doppler_bin,
    synthesize,
    unambiguous_limits,
)
from .quantize import one_bit
from .rd import RangeProfile, RdMap, accumulate, doppler_dft, process, range_correlate
from .metrics import MetricReport, isl, mse, normalize_peak, psl

__all__ = [
    "AdcCube",
    "MetricReport",
    "PnSequence",
    "RadarConfig",
    "RangeProfile",
    "RdMap",
    "Scene",
    "Target",
    "accumulate",
    "canonical_code",
    "doppler_dft",
    "generate_mls",
    "isl",
    "mse",
    "normalize_peak",
    "one_bit",
    "pad_sequence",
    "predict_doppler_bin",
    "process",
    "psl",
    "range_correlate",
    "synthesize",
    "unambiguous_limits",
]

__version__ = "0.1.0"
