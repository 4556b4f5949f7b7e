"""Interchange corpus loading and the training-pair dataset.

Records come from the radar toolkit's interchange export: per record a
one-bit cube, a high-resolution reference map, and JSON metadata, plus an
``interchange.json`` echo of the generation config and conventions.

Training pairs are map-domain tensors: the conventional map of the
one-bit cube (fixed-kernel RD layer) and the reference map, both
Doppler-shifted so zero velocity sits in the middle, center-cropped to a
square patch, peak-normalized, and split into (real, imaginary) channels.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path

import numpy as np
import torch

from .rd_layer import RdLayer

EXPECTED_METRICS_CONVENTION = "peak-normalized;guard=0;isl=20log10"


class ConventionError(ValueError):
    """The corpus was generated under different metric conventions."""


def _lfsr_chips(degree, taps, seed_bits):
    """Rebuild the transmit code from its manifest identification."""
    state = tuple(int(b) for b in seed_bits)
    period = (1 << degree) - 1
    bits = []
    for _ in range(period):
        bits.append(state[-1])
        feedback = 0
        for t in taps:
            feedback ^= state[t - 1]
        state = (feedback,) + state[:-1]
    chips = 1 - 2 * np.asarray(bits)
    return np.concatenate([chips, chips[:1]]).astype(np.float64)


@dataclass
class InterchangeRecord:
    record_id: int
    snr_db: float
    onebit: np.ndarray     # complex64 (n_fast, m_raw)
    reference: np.ndarray  # complex64 (n_fast, m_slow)


@dataclass
class InterchangeCorpus:
    n_fast: int
    m_raw: int
    accumulation: int
    code: np.ndarray
    records: list

    @property
    def m_slow(self):
        return self.m_raw // self.accumulation

    @classmethod
    def load(cls, interchange_dir):
        interchange_dir = Path(interchange_dir)
        echo_path = interchange_dir / "interchange.json"
        if not echo_path.is_file():
            raise FileNotFoundError(f"interchange echo not found: {echo_path}")
        echo = json.loads(echo_path.read_text())
        convention = echo.get("metrics_convention")
        if convention != EXPECTED_METRICS_CONVENTION:
            raise ConventionError(
                f"corpus metric convention {convention!r} does not match "
                f"{EXPECTED_METRICS_CONVENTION!r}"
            )
        if echo.get("code_padding") != "repeat-first-chip":
            raise ConventionError(
                f"unsupported code padding rule {echo.get('code_padding')!r}"
            )
        code = _lfsr_chips(
            echo["code_degree"], tuple(echo["code_taps"]), echo["code_seed_bits"]
        )
        records = []
        for stem in echo["records"]:
            meta = json.loads((interchange_dir / f"{stem}.meta.json").read_text())
            records.append(
                InterchangeRecord(
                    record_id=meta["record_id"],
                    snr_db=meta["snr_db"],
                    onebit=np.load(interchange_dir / f"{stem}.onebit.npy"),
                    reference=np.load(interchange_dir / f"{stem}.reference.npy"),
                )
            )
        return cls(
            n_fast=echo["n_fast"],
            m_raw=echo["m_raw"],
            accumulation=echo["accumulation"],
            code=code,
            records=records,
        )


def shift_crop(map_2d, crop):
    """fftshift the Doppler axis and center-crop to ``crop`` columns."""
    shifted = np.fft.fftshift(np.asarray(map_2d), axes=-1)
    m = shifted.shape[-1]
    if crop > m:
        raise ValueError(f"crop {crop} wider than the Doppler axis {m}")
    start = (m - crop) // 2
    return shifted[..., start : start + crop]


def peak_normalize(map_2d):
    peak = np.abs(map_2d).max()
    if peak == 0.0:
        raise ValueError("degenerate map: all elements are zero")
    return map_2d / peak


def to_channels(map_2d):
    """Complex map -> float32 tensor with (real, imaginary) channels."""
    arr = np.asarray(map_2d)
    stacked = np.stack([arr.real, arr.imag]).astype(np.float32)
    return torch.from_numpy(stacked)


def conventional_map(cube, code, accumulation):
    """Fixed-kernel RD transform of a one-bit cube (numpy in/out)."""
    layer = RdLayer(code, accumulation=accumulation, trainable=False)
    with torch.no_grad():
        out = layer(torch.from_numpy(np.ascontiguousarray(cube)).to(torch.complex64))
    return out.numpy()


class RdPairDataset(torch.utils.data.Dataset):
    """(conventional map, reference map) training pairs as 2-channel tensors."""

    def __init__(self, corpus, indices=None, crop=128):
        self.crop = int(crop)
        indices = list(range(len(corpus.records))) if indices is None else list(indices)
        self.items = []
        for i in indices:
            record = corpus.records[i]
            conv = conventional_map(record.onebit, corpus.code, corpus.accumulation)
            conv = to_channels(peak_normalize(shift_crop(conv, self.crop)))
            ref = to_channels(
                peak_normalize(shift_crop(record.reference.astype(np.complex128),
                                          self.crop))
            )
            self.items.append((conv, ref))

    def __len__(self):
        return len(self.items)

    def __getitem__(self, idx):
        return self.items[idx]
