"""Static figure rendering for CLI reports.

Figures are written next to the delimited output files; Doppler axes are
shifted to put zero velocity in the middle for display only (stored maps
keep natural bin order).
"""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt
import numpy as np

DB_FLOOR = -50.0


def magnitude_db(data, floor=DB_FLOOR):
    """Peak-normalized magnitude in dB, floored."""
    mag = np.abs(data)
    peak = mag.max()
    if peak == 0.0:
        return np.full(mag.shape, floor)
    with np.errstate(divide="ignore"):
        db = 20.0 * np.log10(mag / peak)
    return np.maximum(db, floor)


def save_rd_map_png(rdmap, path, title="range-Doppler map"):
    db = np.fft.fftshift(magnitude_db(rdmap.data), axes=1)
    m = db.shape[1]
    fig, ax = plt.subplots(figsize=(8, 4.5))
    img = ax.imshow(
        db,
        aspect="auto",
        origin="lower",
        extent=(-m // 2, m - m // 2 - 1, 0, db.shape[0] - 1),
        cmap="viridis",
        vmin=DB_FLOOR,
        vmax=0.0,
    )
    ax.set_xlabel("Doppler bin (shifted)")
    ax.set_ylabel("range bin")
    ax.set_title(title)
    fig.colorbar(img, ax=ax, label="amplitude (dB)")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_slice_png(range_bins, curves, path, title="range slice"):
    """Plot per-variant dB curves over range bins."""
    fig, ax = plt.subplots(figsize=(8, 4.5))
    markers = {"hr": "+", "onebit": "x"}
    for name, values in curves.items():
        ax.plot(range_bins, values, marker=markers.get(name, "."), label=name)
    ax.set_xlabel("range bin")
    ax.set_ylabel("amplitude (dB)")
    ax.set_ylim(DB_FLOOR - 2.0, 0.5)
    ax.grid(True)
    ax.legend()
    ax.set_title(title)
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)


def save_cube_png(cube, path, title="baseband samples (real part)"):
    fig, ax = plt.subplots(figsize=(8, 4.5))
    img = ax.imshow(cube.data.real, aspect="auto", origin="lower", cmap="RdBu_r")
    ax.set_xlabel("slow-time pulse")
    ax.set_ylabel("fast-time sample")
    ax.set_title(title)
    fig.colorbar(img, ax=ax, label="amplitude")
    fig.tight_layout()
    fig.savefig(path, dpi=150)
    plt.close(fig)
