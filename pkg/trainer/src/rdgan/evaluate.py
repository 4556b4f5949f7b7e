"""Model evaluation with the radar toolkit's metric conventions.

Maps are peak-normalized magnitudes; MSE averages squared magnitude
differences over all cells; PSL and ISL are computed on the Doppler
column holding the global peak with guard 0, ISL as 20*log10 of the
sidelobe power sum.  Rows are written in the toolkit's metrics CSV
schema.  All metrics run on the cropped map domain the models operate
on, identically for every variant, so comparisons are like for like.
"""

from __future__ import annotations

import argparse
import csv
from pathlib import Path

import numpy as np
import torch

from .data import InterchangeCorpus, RdPairDataset

METRICS_SCHEMA = "pmcwrd-metrics-v1"
CSV_HEADER = ["variant", "mse", "psl_db", "isl_db", "doppler_bin", "peak_range_bin"]


def _magnitude(channels):
    arr = channels.detach().cpu().numpy() if torch.is_tensor(channels) else channels
    return np.hypot(arr[0], arr[1])


def peak_normalize_mag(mag):
    peak = mag.max()
    if peak == 0.0:
        raise ValueError("degenerate map: all elements are zero")
    return mag / peak


def map_mse(mag_a, mag_b):
    diff = mag_a - mag_b
    return float(np.mean(diff * diff))


def column_psl_isl(mag, doppler_bin=None, guard=0):
    """(psl_db, isl_db, doppler_bin, peak_range_bin) of one column."""
    if doppler_bin is None:
        doppler_bin = int(np.unravel_index(np.argmax(mag), mag.shape)[1])
    col = mag[:, doppler_bin]
    if not col.any():
        raise ValueError(f"degenerate column: Doppler bin {doppler_bin} is all zero")
    n = col.size
    r_hat = int(np.argmax(col))
    lags = np.arange(n)
    dist = np.minimum((lags - r_hat) % n, (r_hat - lags) % n)
    side = col[dist > guard]
    with np.errstate(divide="ignore"):
        psl_db = float(20.0 * np.log10(side.max()))
    power = float(np.sum(side * side))
    isl_db = float("-inf") if power == 0.0 else float(20.0 * np.log10(power))
    return psl_db, isl_db, int(doppler_bin), r_hat


def evaluate_pairs(model, dataset, variant):
    """Metric rows for every dataset item.

    Items are (input, reference) map pairs or (cube, conventional map,
    reference) triples for models with a learnable RD front end.
    ``model = None`` evaluates the identity denoiser, i.e. the
    conventional one-bit pipeline itself.
    """
    if model is not None:
        model.eval()
    rows = []
    with torch.no_grad():
        for item in dataset:
            if len(item) == 3:
                gen_in, conv, ref = item
            else:
                conv, ref = item
                gen_in = conv
            if model is None:
                out = conv
            else:
                out = model(gen_in.unsqueeze(0)).squeeze(0)
            mag = peak_normalize_mag(_magnitude(out))
            ref_mag = peak_normalize_mag(_magnitude(ref))
            psl_db, isl_db, v_bin, r_hat = column_psl_isl(mag)
            rows.append(
                {
                    "variant": variant,
                    "mse": map_mse(mag, ref_mag),
                    "psl_db": psl_db,
                    "isl_db": isl_db,
                    "doppler_bin": v_bin,
                    "peak_range_bin": r_hat,
                }
            )
    return rows


def mean_mse(rows):
    return float(np.mean([r["mse"] for r in rows]))


def write_metrics_csv(path, rows):
    with open(path, "w", newline="", encoding="ascii") as fh:
        fh.write(f"# {METRICS_SCHEMA}\n")
        writer = csv.writer(fh)
        writer.writerow(CSV_HEADER)
        for r in rows:
            writer.writerow(
                [r["variant"], repr(float(r["mse"])), repr(float(r["psl_db"])),
                 repr(float(r["isl_db"])), r["doppler_bin"], r["peak_range_bin"]]
            )


def main(argv=None):
    from .train import load_checkpoint

    parser = argparse.ArgumentParser(
        prog="rdgan-eval", description="evaluate a checkpoint on a corpus"
    )
    parser.add_argument("--corpus", required=True, help="interchange directory")
    parser.add_argument("--checkpoint", default=None,
                        help="checkpoint path; omit for the identity baseline")
    parser.add_argument("--out", required=True, help="output CSV path")
    parser.add_argument("--crop", type=int, default=128)
    args = parser.parse_args(argv)

    corpus = InterchangeCorpus.load(args.corpus)
    dataset = RdPairDataset(corpus, crop=args.crop)
    if args.checkpoint is None:
        rows = evaluate_pairs(None, dataset, "conventional-onebit")
    else:
        model, _ = load_checkpoint(args.checkpoint)
        rows = evaluate_pairs(model, dataset, "denoised")
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    write_metrics_csv(args.out, rows)
    print(f"mean mse {mean_mse(rows):.6e} over {len(rows)} record(s)")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
