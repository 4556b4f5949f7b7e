"""Command-line entry point.

Subcommands: simulate, process, metrics, dataset, slice.  Every report
path writes delimited output (CSV or key-value text) and, where a figure
makes sense, a PNG rendered next to it.  All randomness is controlled by
explicit seeds; identical invocations produce byte-identical outputs.
"""

from __future__ import annotations

import argparse
import csv
import dataclasses
import sys
from pathlib import Path

import numpy as np

from . import configfile, metrics, plots
from .dataset import (
    DatasetError,
    export_interchange,
    generate_corpus,
    load_record,
    verify_pairing,
)
from .quantize import one_bit
from .rd import process
from .scene import AdcCube, predict_doppler_bin, synthesize
from .sequences import canonical_code

SLICE_SCHEMA = "pmcwrd-slice-v1"
METRICS_SCHEMA = "pmcwrd-metrics-v1"
RDMAP_SCHEMA = "pmcwrd-rdmap-v1"


def _checked_path(path):
    p = Path(path)
    if not p.is_file():
        raise ValueError(f"config file not found: {p}")
    return p


def _scenario(args):
    config, scene = configfile.load_scenario(_checked_path(args.config))
    if args.seed is not None:
        scene = dataclasses.replace(scene, rng_seed=args.seed)
    return config, scene


def _out_dir(args):
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _variant_map(cube, code, config, variant):
    if variant == "onebit":
        cube = one_bit(AdcCube(data=cube.data, quantized=False))
    return process(cube, code, config)


def _write_csv(path, schema, header, rows):
    with open(path, "w", newline="", encoding="ascii") as fh:
        fh.write(f"# {schema}\n")
        writer = csv.writer(fh)
        writer.writerow(header)
        writer.writerows(rows)


def run_simulate(args):
    config, scene = _scenario(args)
    out = _out_dir(args)
    cube = synthesize(config, canonical_code(), scene)
    np.save(out / "cube.npy", cube.data.astype(np.complex64))
    plots.save_cube_png(cube, out / "cube.png")
    print(f"wrote {out / 'cube.npy'} shape={cube.data.shape}")
    return 0


def run_process(args):
    config, scene = _scenario(args)
    out = _out_dir(args)
    code = canonical_code()
    if args.cube is not None:
        data = np.load(_checked_path(args.cube)).astype(np.complex128)
        cube = AdcCube(data=data, quantized=False)
    else:
        cube = synthesize(config, code, scene)
    rdmap = _variant_map(cube, code, config, args.variant)
    np.save(out / "rd_map.npy", rdmap.data.astype(np.complex64))
    db = plots.magnitude_db(rdmap.data)
    header = ["range_bin"] + [f"doppler_{v}" for v in range(db.shape[1])]
    rows = [[r] + [repr(float(x)) for x in db[r]] for r in range(db.shape[0])]
    _write_csv(out / "rd_map.csv", RDMAP_SCHEMA, header, rows)
    plots.save_rd_map_png(rdmap, out / "rd_map.png",
                          title=f"range-Doppler map ({args.variant})")
    print(f"wrote {out / 'rd_map.npy'} shape={rdmap.data.shape}")
    return 0


def run_metrics(args):
    config, scene = _scenario(args)
    out = _out_dir(args)
    code = canonical_code()
    cube = synthesize(config, code, scene)
    reference = metrics.normalize_peak(process(cube, code, config))
    if args.variant == "hr":
        vmap = reference
    else:
        vmap = metrics.normalize_peak(_variant_map(cube, code, config, "onebit"))
    rep = metrics.report(vmap, reference, guard=args.guard)
    print(rep.to_kv())
    (out / "metrics.txt").write_text(rep.to_kv() + "\n", encoding="ascii")
    _write_csv(
        out / "metrics.csv",
        METRICS_SCHEMA,
        ["variant", "mse", "psl_db", "isl_db", "doppler_bin", "peak_range_bin"],
        [[args.variant, f"{rep.mse!r}", f"{rep.psl_db!r}", f"{rep.isl_db!r}",
          rep.doppler_bin, rep.peak_range_bin]],
    )
    return 0


def run_slice(args):
    config, scene = _scenario(args)
    if not scene.targets:
        raise ValueError("empty scene: the slice report needs a dominant target")
    out = _out_dir(args)
    code = canonical_code()
    variants = [v.strip() for v in args.variants.split(",") if v.strip()]
    for v in variants:
        if v not in ("hr", "onebit"):
            raise ValueError(f"unknown variant: {v}")
    cube = synthesize(config, code, scene)
    col = predict_doppler_bin(config, scene.targets[0].velocity_mps)
    curves = {}
    for variant in variants:
        rdmap = metrics.normalize_peak(_variant_map(cube, code, config, variant))
        with np.errstate(divide="ignore"):
            db = 20.0 * np.log10(np.abs(rdmap.data[:, col]))
        curves[variant] = np.maximum(db, plots.DB_FLOOR)
    bins = list(range(config.n_fast))
    header = ["range_bin"] + [f"{v}_db" for v in variants]
    rows = [
        [r] + [repr(float(curves[v][r])) for v in variants] for r in bins
    ]
    _write_csv(out / "slice.csv", SLICE_SCHEMA, header, rows)
    plots.save_slice_png(bins, curves, out / "slice.png",
                         title=f"range slice at Doppler bin {col}")
    print(f"wrote {out / 'slice.csv'} (Doppler bin {col})")
    return 0


def run_dataset(args):
    config, spec = configfile.load_corpus(_checked_path(args.config))
    if args.seed is not None:
        spec = dataclasses.replace(spec, master_seed=args.seed)
    out = _out_dir(args)
    manifest = generate_corpus(config, spec, out)
    print(f"generated {manifest.record_count} record(s) in {out}")
    if not args.no_export:
        export_interchange(out, out / "interchange")
        print(f"exported interchange files to {out / 'interchange'}")
    if args.verify:
        worst = 0.0
        for i in range(manifest.record_count):
            worst = max(worst, verify_pairing(load_record(out, i)))
        print(f"pairing integrity: worst relative error {worst:.3e}")
        if worst > 1e-6:
            raise DatasetError(
                f"pairing integrity failed: {worst:.3e} exceeds 1e-6"
            )
    return 0


def build_parser():
    parser = argparse.ArgumentParser(
        prog="pmcwrd",
        description="PMCW radar simulation and one-bit range-Doppler toolkit",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, variant=False, guard=False, cube=False, dataset_flags=False):
        p.add_argument("--config", required=True, help="path to a config file")
        p.add_argument("--out", required=True, help="output directory")
        p.add_argument("--seed", type=int, default=None,
                       help="override the config's RNG seed")
        if variant:
            p.add_argument("--variant", choices=("hr", "onebit"), default="hr")
        if guard:
            p.add_argument("--guard", type=int, default=0,
                           help="sidelobe guard half-width in bins")
        if cube:
            p.add_argument("--cube", default=None,
                           help="process this .npy cube instead of synthesizing")
        if dataset_flags:
            p.add_argument("--verify", action="store_true",
                           help="re-run the reference pipeline on every record")
            p.add_argument("--no-export", action="store_true",
                           help="skip the interchange export")

    p = sub.add_parser("simulate", help="synthesize a baseband cube")
    common(p)
    p.set_defaults(func=run_simulate)

    p = sub.add_parser("process", help="run the range-Doppler pipeline")
    common(p, variant=True, cube=True)
    p.set_defaults(func=run_process)

    p = sub.add_parser("metrics", help="metric report against the HR reference")
    common(p, variant=True, guard=True)
    p.set_defaults(func=run_metrics)

    p = sub.add_parser("dataset", help="generate a paired training corpus")
    common(p, dataset_flags=True)
    p.set_defaults(func=run_dataset)

    p = sub.add_parser("slice", help="Doppler-column range slice per variant")
    common(p)
    p.add_argument("--variants", default="hr,onebit",
                   help="comma-separated list from {hr, onebit}")
    p.set_defaults(func=run_slice)

    return parser


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def entrypoint():
    sys.exit(main())


if __name__ == "__main__":
    entrypoint()
