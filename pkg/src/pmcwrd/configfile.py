"""Plain-text ``key = value`` configuration files for the CLI.

Two schemas share one syntax (``#`` comments, blank lines ignored,
repeated ``target`` keys allowed):

Scenario files describe one radar setup plus a scene; corpus files
describe a dataset generation run.  Keys carry their units as suffixes
(_hz, _s, _m, _mps, _db).  Unknown keys are rejected.
"""

from __future__ import annotations

import numpy as np

from .dataset import CorpusSpec, SceneDistribution
from .scene import RadarConfig, Scene, Target

_CONFIG_KEYS = {
    "carrier_freq_hz": float,
    "chip_duration_s": float,
    "n_fast": int,
    "m_raw": int,
    "accumulation": int,
}
_SCENARIO_KEYS = {"snr_db": None, "rng_seed": int, "target": None} | _CONFIG_KEYS
_CORPUS_KEYS = {
    "count_per_snr": int,
    "snr_list": None,
    "master_seed": int,
    "reference_snr_db": float,
    "scene_k_min": int,
    "scene_k_max": int,
    "scene_velocity_fraction": float,
    "scene_gamma_mag_min": float,
    "scene_gamma_mag_max": float,
} | _CONFIG_KEYS


def read_kv(path):
    """Read a key-value file into {key: [values...]} preserving repeats."""
    entries = {}
    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            key, sep, value = line.partition("=")
            if not sep:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            entries.setdefault(key.strip(), []).append(value.strip())
    return entries


def _single(entries, key, convert, default):
    values = entries.get(key)
    if values is None:
        return default
    if len(values) > 1:
        raise ValueError(f"duplicate key: {key}")
    return convert(values[0])


def _check_keys(entries, allowed, path):
    unknown = sorted(set(entries) - set(allowed))
    if unknown:
        raise ValueError(f"{path}: unknown keys: {', '.join(unknown)}")


def _radar_config(entries):
    defaults = RadarConfig()
    return RadarConfig(
        **{
            key: _single(entries, key, conv, getattr(defaults, key))
            for key, conv in _CONFIG_KEYS.items()
        }
    )


def _parse_target(value):
    parts = value.split()
    if len(parts) != 4:
        raise ValueError(
            "target needs 4 fields: range_m velocity_mps gamma_re gamma_im"
        )
    r, v, g_re, g_im = (float(p) for p in parts)
    return Target(range_m=r, velocity_mps=v, gamma=complex(g_re, g_im))


def load_scenario(path):
    """Parse a scenario file into (RadarConfig, Scene)."""
    entries = read_kv(path)
    _check_keys(entries, _SCENARIO_KEYS, path)
    config = _radar_config(entries)
    snr_raw = _single(entries, "snr_db", str, "none")
    snr_db = None if snr_raw.lower() == "none" else float(snr_raw)
    seed = _single(entries, "rng_seed", int, 0)
    targets = tuple(_parse_target(v) for v in entries.get("target", []))
    return config, Scene(targets=targets, snr_db=snr_db, rng_seed=seed)


def load_corpus(path):
    """Parse a corpus file into (RadarConfig, CorpusSpec)."""
    entries = read_kv(path)
    _check_keys(entries, _CORPUS_KEYS, path)
    config = _radar_config(entries)
    snr_raw = _single(entries, "snr_list", str, None)
    if snr_raw is None:
        raise ValueError(f"{path}: corpus config requires snr_list")
    snr_list = tuple(float(s) for s in snr_raw.split(","))
    base = SceneDistribution()
    distribution = SceneDistribution(
        k_min=_single(entries, "scene_k_min", int, base.k_min),
        k_max=_single(entries, "scene_k_max", int, base.k_max),
        velocity_fraction=_single(
            entries, "scene_velocity_fraction", float, base.velocity_fraction
        ),
        gamma_mag_min=_single(
            entries, "scene_gamma_mag_min", float, base.gamma_mag_min
        ),
        gamma_mag_max=_single(
            entries, "scene_gamma_mag_max", float, base.gamma_mag_max
        ),
    )
    count = _single(entries, "count_per_snr", int, None)
    if count is None:
        raise ValueError(f"{path}: corpus config requires count_per_snr")
    spec = CorpusSpec(
        count_per_snr=count,
        snr_list=snr_list,
        master_seed=_single(entries, "master_seed", int, 0),
        reference_snr_db=_single(entries, "reference_snr_db", float, 50.0),
        distribution=distribution,
    )
    return config, spec
