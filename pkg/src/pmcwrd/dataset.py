"""Paired training corpus: one-bit cubes plus high-resolution reference maps.

A dataset directory holds two files:

``records.bin``
    Little-endian binary.  File header: 8-byte magic ``PMCW1BDS``, u32
    version, u32 record count, then one u64 absolute offset per record.
    Each record: u32 id, f64 snr_db, f64 reference_snr_db, u64 input noise
    seed, u64 reference noise seed, u32 n_fast, u32 m_raw, u32 m_slow,
    u32 target count, then per target (f64 range_m, f64 velocity_mps,
    f64 gamma_re, f64 gamma_im), then the one-bit payload (two bits per
    complex sample, real sign first, C order, packed big-endian within
    each byte), then the reference map as little-endian complex64 in C
    order, then a u32 CRC-32 of all preceding record bytes.

``manifest.txt``
    Plain-text ``key = value`` metadata: counts, SNR split, radar config,
    code identification, scene distribution, and conventions.  Written
    after ``records.bin`` is complete.

Every record is reproducible from its stored scene metadata and seeds;
the whole corpus is reproducible from (config, spec, master_seed).
"""

from __future__ import annotations

import json
import struct
import zlib
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .quantize import one_bit
from .rd import RdMap, process
from .scene import AdcCube, RadarConfig, Scene, Target, synthesize, unambiguous_limits
from .sequences import CANONICAL_DEGREE, CANONICAL_TAPS, canonical_code

MAGIC = b"PMCW1BDS"
VERSION = 1
MANIFEST_NAME = "manifest.txt"
RECORDS_NAME = "records.bin"
CODE_PADDING_RULE = "repeat-first-chip"
SNR_CONVENTION = "per-raw-sample-unit-gamma"
METRICS_CONVENTION = "peak-normalized;guard=0;isl=20log10"
NOISE_RNG = "numpy-pcg64"

_RECORD_HEAD = struct.Struct("<IddQQIIII")
_TARGET = struct.Struct("<dddd")
_FILE_HEAD = struct.Struct("<8sII")


class DatasetError(ValueError):
    """Raised on malformed, corrupted, or out-of-range dataset content."""


@dataclass(frozen=True)
class SceneDistribution:
    """Scene draw used for corpus generation; every field is echoed in the
    manifest so consumers can see exactly how records were produced.

    Targets: K uniform in [k_min, k_max]; range uniform over integer bins
    1 .. n_fast-1; velocity uniform over ``velocity_fraction`` of the
    unambiguous interval; |gamma| uniform in [gamma_mag_min,
    gamma_mag_max] with uniform phase.
    """

    k_min: int = 1
    k_max: int = 5
    velocity_fraction: float = 0.9
    gamma_mag_min: float = 0.5
    gamma_mag_max: float = 1.0

    def __post_init__(self):
        if not 0 < self.k_min <= self.k_max:
            raise ValueError("target count bounds must satisfy 0 < k_min <= k_max")
        if not 0.0 < self.velocity_fraction <= 1.0:
            raise ValueError("velocity_fraction must be in (0, 1]")
        if not 0.0 < self.gamma_mag_min <= self.gamma_mag_max:
            raise ValueError("gamma magnitude bounds must be positive and ordered")


@dataclass(frozen=True)
class CorpusSpec:
    """What to generate: per-SNR record count, SNR list, seed, distribution."""

    count_per_snr: int
    snr_list: tuple
    master_seed: int = 0
    reference_snr_db: float = 50.0
    distribution: SceneDistribution = field(default_factory=SceneDistribution)

    def __post_init__(self):
        object.__setattr__(self, "snr_list", tuple(float(s) for s in self.snr_list))
        if self.count_per_snr <= 0:
            raise ValueError("count_per_snr must be positive")
        if not self.snr_list:
            raise ValueError("snr_list must not be empty")

    @property
    def record_count(self) -> int:
        """Number of stored pairs; each pair holds two matrices."""
        return self.count_per_snr * len(self.snr_list)


@dataclass(frozen=True)
class DatasetManifest:
    version: int
    record_count: int
    snr_split: tuple
    reference_snr_db: float
    master_seed: int
    config: RadarConfig
    code_degree: int = CANONICAL_DEGREE
    code_taps: tuple = CANONICAL_TAPS
    code_seed_bits: str = "1" * CANONICAL_DEGREE
    code_padding: str = CODE_PADDING_RULE
    distribution: SceneDistribution = field(default_factory=SceneDistribution)
    snr_convention: str = SNR_CONVENTION
    metrics_convention: str = METRICS_CONVENTION
    noise_rng: str = NOISE_RNG

    def __post_init__(self):
        if sum(c for _, c in self.snr_split) != self.record_count:
            raise DatasetError("snr_split counts do not sum to record_count")


@dataclass
class DatasetRecord:
    record_id: int
    scene: Scene
    onebit_cube: AdcCube
    reference_map: RdMap
    config: RadarConfig
    reference_snr_db: float
    reference_noise_seed: int


def pack_sign_bits(data):
    """Pack a quantized complex matrix into sign bits (1 encodes +1).

    Two bits per sample in C order, real part first.
    """
    flags = np.empty(2 * data.size, dtype=np.uint8)
    flags[0::2] = (data.real.ravel() > 0).astype(np.uint8)
    flags[1::2] = (data.imag.ravel() > 0).astype(np.uint8)
    return np.packbits(flags).tobytes()


def unpack_sign_bits(payload, shape):
    """Inverse of :func:`pack_sign_bits`; reconstructs +-1 complex values."""
    count = 2 * shape[0] * shape[1]
    flags = np.unpackbits(np.frombuffer(payload, dtype=np.uint8), count=count)
    signs = 2.0 * flags.astype(np.float64) - 1.0
    return (signs[0::2] + 1j * signs[1::2]).reshape(shape)


def _draw_scene(config, distribution, snr_db, seed_seq):
    rng = np.random.Generator(np.random.PCG64(seed_seq))
    k = int(rng.integers(distribution.k_min, distribution.k_max + 1))
    _, v_max = unambiguous_limits(config)
    v_span = distribution.velocity_fraction * v_max
    targets = []
    for _ in range(k):
        bin_idx = int(rng.integers(1, config.n_fast))
        velocity = float(rng.uniform(-v_span, v_span))
        mag = float(rng.uniform(distribution.gamma_mag_min, distribution.gamma_mag_max))
        phase = float(rng.uniform(0.0, 2.0 * np.pi))
        targets.append(
            Target(
                range_m=bin_idx * config.range_bin_m,
                velocity_mps=velocity,
                gamma=mag * np.exp(1j * phase),
            )
        )
    input_seed, ref_seed = (int(s) for s in rng.integers(0, 2**63, size=2))
    return Scene(tuple(targets), float(snr_db), input_seed), ref_seed


def _record_bytes(record_id, scene, ref_snr_db, ref_seed, config, onebit, reference):
    parts = [
        _RECORD_HEAD.pack(
            record_id,
            scene.snr_db,
            ref_snr_db,
            scene.rng_seed,
            ref_seed,
            config.n_fast,
            config.m_raw,
            config.m_slow,
            len(scene.targets),
        )
    ]
    for t in scene.targets:
        parts.append(
            _TARGET.pack(t.range_m, t.velocity_mps, t.gamma.real, t.gamma.imag)
        )
    parts.append(pack_sign_bits(onebit.data))
    parts.append(np.ascontiguousarray(reference.data.astype("<c8")).tobytes())
    blob = b"".join(parts)
    return blob + struct.pack("<I", zlib.crc32(blob))


def generate_corpus(config, spec, out_dir):
    """Generate a paired corpus into ``out_dir`` using the canonical code.

    For each record a scene is drawn from the documented distribution with
    a per-record seed derived from ``spec.master_seed``; the input cube is
    synthesized at the record's SNR and one-bit quantized, and a reference
    map is produced from the same geometry at ``spec.reference_snr_db``
    through the conventional pipeline.  The manifest is written last.
    """
    if not isinstance(spec, CorpusSpec):
        spec = CorpusSpec(**spec)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    code = canonical_code()
    if code.n_total != config.n_fast:
        raise ValueError("canonical code does not fit config.n_fast")

    count = spec.record_count
    offsets = []
    records_path = out_dir / RECORDS_NAME
    with open(records_path, "wb") as fh:
        fh.write(_FILE_HEAD.pack(MAGIC, VERSION, count))
        table_pos = fh.tell()
        fh.write(b"\x00" * 8 * count)
        record_id = 0
        for snr_db in spec.snr_list:
            for _ in range(spec.count_per_snr):
                seed_seq = np.random.SeedSequence(
                    entropy=spec.master_seed, spawn_key=(record_id,)
                )
                scene, ref_seed = _draw_scene(
                    config, spec.distribution, snr_db, seed_seq
                )
                onebit = one_bit(synthesize(config, code, scene))
                ref_scene = Scene(scene.targets, spec.reference_snr_db, ref_seed)
                reference = process(synthesize(config, code, ref_scene), code, config)
                offsets.append(fh.tell())
                fh.write(
                    _record_bytes(
                        record_id,
                        scene,
                        spec.reference_snr_db,
                        ref_seed,
                        config,
                        onebit,
                        reference,
                    )
                )
                record_id += 1
        fh.seek(table_pos)
        fh.write(np.asarray(offsets, dtype="<u8").tobytes())

    manifest = DatasetManifest(
        version=VERSION,
        record_count=count,
        snr_split=tuple((snr, spec.count_per_snr) for snr in spec.snr_list),
        reference_snr_db=spec.reference_snr_db,
        master_seed=spec.master_seed,
        config=config,
        distribution=spec.distribution,
    )
    _write_manifest(manifest, out_dir / MANIFEST_NAME)
    return manifest


def _write_manifest(manifest, path):
    cfg = manifest.config
    dist = manifest.distribution
    lines = [
        "format = pmcwrd-dataset",
        f"version = {manifest.version}",
        f"record_count = {manifest.record_count}",
        "snr_split = " + ",".join(f"{s!r}:{c}" for s, c in manifest.snr_split),
        f"reference_snr_db = {manifest.reference_snr_db!r}",
        f"master_seed = {manifest.master_seed}",
        f"carrier_freq_hz = {cfg.carrier_freq_hz!r}",
        f"chip_duration_s = {cfg.chip_duration_s!r}",
        f"n_fast = {cfg.n_fast}",
        f"m_raw = {cfg.m_raw}",
        f"accumulation = {cfg.accumulation}",
        f"code_degree = {manifest.code_degree}",
        "code_taps = " + ",".join(str(t) for t in manifest.code_taps),
        f"code_seed_bits = {manifest.code_seed_bits}",
        f"code_padding = {manifest.code_padding}",
        f"scene_k = {dist.k_min},{dist.k_max}",
        f"scene_velocity_fraction = {dist.velocity_fraction!r}",
        f"scene_gamma_mag = {dist.gamma_mag_min!r},{dist.gamma_mag_max!r}",
        f"snr_convention = {manifest.snr_convention}",
        f"metrics_convention = {manifest.metrics_convention}",
        f"noise_rng = {manifest.noise_rng}",
    ]
    path.write_text("\n".join(lines) + "\n", encoding="ascii")


def load_manifest(dataset_dir):
    """Parse ``manifest.txt`` from a dataset directory."""
    path = Path(dataset_dir) / MANIFEST_NAME
    if not path.is_file():
        raise DatasetError(f"manifest not found: {path}")
    kv = {}
    for line in path.read_text(encoding="ascii").splitlines():
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        key, _, value = line.partition("=")
        kv[key.strip()] = value.strip()
    if kv.get("format") != "pmcwrd-dataset":
        raise DatasetError(f"not a dataset manifest: {path}")
    version = int(kv["version"])
    if version != VERSION:
        raise DatasetError(
            f"unsupported dataset version {version}, expected {VERSION}"
        )
    snr_split = tuple(
        (float(part.split(":")[0]), int(part.split(":")[1]))
        for part in kv["snr_split"].split(",")
    )
    config = RadarConfig(
        carrier_freq_hz=float(kv["carrier_freq_hz"]),
        chip_duration_s=float(kv["chip_duration_s"]),
        n_fast=int(kv["n_fast"]),
        m_raw=int(kv["m_raw"]),
        accumulation=int(kv["accumulation"]),
    )
    k_min, k_max = (int(x) for x in kv["scene_k"].split(","))
    g_min, g_max = (float(x) for x in kv["scene_gamma_mag"].split(","))
    distribution = SceneDistribution(
        k_min=k_min,
        k_max=k_max,
        velocity_fraction=float(kv["scene_velocity_fraction"]),
        gamma_mag_min=g_min,
        gamma_mag_max=g_max,
    )
    return DatasetManifest(
        version=version,
        record_count=int(kv["record_count"]),
        snr_split=snr_split,
        reference_snr_db=float(kv["reference_snr_db"]),
        master_seed=int(kv["master_seed"]),
        config=config,
        code_degree=int(kv["code_degree"]),
        code_taps=tuple(int(t) for t in kv["code_taps"].split(",")),
        code_seed_bits=kv["code_seed_bits"],
        code_padding=kv["code_padding"],
        distribution=distribution,
        snr_convention=kv["snr_convention"],
        metrics_convention=kv["metrics_convention"],
        noise_rng=kv["noise_rng"],
    )


def _read_exact(fh, count, what):
    data = fh.read(count)
    if len(data) != count:
        raise DatasetError(f"truncated dataset file while reading {what}")
    return data


def load_record(dataset_dir, record_id):
    """Load one record by id, verifying its checksum.

    Returns a :class:`DatasetRecord` with the one-bit cube reconstructed
    to +-1 complex values and the reference map in stored (complex64)
    precision.
    """
    manifest = load_manifest(dataset_dir)
    path = Path(dataset_dir) / RECORDS_NAME
    if not path.is_file():
        raise DatasetError(f"records file not found: {path}")
    with open(path, "rb") as fh:
        magic, version, count = _FILE_HEAD.unpack(
            _read_exact(fh, _FILE_HEAD.size, "file header")
        )
        if magic != MAGIC:
            raise DatasetError(f"bad magic in {path}")
        if version != VERSION:
            raise DatasetError(
                f"unsupported dataset version {version}, expected {VERSION}"
            )
        if not 0 <= record_id < count:
            raise DatasetError(
                f"record id {record_id} out of range 0..{count - 1}"
            )
        table = np.frombuffer(
            _read_exact(fh, 8 * count, "offset table"), dtype="<u8"
        )
        fh.seek(int(table[record_id]))
        head = _read_exact(fh, _RECORD_HEAD.size, f"record {record_id} header")
        (
            rec_id,
            snr_db,
            ref_snr_db,
            input_seed,
            ref_seed,
            n_fast,
            m_raw,
            m_slow,
            k_targets,
        ) = _RECORD_HEAD.unpack(head)
        if rec_id != record_id:
            raise DatasetError(
                f"record {record_id}: stored id {rec_id} does not match offset table"
            )
        target_bytes = _read_exact(
            fh, _TARGET.size * k_targets, f"record {record_id} targets"
        )
        onebit_len = (2 * n_fast * m_raw + 7) // 8
        onebit_payload = _read_exact(fh, onebit_len, f"record {record_id} cube")
        ref_len = 8 * n_fast * m_slow
        ref_payload = _read_exact(fh, ref_len, f"record {record_id} reference")
        (crc,) = struct.unpack(
            "<I", _read_exact(fh, 4, f"record {record_id} checksum")
        )
        if zlib.crc32(head + target_bytes + onebit_payload + ref_payload) != crc:
            raise DatasetError(f"record {record_id} failed checksum")

    targets = []
    for j in range(k_targets):
        r, v, g_re, g_im = _TARGET.unpack_from(target_bytes, j * _TARGET.size)
        targets.append(Target(range_m=r, velocity_mps=v, gamma=complex(g_re, g_im)))
    scene = Scene(tuple(targets), snr_db, input_seed)
    cube = AdcCube(
        data=unpack_sign_bits(onebit_payload, (n_fast, m_raw)), quantized=True
    )
    reference = RdMap(
        data=np.frombuffer(ref_payload, dtype="<c8").reshape(n_fast, m_slow),
        normalized=False,
    )
    config = RadarConfig(
        carrier_freq_hz=manifest.config.carrier_freq_hz,
        chip_duration_s=manifest.config.chip_duration_s,
        n_fast=n_fast,
        m_raw=m_raw,
        accumulation=m_raw // m_slow,
    )
    return DatasetRecord(
        record_id=record_id,
        scene=scene,
        onebit_cube=cube,
        reference_map=reference,
        config=config,
        reference_snr_db=ref_snr_db,
        reference_noise_seed=ref_seed,
    )


def verify_pairing(record):
    """Re-run the reference pipeline from stored metadata.

    Returns the relative Frobenius error between the regenerated map and
    the stored one; small values confirm pairing integrity.
    """
    code = canonical_code()
    ref_scene = Scene(
        record.scene.targets, record.reference_snr_db, record.reference_noise_seed
    )
    regenerated = process(synthesize(record.config, code, ref_scene), code,
                          record.config)
    stored = record.reference_map.data.astype(np.complex128)
    return float(
        np.linalg.norm(regenerated.data - stored) / np.linalg.norm(stored)
    )


def export_interchange(dataset_dir, out_dir):
    """Export every record as plain dense-array files plus JSON metadata.

    Per record: ``record_NNNNN.onebit.npy`` (complex64, +-1 values),
    ``record_NNNNN.reference.npy`` (complex64), ``record_NNNNN.meta.json``.
    A single ``interchange.json`` echoes the manifest so consumers can
    check configuration and conventions without parsing the binary format.
    """
    manifest = load_manifest(dataset_dir)
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    names = []
    for i in range(manifest.record_count):
        record = load_record(dataset_dir, i)
        stem = f"record_{i:05d}"
        np.save(out_dir / f"{stem}.onebit.npy",
                record.onebit_cube.data.astype(np.complex64))
        np.save(out_dir / f"{stem}.reference.npy",
                record.reference_map.data.astype(np.complex64))
        meta = {
            "record_id": record.record_id,
            "snr_db": record.scene.snr_db,
            "rng_seed": record.scene.rng_seed,
            "reference_snr_db": record.reference_snr_db,
            "reference_noise_seed": record.reference_noise_seed,
            "targets": [
                {
                    "range_m": t.range_m,
                    "velocity_mps": t.velocity_mps,
                    "gamma_re": t.gamma.real,
                    "gamma_im": t.gamma.imag,
                }
                for t in record.scene.targets
            ],
        }
        (out_dir / f"{stem}.meta.json").write_text(
            json.dumps(meta, indent=1), encoding="ascii"
        )
        names.append(stem)
    cfg = manifest.config
    echo = {
        "format": "pmcwrd-interchange",
        "version": VERSION,
        "record_count": manifest.record_count,
        "records": names,
        "carrier_freq_hz": cfg.carrier_freq_hz,
        "chip_duration_s": cfg.chip_duration_s,
        "n_fast": cfg.n_fast,
        "m_raw": cfg.m_raw,
        "accumulation": cfg.accumulation,
        "reference_snr_db": manifest.reference_snr_db,
        "code_degree": manifest.code_degree,
        "code_taps": list(manifest.code_taps),
        "code_seed_bits": manifest.code_seed_bits,
        "code_padding": manifest.code_padding,
        "snr_convention": manifest.snr_convention,
        "metrics_convention": manifest.metrics_convention,
        "noise_rng": manifest.noise_rng,
    }
    (out_dir / "interchange.json").write_text(
        json.dumps(echo, indent=1), encoding="ascii"
    )
    return out_dir
