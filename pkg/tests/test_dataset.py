import hashlib
import json
import zlib

import numpy as np
import numpy.testing as npt
import pytest

from pmcwrd.dataset import (
    CorpusSpec,
    DatasetError,
    SceneDistribution,
    export_interchange,
    generate_corpus,
    load_manifest,
    load_record,
    pack_sign_bits,
    unpack_sign_bits,
    verify_pairing,
)
from pmcwrd.scene import RadarConfig


@pytest.fixture(scope="module")
def toy_corpus(tmp_path_factory, config):
    out = tmp_path_factory.mktemp("corpus")
    spec = CorpusSpec(count_per_snr=2, snr_list=(10.0, 20.0), master_seed=7)
    manifest = generate_corpus(config, spec, out)
    return out, spec, manifest


def test_pack_unpack_roundtrip(rng):
    re = rng.choice([-1.0, 1.0], size=(16, 10))
    im = rng.choice([-1.0, 1.0], size=(16, 10))
    data = re + 1j * im
    payload = pack_sign_bits(data)
    assert len(payload) == (2 * 16 * 10 + 7) // 8
    npt.assert_array_equal(unpack_sign_bits(payload, (16, 10)), data)


def test_paper_scale_spec_counts():
    spec = CorpusSpec(count_per_snr=1500, snr_list=(10.0, 20.0), master_seed=0)
    assert spec.record_count == 3000  # pairs; 6000 stored matrices
    assert 2 * spec.record_count == 6000


def test_invalid_spec_rejected_before_write(tmp_path, config):
    with pytest.raises(ValueError, match="count_per_snr"):
        CorpusSpec(count_per_snr=0, snr_list=(10.0,))
    with pytest.raises(ValueError, match="snr_list"):
        CorpusSpec(count_per_snr=1, snr_list=())
    assert list(tmp_path.iterdir()) == []


def test_manifest_contents(toy_corpus, config):
    out, spec, manifest = toy_corpus
    loaded = load_manifest(out)
    assert loaded.record_count == 4
    assert loaded.snr_split == ((10.0, 2), (20.0, 2))
    assert loaded.reference_snr_db == 50.0
    assert loaded.master_seed == 7
    assert loaded.config == config
    assert loaded.code_taps == (7, 6)
    assert loaded.code_padding == "repeat-first-chip"
    assert loaded == manifest


def test_record_roundtrip(toy_corpus):
    out, _, _ = toy_corpus
    rec = load_record(out, 0)
    assert rec.record_id == 0
    assert rec.scene.snr_db == 10.0
    assert rec.onebit_cube.quantized
    assert rec.onebit_cube.data.shape == (128, 10240)
    assert np.all(np.abs(rec.onebit_cube.data.real) == 1)
    assert np.all(np.abs(rec.onebit_cube.data.imag) == 1)
    assert rec.reference_map.data.shape == (128, 512)
    assert 1 <= len(rec.scene.targets) <= 5

    rec3 = load_record(out, 3)
    assert rec3.scene.snr_db == 20.0


def test_record_id_out_of_range(toy_corpus):
    out, _, _ = toy_corpus
    with pytest.raises(DatasetError, match="out of range"):
        load_record(out, 4)


def test_pairing_integrity(toy_corpus):
    out, _, _ = toy_corpus
    for i in range(4):
        assert verify_pairing(load_record(out, i)) < 1e-6


def test_determinism_byte_identical(tmp_path, config):
    spec = CorpusSpec(count_per_snr=1, snr_list=(10.0, 20.0), master_seed=123)
    a, b = tmp_path / "a", tmp_path / "b"
    generate_corpus(config, spec, a)
    generate_corpus(config, spec, b)
    for name in ("records.bin", "manifest.txt"):
        ha = hashlib.sha256((a / name).read_bytes()).hexdigest()
        hb = hashlib.sha256((b / name).read_bytes()).hexdigest()
        assert ha == hb, name


def test_corrupted_payload_detected(tmp_path, config):
    spec = CorpusSpec(count_per_snr=1, snr_list=(10.0,), master_seed=5)
    generate_corpus(config, spec, tmp_path)
    path = tmp_path / "records.bin"
    blob = bytearray(path.read_bytes())
    blob[len(blob) // 2] ^= 0xFF  # flip one payload byte
    path.write_bytes(bytes(blob))
    with pytest.raises(DatasetError, match="record 0 failed checksum"):
        load_record(tmp_path, 0)


def test_version_mismatch_detected(tmp_path, config):
    spec = CorpusSpec(count_per_snr=1, snr_list=(10.0,), master_seed=5)
    generate_corpus(config, spec, tmp_path)
    manifest_path = tmp_path / "manifest.txt"
    text = manifest_path.read_text().replace("version = 1", "version = 2")
    manifest_path.write_text(text)
    with pytest.raises(DatasetError, match="version"):
        load_record(tmp_path, 0)


def test_sign_payload_entropy(toy_corpus):
    # noisy scenes must not collapse to constant bit planes; the payload
    # keeps substantial entropy even though the code structure compresses
    out, _, _ = toy_corpus
    rec = load_record(out, 0)
    assert rec.onebit_cube.data.real.min() < 0 < rec.onebit_cube.data.real.max()
    assert rec.onebit_cube.data.imag.min() < 0 < rec.onebit_cube.data.imag.max()
    payload = pack_sign_bits(rec.onebit_cube.data)
    assert len(np.unique(np.frombuffer(payload, dtype=np.uint8))) > 200
    assert len(zlib.compress(payload)) / len(payload) > 0.3


def test_distribution_validation():
    with pytest.raises(ValueError):
        SceneDistribution(k_min=0)
    with pytest.raises(ValueError):
        SceneDistribution(velocity_fraction=1.5)
    with pytest.raises(ValueError):
        SceneDistribution(gamma_mag_min=0.9, gamma_mag_max=0.5)


def test_export_interchange(toy_corpus, tmp_path):
    out, _, _ = toy_corpus
    dest = tmp_path / "interchange"
    export_interchange(out, dest)
    echo = json.loads((dest / "interchange.json").read_text())
    assert echo["record_count"] == 4
    assert echo["metrics_convention"] == "peak-normalized;guard=0;isl=20log10"
    assert len(echo["records"]) == 4

    cube = np.load(dest / "record_00000.onebit.npy")
    assert cube.dtype == np.complex64
    assert cube.shape == (128, 10240)
    rec = load_record(out, 0)
    npt.assert_array_equal(cube, rec.onebit_cube.data.astype(np.complex64))

    ref = np.load(dest / "record_00000.reference.npy")
    assert ref.dtype == np.complex64
    npt.assert_array_equal(ref, rec.reference_map.data.astype(np.complex64))

    meta = json.loads((dest / "record_00000.meta.json").read_text())
    assert meta["snr_db"] == 10.0
    assert len(meta["targets"]) == len(rec.scene.targets)
