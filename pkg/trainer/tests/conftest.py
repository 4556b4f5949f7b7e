import pytest

from cli_runner import run_toolkit

# Toy corpus in the heavily dithered regime: visible quantization noise in
# the one-bit maps gives the denoiser something to learn at desk scale.
CORPUS_CFG = """\
m_raw = 2560
accumulation = 20
count_per_snr = 32
snr_list = -25, -20
master_seed = 11
"""

# Radar geometry echo for CLI `process` calls on exported cubes.
SCENARIO_CFG = """\
m_raw = 2560
accumulation = 20
snr_db = none
"""


@pytest.fixture(scope="session")
def corpus_dir(tmp_path_factory):
    root = tmp_path_factory.mktemp("toy_corpus")
    cfg = root / "corpus.cfg"
    cfg.write_text(CORPUS_CFG)
    data = root / "data"
    run_toolkit(["dataset", "--config", str(cfg), "--out", str(data)])
    return data


@pytest.fixture(scope="session")
def interchange_dir(corpus_dir):
    return corpus_dir / "interchange"


@pytest.fixture(scope="session")
def scenario_cfg(tmp_path_factory):
    path = tmp_path_factory.mktemp("cfg") / "scenario.cfg"
    path.write_text(SCENARIO_CFG)
    return path
