import numpy as np
import pytest

from pmcwrd.scene import RadarConfig, Scene, Target, synthesize
from pmcwrd.sequences import canonical_code


@pytest.fixture(scope="session")
def code():
    return canonical_code()


@pytest.fixture(scope="session")
def config():
    return RadarConfig()


@pytest.fixture(scope="session")
def small_config():
    # Full fast-time length, shortened slow time: keeps correlation
    # behavior identical while tests stay fast.
    return RadarConfig(m_raw=640, accumulation=20)


def single_target_cube(config, code, range_bins, velocity=0.0, gamma=1.0,
                       snr_db=None, seed=0):
    scene = Scene(
        targets=(Target(range_bins * config.range_bin_m, velocity, gamma),),
        snr_db=snr_db,
        rng_seed=seed,
    )
    return synthesize(config, code, scene)


@pytest.fixture
def rng():
    return np.random.default_rng(20260808)
