import numpy as np
import pytest

import afdmsec as a


@pytest.fixture(scope="session")
def profile():
    return a.paper_profile()


@pytest.fixture(scope="session")
def qpsk_spec():
    return a.qpsk()


@pytest.fixture
def params64():
    return a.AfdmParams(n=64, c1=7 / 128, phase=a.conventional(0.2), cpp_len=3)


def small_scenario(phase, profile, *, trials=200, snr_db=25.0, seed=99, n=64):
    return a.make_scenario(phase, profile, n=n, snr_db=snr_db, trials=trials,
                           master_seed=seed)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
