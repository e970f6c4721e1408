import pytest

import dyadosc as d


@pytest.fixture(scope="session")
def weier_half():
    return d.WeierstrassFunction(2.0, 0.5)


@pytest.fixture(scope="session")
def block_schedule_half():
    return d.build_schedule(0.5, 2, depth_cap=1024)


@pytest.fixture(scope="session")
def block_martingale_half(block_schedule_half):
    return d.assemble_martingale(block_schedule_half)


@pytest.fixture(scope="session")
def wavelet_schedule_half():
    return d.wavelet_schedule(0.5, 1.0 / 200.0, 4)


@pytest.fixture(scope="session")
def oscillator_half(wavelet_schedule_half):
    return d.wavelet_oscillator(wavelet_schedule_half)
