import numpy as np
import pytest

from avgsample import KernelFunction, ProcessModel, SamplingGrid, SpectralMeasure, reference_model
from avgsample.spectral import random_psd


@pytest.fixture(scope="session")
def ref_model():
    return reference_model()


@pytest.fixture(scope="session")
def grid2():
    return SamplingGrid(2.0)


@pytest.fixture(scope="session")
def random_model():
    def make(m=4, seed=0, spread=1.5):
        nodes = np.sort(np.random.default_rng(seed).uniform(-spread, spread, m))
        return ProcessModel(KernelFunction.fourier(), SpectralMeasure(nodes, random_psd(m, seed + 100)))

    return make
