import numpy as np
import pytest

from memheat.features import FeatureVector


def make_fv(addr_delta=0.0, pc_delta=0.0, size_log=3.0, slow_band=0.0,
            pingpong=0.0, cpu=0.0, op=0, bucket=0):
    return FeatureVector((float(addr_delta), float(pc_delta), float(size_log),
                          float(slow_band), float(pingpong), float(cpu)),
                         op, bucket)


@pytest.fixture
def fv_factory():
    return make_fv


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
