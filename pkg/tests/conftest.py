import importlib

import numpy as np
import pytest

from ifba import _pykernels
from ifba.algebra import AlgebraModel
from ifba.ifnorm import IFNormModel


def _compiled():
    try:
        return importlib.import_module("ifba._ckernels")
    except ImportError:
        return None


_C = _compiled()

BACKEND_PARAMS = [
    pytest.param(_pykernels, id="python"),
    pytest.param(_C, id="cython", marks=pytest.mark.skipif(_C is None, reason="extension not built")),
]


@pytest.fixture(params=BACKEND_PARAMS)
def backend(request):
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def ifn(spec):
    return IFNormModel(AlgebraModel.parse(spec))


@pytest.fixture
def scalar():
    return ifn("scalar")


@pytest.fixture
def mat2():
    return ifn("matrix:n=2")
