"""Backend selection for the numeric kernels.

The compiled ``_ckernels`` extension is used when it imports; otherwise the
pure-Python ``_pykernels`` module is used. Setting ``IFBA_KERNELS=python``
forces the fallback.
"""

import os

from . import _pykernels

if os.environ.get("IFBA_KERNELS", "").lower() == "python":
    _impl = _pykernels
    BACKEND = "python"
else:
    try:
        from . import _ckernels as _impl

        BACKEND = "cython"
    except ImportError:
        _impl = _pykernels
        BACKEND = "python"

gauss_jordan_inverse = _impl.gauss_jordan_inverse
determinant = _impl.determinant
null_vector = _impl.null_vector
cauchy_product = _impl.cauchy_product
batch_cauchy_product = _impl.batch_cauchy_product
series_reciprocal = _impl.series_reciprocal

__all__ = [
    "BACKEND",
    "gauss_jordan_inverse",
    "determinant",
    "null_vector",
    "cauchy_product",
    "batch_cauchy_product",
    "series_reciprocal",
]
