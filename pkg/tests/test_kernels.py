import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from ifba import kernels

finite = st.floats(-10, 10, allow_nan=False, allow_infinity=False)


def test_backend_is_reported():
    assert kernels.BACKEND in ("cython", "python")


@pytest.mark.parametrize("n", [1, 2, 3, 5, 8])
def test_inverse_matches_numpy(backend, rng, n):
    a = rng.uniform(-1, 1, (n, n)) + n * np.eye(n)
    inv = backend.gauss_jordan_inverse(a, 1e-12)
    np.testing.assert_allclose(inv, np.linalg.inv(a), rtol=1e-10, atol=1e-12)


def test_inverse_singular_returns_none(backend):
    a = np.array([[1.0, 2.0], [2.0, 4.0]])
    assert backend.gauss_jordan_inverse(a, 1e-12) is None
    assert backend.gauss_jordan_inverse(np.zeros((3, 3)), 0.0) is None


def test_inverse_pivoting_needed(backend):
    a = np.array([[0.0, 1.0], [1.0, 0.0]])
    np.testing.assert_array_equal(backend.gauss_jordan_inverse(a, 1e-12), a)


def test_inverse_leaves_input_alone(backend):
    a = np.array([[2.0, 1.0], [1.0, 3.0]])
    before = a.copy()
    backend.gauss_jordan_inverse(a, 1e-12)
    np.testing.assert_array_equal(a, before)


@pytest.mark.parametrize("n", [1, 2, 4, 6])
def test_determinant(backend, rng, n):
    a = rng.uniform(-2, 2, (n, n))
    assert backend.determinant(a) == pytest.approx(np.linalg.det(a), rel=1e-10, abs=1e-12)


def test_determinant_singular_is_zero(backend):
    assert backend.determinant(np.array([[1.0, 2.0], [2.0, 4.0]])) == 0.0


@pytest.mark.parametrize(
    "a",
    [
        [[1.0, 0.0], [0.0, 0.0]],
        [[1.0, 2.0], [2.0, 4.0]],
        [[0.0, 0.0], [0.0, 0.0]],
        [[1.0, 2.0, 3.0], [4.0, 5.0, 6.0], [7.0, 8.0, 9.0]],
        [[0.0, 1.0, 0.0], [0.0, 0.0, 1.0], [0.0, 0.0, 0.0]],
    ],
)
def test_null_vector_is_unit_kernel(backend, a):
    a = np.array(a)
    v = backend.null_vector(a, 1e-12 * max(np.linalg.norm(a), 1e-300))
    assert v is not None
    assert np.linalg.norm(v) == pytest.approx(1.0)
    assert np.linalg.norm(a @ v) <= 1e-10 * max(np.linalg.norm(a), 1.0)


def test_null_vector_of_invertible_is_none(backend):
    assert backend.null_vector(np.eye(3), 1e-12) is None


def test_cauchy_product_truncates(backend):
    a = np.array([1.0, 1.0, 0.0])
    b = np.array([1.0, -1.0, 0.0])
    np.testing.assert_array_equal(backend.cauchy_product(a, b), [1.0, 0.0, -1.0])


def test_batch_cauchy_matches_single(backend, rng):
    A = rng.uniform(-1, 1, (7, 5))
    B = rng.uniform(-1, 1, (7, 5))
    out = backend.batch_cauchy_product(A, B)
    for k in range(7):
        np.testing.assert_allclose(out[k], backend.cauchy_product(A[k], B[k]), rtol=0, atol=1e-15)


def test_series_reciprocal(backend):
    # 1/(1 - s) = 1 + s + s^2 + ...
    out = backend.series_reciprocal(np.array([1.0, -1.0, 0.0, 0.0]), 1e-15)
    np.testing.assert_allclose(out, [1.0, 1.0, 1.0, 1.0])
    assert backend.series_reciprocal(np.array([0.0, 1.0]), 1e-15) is None


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, (4, 4), elements=finite))
def test_backends_agree_on_inverse(a):
    from ifba import _pykernels

    c = pytest.importorskip("ifba._ckernels")
    floor = 1e-12 * np.linalg.norm(a)
    p, q = _pykernels.gauss_jordan_inverse(a, floor), c.gauss_jordan_inverse(a, floor)
    assert (p is None) == (q is None)
    if p is not None:
        np.testing.assert_allclose(p, q, rtol=1e-12, atol=1e-12 * np.abs(p).max())


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 6, elements=finite), arrays(np.float64, 6, elements=finite))
def test_cauchy_product_commutes(a, b):
    from ifba import _pykernels

    np.testing.assert_allclose(_pykernels.cauchy_product(a, b), _pykernels.cauchy_product(b, a), atol=1e-9)


@settings(max_examples=60, deadline=None)
@given(arrays(np.float64, 6, elements=finite))
def test_series_reciprocal_is_inverse(a):
    from ifba import _pykernels

    a = a.copy()
    a[0] = 1.0 + abs(a[0])
    inv = _pykernels.series_reciprocal(a, 1e-15)
    prod = _pykernels.cauchy_product(a, inv)
    e = np.zeros(6)
    e[0] = 1.0
    np.testing.assert_allclose(prod, e, atol=1e-6 * max(1.0, np.abs(inv).max()))


def test_environment_forces_python_fallback():
    import os
    import subprocess
    import sys

    env = dict(os.environ, IFBA_KERNELS="python")
    out = subprocess.run(
        [sys.executable, "-c", "from ifba import kernels; print(kernels.BACKEND)"],
        capture_output=True, text=True, env=env, check=True,
    )
    assert out.stdout.strip() == "python"
