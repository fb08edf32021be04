"""Compiled and numpy kernels agree; the selected backend is reported."""
import numpy as np
from hypothesis import given, settings
from hypothesis import strategies as st

from bergman import _backend, _kernels_py

from conftest import disk_points


def test_backend_name():
    assert _backend.BACKEND in ("cython", "python")


def test_mobius_columns_closed_form_column0(backend):
    z = 0.5
    cols = _backend.mobius_columns(z, 30, 3)
    n = np.arange(31)
    assert np.allclose(cols[:, 0], -(0.75) * np.sqrt(n + 1) * 0.5**n, atol=1e-15)


def test_mobius_columns_origin_is_sign_flip(backend):
    cols = _backend.mobius_columns(0.0, 10, 11)
    assert np.allclose(cols, np.diag((-1.0) ** (np.arange(11) + 1)), atol=0)


def test_horner_matches_powers(backend):
    c = np.array([1.0, 2.0 - 1j, 0.5j])
    w = np.array([0.0, 0.3, -0.2 + 0.4j])
    expected = c[0] + c[1] * np.sqrt(2) * w + c[2] * np.sqrt(3) * w**2
    assert np.allclose(_backend.horner(c, w), expected, atol=1e-15)
    assert _backend.horner(c, w.reshape(3, 1)).shape == (3, 1)


@settings(max_examples=40, deadline=None)
@given(disk_points(0.97), st.integers(0, 80), st.integers(1, 12))
def test_backends_agree_on_columns(z, degree, ncols):
    ncols = min(ncols, degree + 1)
    try:
        from bergman import _kernels
    except ImportError:  # pragma: no cover
        return
    a = _kernels.mobius_columns(complex(z), degree, ncols)
    b = _kernels_py.mobius_columns(z, degree, ncols)
    assert np.allclose(a, b, rtol=1e-12, atol=1e-12)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 200), st.integers(1, 50), st.integers(0, 2**31))
def test_backends_agree_on_horner(degree, npts, seed):
    try:
        from bergman import _kernels
    except ImportError:  # pragma: no cover
        return
    rng = np.random.default_rng(seed)
    c = rng.standard_normal(degree + 1) + 1j * rng.standard_normal(degree + 1)
    w = 0.98 * np.sqrt(rng.random(npts)) * np.exp(2j * np.pi * rng.random(npts))
    a = np.asarray(_kernels.horner(c, w))
    b = _kernels_py.horner(c, w)
    assert np.allclose(a, b, rtol=1e-11, atol=1e-11)


def test_columns_reject_too_many():
    import pytest

    with pytest.raises(ValueError):
        _backend.mobius_columns(0.1, 2, 4)


def test_use_backend_roundtrip():
    prev = _backend.use_backend("python")
    assert _backend.BACKEND == "python"
    _backend.use_backend(prev)
    assert _backend.BACKEND == prev
