import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from volterra_lrd._convolution import causal_convolve, causal_solve, lagged_products


def naive_solve(w, f, x0, d):
    """Plain Python evaluation of the recurrence, no numba, no FFT."""
    n = len(f)
    x = [0.0] * n
    x[0] = x0
    for m in range(1, n):
        s = f[m]
        for j in range(m):
            s += w[m - j] * x[j]
        x[m] = s / d
    return np.array(x)


@settings(max_examples=40, deadline=None)
@given(n=st.integers(1, 60), d=st.floats(0.5, 2.0), seed=st.integers(0, 2**31))
def test_direct_leaf_matches_plain_python(n, d, seed):
    rng = np.random.default_rng(seed)
    w = rng.uniform(-0.3, 0.3, n)
    f = rng.normal(size=n)
    got = causal_solve(w, f, 1.0, d=d, fft=False)
    np.testing.assert_allclose(got, naive_solve(w, f, 1.0, d), rtol=1e-12, atol=1e-12)


@pytest.mark.parametrize("n,block", [(1000, 64), (4097, 512), (20000, 4096)])
def test_fft_path_agrees_with_direct(n, block):
    rng = np.random.default_rng(n)
    w = np.zeros(n)
    w[1] = 0.5
    w[2:] = 0.4 * np.arange(2, n) ** -1.3 / 10
    f = rng.normal(size=n)
    a = causal_solve(w, f, 1.0, fft=True, block=block)
    b = causal_solve(w, f, 1.0, fft=False)
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


def test_fft_path_is_bit_stable():
    rng = np.random.default_rng(1)
    w = rng.uniform(0, 1e-3, 10000)
    f = rng.normal(size=10000)
    a = causal_solve(w, f, 0.0, block=256)
    b = causal_solve(w, f, 0.0, block=256)
    assert np.array_equal(a, b)


def test_two_dimensional_forcing_matches_columns():
    rng = np.random.default_rng(2)
    w = rng.uniform(0, 1e-2, 3000)
    f = rng.normal(size=(3000, 3))
    both = causal_solve(w, f, 0.5, block=128)
    for p in range(3):
        np.testing.assert_allclose(both[:, p], causal_solve(w, f[:, p], 0.5, block=128), rtol=1e-13, atol=1e-13)


def test_causal_convolve_fft_and_direct():
    rng = np.random.default_rng(3)
    w, x = rng.normal(size=300), rng.normal(size=300)
    np.testing.assert_allclose(causal_convolve(w, x), np.convolve(w, x)[:300], atol=1e-12)
    np.testing.assert_allclose(causal_convolve(w, x, fft=False), np.convolve(w, x)[:300], atol=1e-12)


def test_lagged_products():
    x = np.arange(5.0)
    assert list(lagged_products(x, [0, 1])) == [30.0, 20.0]


def test_short_weights_rejected():
    with pytest.raises(ValueError):
        causal_solve(np.zeros(3), np.zeros(5), 0.0)
